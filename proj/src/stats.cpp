// Copyright 2026 The mcmlab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mcmlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcmlab {

double mean_of(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean of empty sample");
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean_of(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double sem_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return sample_std(v) / std::sqrt(static_cast<double>(v.size()));
}

double percentile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("percentile of empty sample");
    std::sort(v.begin(), v.end());
    double pos = q * static_cast<double>(v.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return v[lo] * (1 - frac) + v[hi] * frac;
}

void linear_fit(const std::vector<double>& x, const std::vector<double>& y, double* slope,
                double* intercept) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: bad input");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); i++) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0) throw std::invalid_argument("linear_fit: degenerate x");
    *slope = (n * sxy - sx * sy) / denom;
    *intercept = (sy - *slope * sx) / n;
}

namespace {

constexpr double kSemFloor = 1e-7;
constexpr double kRMin = -0.999999;
constexpr double kRMax = 1.0;
constexpr double kAMax = 4.0;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

double chi2_at(const std::vector<double>& d, const std::vector<double>& f,
               const std::vector<double>& w, double a, double r) {
    double c = 0;
    for (size_t i = 0; i < d.size(); i++) {
        double e = f[i] - a * std::pow(r, d[i]);
        c += w[i] * e * e;
    }
    return c;
}

}  // namespace

DecayEstimate fit_decay(const std::vector<double>& depths, const std::vector<double>& means,
                        const std::vector<double>& sems, double delta) {
    if (depths.size() != means.size() || depths.size() != sems.size()) {
        throw std::invalid_argument("fit_decay: length mismatch");
    }
    if (depths.size() < 2) throw std::invalid_argument("fit_decay: need at least 2 depths");

    DecayEstimate est;
    std::vector<double> w(depths.size());
    for (size_t i = 0; i < sems.size(); i++) {
        double s = std::max(sems[i], kSemFloor);
        w[i] = 1.0 / (s * s);
    }

    // Log-linear seed on the positive points.
    std::vector<double> dx, ly;
    for (size_t i = 0; i < means.size(); i++) {
        if (means[i] > 0) {
            dx.push_back(depths[i]);
            ly.push_back(std::log(means[i]));
        }
    }
    if (dx.empty()) {
        est.fit_failed = true;
        est.r_hat = 0;
        est.A_hat = 0;
        return est;
    }
    double a = 1.0, r = 0.9;
    if (dx.size() >= 2) {
        double slope, icpt;
        try {
            linear_fit(dx, ly, &slope, &icpt);
            r = clamp(std::exp(slope), 1e-6, kRMax);
            a = clamp(std::exp(icpt), -kAMax, kAMax);
        } catch (const std::invalid_argument&) {
        }
    } else {
        a = clamp(std::exp(ly[0]), -kAMax, kAMax);
    }

    // Levenberg-Marquardt on (A, r).
    double lambda = 1e-3;
    double chi2 = chi2_at(depths, means, w, a, r);
    for (int iter = 0; iter < 200; iter++) {
        double jaa = 0, jar = 0, jrr = 0, ga = 0, gr = 0;
        for (size_t i = 0; i < depths.size(); i++) {
            double rd = std::pow(r, depths[i]);
            double model = a * rd;
            double resid = means[i] - model;
            double da = rd;
            double dr = depths[i] == 0 ? 0.0 : a * depths[i] * std::pow(r, depths[i] - 1);
            jaa += w[i] * da * da;
            jar += w[i] * da * dr;
            jrr += w[i] * dr * dr;
            ga += w[i] * da * resid;
            gr += w[i] * dr * resid;
        }
        double maa = jaa * (1 + lambda);
        double mrr = jrr * (1 + lambda);
        double det = maa * mrr - jar * jar;
        if (det == 0 || !std::isfinite(det)) break;
        double step_a = (mrr * ga - jar * gr) / det;
        double step_r = (maa * gr - jar * ga) / det;
        double a2 = clamp(a + step_a, -kAMax, kAMax);
        double r2 = clamp(r + step_r, kRMin, kRMax);
        double chi2_new = chi2_at(depths, means, w, a2, r2);
        if (chi2_new <= chi2) {
            double moved = std::abs(a2 - a) + std::abs(r2 - r);
            a = a2;
            r = r2;
            chi2 = chi2_new;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (moved < 1e-13) break;
        } else {
            lambda *= 10;
            if (lambda > 1e12) break;
        }
    }

    est.A_hat = a;
    est.r_hat = r;
    est.chi2 = chi2;

    // One-sigma via the Gauss-Newton covariance of the weighted problem.
    double jaa = 0, jar = 0, jrr = 0;
    for (size_t i = 0; i < depths.size(); i++) {
        double rd = std::pow(r, depths[i]);
        double da = rd;
        double dr = depths[i] == 0 ? 0.0 : a * depths[i] * std::pow(r, depths[i] - 1);
        jaa += w[i] * da * da;
        jar += w[i] * da * dr;
        jrr += w[i] * dr * dr;
    }
    double det = jaa * jrr - jar * jar;
    est.stderr_r = det > 0 ? std::sqrt(jaa / det) : 0.0;
    est.fit_failed = !std::isfinite(r) || !std::isfinite(a);
    est.reliable = !est.fit_failed && est.r_hat >= delta;
    return est;
}

}  // namespace mcmlab
