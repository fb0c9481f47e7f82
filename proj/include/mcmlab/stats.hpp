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

#pragma once

#include <cstdint>
#include <vector>

namespace mcmlab {

/// Fitted exponential decay f_d = A r^d with a one-sigma uncertainty on r.
struct DecayEstimate {
    double r_hat = 0.0;
    double A_hat = 0.0;
    double stderr_r = 0.0;
    bool fit_failed = false;
    bool reliable = false;
    double chi2 = 0.0;
};

/// Weighted Levenberg-Marquardt fit of (d, mean) pairs to A r^d, seeded by a
/// log-linear regression on the positive means. A is free (it absorbs SPAM);
/// r is constrained to (-1, 1]. `sems` are per-point standard errors; zeros
/// get a small floor. The reliability flag drops when the fit fails or
/// r_hat < delta.
DecayEstimate fit_decay(const std::vector<double>& depths, const std::vector<double>& means,
                        const std::vector<double>& sems, double delta);

double mean_of(const std::vector<double>& v);
/// Sample standard deviation (n-1 denominator); 0 for fewer than 2 points.
double sample_std(const std::vector<double>& v);
/// Standard error of the mean.
double sem_of(const std::vector<double>& v);
/// Linear interpolation percentile of an unsorted sample, q in [0, 1].
double percentile(std::vector<double> v, double q);
/// Least-squares slope and intercept of y against x.
void linear_fit(const std::vector<double>& x, const std::vector<double>& y, double* slope,
                double* intercept);

}  // namespace mcmlab
