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

#include "mcmlab/noise_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mcmlab {

std::vector<uint32_t> MCMLayerSpec::unmeasured() const {
    std::vector<bool> is_measured(n, false);
    for (uint32_t q : measured) is_measured[q] = true;
    std::vector<uint32_t> out;
    out.reserve(n - measured.size());
    for (uint32_t q = 0; q < n; q++) {
        if (!is_measured[q]) out.push_back(q);
    }
    return out;
}

void MCMLayerSpec::validate() const {
    if (n < 1 || n > 64) throw std::invalid_argument("layer qubit count out of range");
    std::set<uint32_t> seen;
    for (uint32_t q : measured) {
        if (q >= n) throw std::invalid_argument("measured qubit out of range");
        if (!seen.insert(q).second) throw std::invalid_argument("duplicate measured qubit");
    }
    for (const GateApp& g : v_gates) {
        if (g.q0 >= n || (is_two_qubit(g.gate) && g.q1 >= n)) {
            throw std::invalid_argument("v_gate qubit out of range");
        }
        if (seen.count(g.q0) || (is_two_qubit(g.gate) && seen.count(g.q1))) {
            throw std::invalid_argument("v_gates must act on unmeasured qubits only");
        }
    }
}

PauliOp MCMLayerSpec::embed(const PauliOp& local, uint64_t c) const {
    std::vector<uint32_t> unmeas = unmeasured();
    if (local.n != unmeas.size()) throw std::invalid_argument("embed: local Pauli size mismatch");
    PauliOp full = PauliOp::identity(n);
    for (uint32_t i = 0; i < unmeas.size(); i++) {
        full.x |= ((local.x >> i) & 1) << unmeas[i];
        full.z |= ((local.z >> i) & 1) << unmeas[i];
    }
    for (uint32_t i = 0; i < measured.size(); i++) {
        full.z |= ((c >> i) & 1) << measured[i];
    }
    return full;
}

void MCMLayerSpec::split(const PauliOp& full, PauliOp* unmeasured_part,
                         PauliOp* measured_part) const {
    if (full.n != n) throw std::invalid_argument("split: Pauli size mismatch");
    std::vector<uint32_t> unmeas = unmeasured();
    if (unmeasured_part) {
        PauliOp u;
        u.n = static_cast<uint32_t>(unmeas.size());
        for (uint32_t i = 0; i < unmeas.size(); i++) {
            u.x |= ((full.x >> unmeas[i]) & 1) << i;
            u.z |= ((full.z >> unmeas[i]) & 1) << i;
        }
        *unmeasured_part = u;
    }
    if (measured_part) {
        PauliOp v;
        v.n = m();
        for (uint32_t i = 0; i < measured.size(); i++) {
            v.x |= ((full.x >> measured[i]) & 1) << i;
            v.z |= ((full.z >> measured[i]) & 1) << i;
        }
        *measured_part = v;
    }
}

uint64_t MCMLayerSpec::measured_x_pattern(const PauliOp& full) const {
    uint64_t a = 0;
    for (uint32_t i = 0; i < measured.size(); i++) {
        a |= ((full.x >> measured[i]) & 1) << i;
    }
    return a;
}

std::vector<GateApp> MCMLayerSpec::v_gates_local() const {
    std::vector<uint32_t> unmeas = unmeasured();
    std::vector<uint32_t> to_local(n, UINT32_MAX);
    for (uint32_t i = 0; i < unmeas.size(); i++) to_local[unmeas[i]] = i;
    std::vector<GateApp> out;
    out.reserve(v_gates.size());
    for (const GateApp& g : v_gates) {
        GateApp local = g;
        local.q0 = to_local[g.q0];
        local.q1 = is_two_qubit(g.gate) ? to_local[g.q1] : local.q0;
        out.push_back(local);
    }
    return out;
}

PauliOp MCMLayerSpec::conjugate_by_v(const PauliOp& local) const {
    if (v_gates.empty()) return local;
    return conjugate_pauli(local, v_gates_local());
}

uint32_t MCMLayerSpec::v_even_order(uint32_t cap) const {
    uint32_t nm = num_unmeasured();
    if (nm == 0 || v_gates.empty()) return 2;
    std::vector<GateApp> local = v_gates_local();
    std::vector<PauliOp> gens;
    std::vector<bool> signs;
    for (uint32_t i = 0; i < nm; i++) {
        gens.push_back(PauliOp::single(nm, i, 'X'));
        gens.push_back(PauliOp::single(nm, i, 'Z'));
        signs.push_back(false);
        signs.push_back(false);
    }
    std::vector<PauliOp> cur = gens;
    for (uint32_t order = 1; order <= cap; order++) {
        for (size_t i = 0; i < cur.size(); i++) {
            bool s = false;
            cur[i] = conjugate_pauli(cur[i], local, &s);
            if (s) signs[i] = !signs[i];
        }
        bool back = true;
        for (size_t i = 0; i < cur.size() && back; i++) {
            back = cur[i] == gens[i] && !signs[i];
        }
        if (back) return order % 2 == 0 ? order : 2 * order;
    }
    throw std::runtime_error("v_even_order: order exceeds cap");
}

void USI::validate(double tol) const {
    layer.validate();
    q.check_distribution(tol);
    uint32_t nm = layer.num_unmeasured();
    uint64_t limit = layer.m() >= 64 ? ~0ULL : (1ULL << layer.m());
    for (const auto& [key, v] : q.entries) {
        if (key.q.n != nm) throw std::invalid_argument("USI: Q part has wrong qubit count");
        if (key.a >= limit || key.b >= limit) throw std::invalid_argument("USI: flip pattern too wide");
    }
    double f = usi_fidelity(*this);
    if (f < -tol || f > 1 + tol) throw std::invalid_argument("USI: fidelity outside [0, 1]");
}

void RawInstrumentModel::validate(double tol) const {
    layer.validate();
    e_pre.check_distribution(tol);
    t_mid.check_distribution(tol);
    e_post.check_distribution(tol);
    uint32_t nm = layer.num_unmeasured();
    for (const auto& [p, v] : e_pre.entries) {
        if (p.n != layer.n) throw std::invalid_argument("e_pre key has wrong qubit count");
    }
    for (const auto& [p, v] : e_post.entries) {
        if (p.n != layer.n) throw std::invalid_argument("e_post key has wrong qubit count");
    }
    for (const auto& [p, v] : t_mid.entries) {
        if (p.n != nm) throw std::invalid_argument("t_mid key has wrong qubit count");
    }
    for (const CondError& c : conditioned) {
        c.table.check_distribution(tol);
        for (const auto& [p, v] : c.table.entries) {
            if (p.n != layer.n) throw std::invalid_argument("conditioned key has wrong qubit count");
        }
    }
    if (!spam.prep.empty() && spam.prep.size() != layer.n) {
        throw std::invalid_argument("spam.prep size != n");
    }
    if (!spam.meas.empty() && spam.meas.size() != layer.n) {
        throw std::invalid_argument("spam.meas size != n");
    }
}

double lambda_eigenvalue(const USI& usi, uint64_t a, uint64_t b, const PauliOp& p_local) {
    if (p_local.n != usi.layer.num_unmeasured()) {
        throw std::invalid_argument("lambda_eigenvalue: P has wrong qubit count");
    }
    double lam = 0;
    for (const auto& [key, v] : usi.q.entries) {
        if (key.a != a || key.b != b) continue;
        lam += anticommutes(p_local, key.q) ? -v : v;
    }
    return lam;
}

LambdaTildeTable lambda_tilde_table(const USI& usi) {
    uint32_t nm = usi.layer.num_unmeasured();
    uint32_t m = usi.m();
    size_t np = 1ULL << (2 * nm);
    size_t nab = 1ULL << (2 * m);

    LambdaTildeTable table;
    table.num_unmeasured = nm;
    table.m = m;
    table.values.assign(np * nab, 0.0);

    // Flatten the q-table once so the inner loop is branch-free.
    struct Term {
        uint64_t ab;
        uint64_t qx, qz;
        double p;
    };
    std::vector<Term> terms;
    terms.reserve(usi.q.entries.size());
    for (const auto& [key, v] : usi.q.entries) {
        terms.push_back({key.a | (key.b << m), key.q.x, key.q.z, v});
    }

    for (size_t pi = 0; pi < np; pi++) {
        PauliOp p = pauli_from_index(pi, nm == 0 ? 0 : nm);
        double* slice = table.values.data() + pi * nab;
        for (const Term& t : terms) {
            int anti = parity64((p.x & t.qz) ^ (p.z & t.qx));
            slice[t.ab] += anti ? -t.p : t.p;
        }
        // lambda_{a,b,P} -> lambda-tilde_{P,(c,c')} in place.
        std::vector<double> tmp(slice, slice + nab);
        binary_fourier_in_place(tmp, m);
        std::copy(tmp.begin(), tmp.end(), slice);
    }
    return table;
}

double usi_fidelity(const USI& usi) {
    return usi.q.get(UsiKey(0, 0, PauliOp::identity(usi.layer.num_unmeasured())));
}

double usi_fidelity_from_lambda(const LambdaTildeTable& table) {
    double total = 0;
    for (double v : table.values) total += v;
    double dim = std::pow(4.0, table.num_unmeasured + table.m);
    return total / dim;
}

USI usi_from_raw(const RawInstrumentModel& raw) {
    raw.validate();
    if (raw.has_conditioned()) {
        throw std::invalid_argument("usi_from_raw: outcome-conditioned errors are not supported");
    }
    size_t combos = raw.e_pre.entries.size() * raw.t_mid.entries.size() * raw.e_post.entries.size();
    if (combos > 80'000'000ULL) {
        throw std::invalid_argument("usi_from_raw: channel product too large to convolve");
    }

    const MCMLayerSpec& layer = raw.layer;
    // Pre terms: a = measured X pattern, unmeasured part conjugated through V.
    // Measured Z parts never affect the outcome or the post state.
    struct PreTerm {
        uint64_t a;
        PauliOp qu;
        double p;
    };
    std::vector<PreTerm> pre;
    pre.reserve(raw.e_pre.entries.size());
    for (const auto& [e, v] : raw.e_pre.entries) {
        PauliOp eu;
        layer.split(e, &eu, nullptr);
        pre.push_back({layer.measured_x_pattern(e), layer.conjugate_by_v(eu), v});
    }
    struct PostTerm {
        uint64_t b;
        PauliOp qu;
        double p;
    };
    std::vector<PostTerm> post;
    post.reserve(raw.e_post.entries.size());
    for (const auto& [f, v] : raw.e_post.entries) {
        PauliOp fu;
        layer.split(f, &fu, nullptr);
        post.push_back({layer.measured_x_pattern(f), fu, v});
    }

    USI usi;
    usi.layer = layer;
    for (const PreTerm& e : pre) {
        for (const auto& [t, pt] : raw.t_mid.entries) {
            PauliOp et = compose(e.qu, t);
            double pet = e.p * pt;
            if (pet == 0) continue;
            for (const PostTerm& f : post) {
                double w = pet * f.p;
                if (w == 0) continue;
                usi.q.add(UsiKey(e.a, f.b, compose(et, f.qu)), w);
            }
        }
    }
    return usi;
}

namespace {

uint64_t pauli_space(uint32_t n) { return 1ULL << (2 * n); }

/// `count` distinct eligible non-identity Paulis with uniform weights
/// rescaled so the non-identity mass equals `infidelity`.
template <typename Eligible>
ProbTable<PauliOp> sample_sparse_channel(uint32_t n, uint64_t count, double infidelity,
                                         uint64_t num_eligible, Eligible eligible, Philox& rng) {
    ProbTable<PauliOp> table;
    if (infidelity == 0 || count == 0) {
        table.entries[PauliOp::identity(n)] = 1.0;
        return table;
    }
    if (count > num_eligible) {
        throw std::invalid_argument("sampler: more error terms requested than Paulis available");
    }
    std::set<uint64_t> picked;
    while (picked.size() < count) {
        uint64_t idx = rng.below(pauli_space(n));
        if (idx == 0) continue;
        PauliOp p = pauli_from_index(idx, n);
        if (!eligible(p)) continue;
        picked.insert(idx);
    }
    std::vector<double> weights;
    weights.reserve(picked.size());
    double total = 0;
    for (size_t i = 0; i < picked.size(); i++) {
        double w = rng.uniform();
        weights.push_back(w);
        total += w;
    }
    size_t i = 0;
    for (uint64_t idx : picked) {
        table.entries[pauli_from_index(idx, n)] = infidelity * weights[i++] / total;
    }
    table.entries[PauliOp::identity(n)] = 1.0 - infidelity;
    return table;
}

/// Tensor product of per-qubit depolarizing channels with the given rates.
ProbTable<PauliOp> depolarizing_product(const std::vector<double>& rates) {
    uint32_t n = static_cast<uint32_t>(rates.size());
    if (n > 10) throw std::invalid_argument("depolarizing product too large");
    ProbTable<PauliOp> table;
    uint64_t space = pauli_space(n);
    for (uint64_t idx = 0; idx < space; idx++) {
        PauliOp p = pauli_from_index(idx, n);
        double w = 1.0;
        for (uint32_t q = 0; q < n; q++) {
            w *= p.letter(q) == 'I' ? 1.0 - rates[q] : rates[q] / 3.0;
        }
        if (w > 0) table.entries[p] = w;
    }
    return table;
}

double clamp01(double v) { return std::min(std::max(v, 0.0), 1.0); }

}  // namespace

SpamSpec sample_spam(uint32_t n, double prep_mean, double meas_mean, Philox& rng) {
    SpamSpec spam;
    auto draw = [&](double mean) {
        std::vector<double> probs(n, 0.0);
        if (mean <= 0) return probs;
        double total = 0;
        for (uint32_t q = 0; q < n; q++) {
            probs[q] = rng.uniform();
            total += probs[q];
        }
        double scale = mean * n / total;
        for (double& p : probs) p = clamp01(p * scale);
        return probs;
    };
    spam.prep = draw(prep_mean);
    spam.meas = draw(meas_mean);
    return spam;
}

RawInstrumentModel sample_random_usi(const MCMLayerSpec& layer, const SamplerSpec& spec,
                                     Philox& rng) {
    layer.validate();
    uint32_t n = layer.n;
    uint32_t m = layer.m();
    uint32_t nm = layer.num_unmeasured();

    auto touches_measured = [&](const PauliOp& p) {
        for (uint32_t q : layer.measured) {
            if ((p.support() >> q) & 1) return true;
        }
        return false;
    };
    auto any_pauli = [](const PauliOp&) { return true; };
    uint64_t num_touching = pauli_space(n) - pauli_space(nm);
    uint64_t num_mid = nm == 0 ? 0 : pauli_space(nm) - 1;

    RawInstrumentModel model;
    model.layer = layer;

    auto identity_table = [](uint32_t k) {
        ProbTable<PauliOp> t;
        t.entries[PauliOp::identity(k)] = 1.0;
        return t;
    };

    // Recipe-default term counts clamp to what exists; an explicit request
    // beyond that is an infeasible spec.
    auto resolve_terms = [&](uint64_t requested, uint64_t available) {
        if (spec.num_terms && requested > available) {
            throw std::invalid_argument("sampler: more error terms requested than Paulis available");
        }
        return std::min(requested, available);
    };

    auto depol_mid = [&](double mean, double sd) {
        std::vector<double> rates(nm);
        for (uint32_t q = 0; q < nm; q++) rates[q] = clamp01(mean + sd * rng.gaussian());
        return depolarizing_product(rates);
    };

    switch (spec.recipe) {
        case SamplerRecipe::Sparse: {
            uint64_t k = spec.num_terms ? spec.num_terms
                                        : static_cast<uint64_t>(std::pow(3.0, nm) + 0.5);
            uint64_t k_mid = resolve_terms(k, num_mid);
            uint64_t k_side = resolve_terms(k, num_touching);
            // t_mid : e_pre : e_post infidelities split 2 : 1 : 1 of the total.
            model.t_mid = nm == 0 ? identity_table(nm)
                                  : sample_sparse_channel(nm, k_mid, spec.p / 2, num_mid,
                                                          any_pauli, rng);
            model.e_pre = sample_sparse_channel(n, k_side, spec.p / 4, num_touching,
                                                touches_measured, rng);
            model.e_post = sample_sparse_channel(n, k_side, spec.p / 4, num_touching,
                                                 touches_measured, rng);
            break;
        }
        case SamplerRecipe::DepolCrosstalk: {
            uint64_t k = spec.num_terms ? spec.num_terms : 100;
            uint64_t k_side = resolve_terms(k, num_touching);
            model.t_mid = depol_mid(spec.p, 0.2 * spec.p);
            model.e_pre = sample_sparse_channel(n, k_side, 5 * spec.p, num_touching,
                                                touches_measured, rng);
            model.e_post = sample_sparse_channel(n, k_side, spec.p, num_touching,
                                                 touches_measured, rng);
            break;
        }
        case SamplerRecipe::SuiteSparse: {
            uint64_t k = spec.num_terms ? spec.num_terms : (1ULL << n);
            model.t_mid = sample_sparse_channel(nm, resolve_terms(k, num_mid), 0.04,
                                                num_mid, any_pauli, rng);
            model.e_pre = sample_sparse_channel(n, resolve_terms(k, num_touching), 0.01,
                                                num_touching, touches_measured, rng);
            model.e_post = sample_sparse_channel(n, resolve_terms(k, num_touching), 0.01,
                                                 num_touching, touches_measured, rng);
            break;
        }
        case SamplerRecipe::SuiteDepolMcmCrosstalk: {
            uint64_t k = spec.num_terms ? spec.num_terms : (1ULL << n);
            model.t_mid = depol_mid(0.01, 0.002);
            model.e_pre = sample_sparse_channel(n, resolve_terms(k, num_touching), 0.01,
                                                num_touching, touches_measured, rng);
            model.e_post = sample_sparse_channel(n, resolve_terms(k, num_touching), 0.01,
                                                 num_touching, touches_measured, rng);
            break;
        }
        case SamplerRecipe::SuiteDepolPreCrosstalk: {
            uint64_t k = spec.num_terms ? spec.num_terms : (1ULL << n);
            model.t_mid = depol_mid(0.005, 0.0001);
            model.e_pre = sample_sparse_channel(n, resolve_terms(k, num_touching), 0.02,
                                                num_touching, touches_measured, rng);
            model.e_post = identity_table(n);
            break;
        }
    }
    if (nm == 0) model.t_mid = identity_table(0);
    model.spam = sample_spam(n, spec.prep_flip_mean, spec.meas_flip_mean, rng);
    model.validate();
    return model;
}

namespace {

ProbTable<PauliOp> convolve(const ProbTable<PauliOp>& a, const ProbTable<PauliOp>& b) {
    ProbTable<PauliOp> out;
    for (const auto& [pa, va] : a.entries) {
        for (const auto& [pb, vb] : b.entries) {
            out.add(compose(pa, pb), va * vb);
        }
    }
    return out;
}

}  // namespace

std::vector<double> branch_overlaps(const RawInstrumentModel& raw) {
    raw.validate();
    const MCMLayerSpec& layer = raw.layer;
    uint32_t m = layer.m();
    uint32_t nm = layer.num_unmeasured();

    // Pre terms that survive the projector sandwich: no X on measured qubits.
    std::map<PauliOp, double> w_pre;
    for (const auto& [e, v] : raw.e_pre.entries) {
        if (layer.measured_x_pattern(e) != 0) continue;
        PauliOp eu;
        layer.split(e, &eu, nullptr);
        w_pre[layer.conjugate_by_v(eu)] += v;
    }

    std::vector<double> overlaps;
    overlaps.reserve(1ULL << m);
    for (uint64_t k = 0; k < (1ULL << m); k++) {
        ProbTable<PauliOp> post = raw.e_post;
        for (const CondError& c : raw.conditioned) {
            if ((k & c.mask) == c.value) post = convolve(post, c.table);
        }
        std::map<PauliOp, double> w_post;
        for (const auto& [f, v] : post.entries) {
            if (layer.measured_x_pattern(f) != 0) continue;
            PauliOp fu;
            layer.split(f, &fu, nullptr);
            w_post[fu] += v;
        }
        double s = 0;
        for (const auto& [eu, ve] : w_pre) {
            for (const auto& [t, vt] : raw.t_mid.entries) {
                auto it = w_post.find(compose(eu, t));
                if (it != w_post.end()) s += ve * vt * it->second;
            }
        }
        (void)nm;
        overlaps.push_back(s);
    }
    return overlaps;
}

double rc_fidelity_from_raw(const RawInstrumentModel& raw) {
    std::vector<double> s = branch_overlaps(raw);
    double total = 0;
    for (double v : s) total += v;
    return total / static_cast<double>(s.size());
}

double instrument_fidelity_eq3(const RawInstrumentModel& raw) {
    std::vector<double> s = branch_overlaps(raw);
    double root_sum = 0;
    for (double v : s) {
        if (v < 0) v = 0;  // floating error guard
        root_sum += std::sqrt(v);
    }
    return root_sum * root_sum / static_cast<double>(s.size() * s.size());
}

std::pair<USI, std::vector<GateApp>> decompose_general_v(const USI& usi) {
    USI prime = usi;
    std::vector<GateApp> v = usi.layer.v_gates;
    prime.layer.v_gates.clear();
    return {prime, v};
}

}  // namespace mcmlab
