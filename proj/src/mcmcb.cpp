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

#include "mcmlab/mcmcb.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace mcmlab {

PrepLayer build_prep_layer(const PauliOp& p_local, const MCMLayerSpec& layer, Philox& rng) {
    if (p_local.n != layer.num_unmeasured()) {
        throw std::invalid_argument("build_prep_layer: P has wrong qubit count");
    }
    PrepLayer out;
    out.basis.assign(layer.n, PrepBasis::ZPlus);
    out.sign = 1;
    std::vector<uint32_t> unmeas = layer.unmeasured();
    for (uint32_t i = 0; i < unmeas.size(); i++) {
        bool minus = rng.below(2) == 1;
        switch (p_local.letter(i)) {
            case 'I':
                out.basis[unmeas[i]] = minus ? PrepBasis::ZMinus : PrepBasis::ZPlus;
                break;
            case 'X':
                out.basis[unmeas[i]] = minus ? PrepBasis::XMinus : PrepBasis::XPlus;
                if (minus) out.sign = -out.sign;
                break;
            case 'Y':
                out.basis[unmeas[i]] = minus ? PrepBasis::YMinus : PrepBasis::YPlus;
                if (minus) out.sign = -out.sign;
                break;
            case 'Z':
                out.basis[unmeas[i]] = minus ? PrepBasis::ZMinus : PrepBasis::ZPlus;
                if (minus) out.sign = -out.sign;
                break;
        }
    }
    for (uint32_t q : layer.measured) {
        bool minus = rng.below(2) == 1;
        out.basis[q] = minus ? PrepBasis::ZMinus : PrepBasis::ZPlus;
        if (minus) out.sign = -out.sign;
    }
    return out;
}

FinalLayer build_final_layer(const PauliOp& p_local, const MCMLayerSpec& layer) {
    if (p_local.n != layer.num_unmeasured()) {
        throw std::invalid_argument("build_final_layer: P has wrong qubit count");
    }
    FinalLayer out;
    std::vector<uint32_t> unmeas = layer.unmeasured();
    for (uint32_t i = 0; i < unmeas.size(); i++) {
        switch (p_local.letter(i)) {
            case 'I':
            case 'Z':
                break;
            case 'X':
                out.gates.emplace_back(Gate::H, unmeas[i]);
                break;
            case 'Y':
                // The operator H S^dag, applied as S^dag then H.
                out.gates.emplace_back(Gate::SDG, unmeas[i]);
                out.gates.emplace_back(Gate::H, unmeas[i]);
                break;
        }
        if (p_local.letter(i) != 'I') out.t_f |= 1ULL << unmeas[i];
    }
    return out;
}

uint64_t full_final_mask(const MCMLayerSpec& layer, uint64_t t_f, uint64_t c1) {
    uint64_t mask = t_f;
    for (uint32_t i = 0; i < layer.measured.size(); i++) {
        mask |= ((c1 >> i) & 1) << layer.measured[i];
    }
    return mask;
}

int analyze_shot(const ShotRecord& shot, uint64_t final_mask, uint64_t t_mcm, int t0) {
    int s = t0 ^ dot2(shot.final_bits, final_mask);
    if (t_mcm) {
        for (uint64_t w : shot.mcm_bits) s ^= dot2(w, t_mcm);
    }
    return s ? -1 : 1;
}

int t0_for(const ShotRecord& ideal_record, uint64_t final_mask, uint64_t t_mcm) {
    return analyze_shot(ideal_record, final_mask, t_mcm, 0) < 0 ? 1 : 0;
}

CircuitSet build_subexperiment_circuits(const PauliOp& p_local, const MCMLayerSpec& layer,
                                        const RawInstrumentModel* model,
                                        const std::vector<uint32_t>& depths,
                                        uint32_t circuits_per_depth, uint64_t seed,
                                        uint64_t uid_base) {
    layer.validate();
    if (model && !(model->layer.n == layer.n && model->layer.measured == layer.measured)) {
        throw std::invalid_argument("model layer does not match requested layer");
    }
    FinalLayer fin = build_final_layer(p_local, layer);

    CircuitSet set;
    set.p_local = p_local;
    set.t_f = fin.t_f;
    set.depths = depths;
    set.per_depth = circuits_per_depth;

    // Shared noise tables: e_pre, t_mid embedded on the unmeasured qubits,
    // e_post, then one table per conditioned error.
    std::vector<SampledTable> tables;
    if (model) {
        tables.push_back(SampledTable::build(model->e_pre, layer.n));
        ProbTable<PauliOp> mid_embedded;
        for (const auto& [q, v] : model->t_mid.entries) {
            mid_embedded.entries[layer.embed(q, 0)] = v;
        }
        tables.push_back(SampledTable::build(mid_embedded, layer.n));
        tables.push_back(SampledTable::build(model->e_post, layer.n));
        for (const CondError& c : model->conditioned) {
            tables.push_back(SampledTable::build(c.table, layer.n));
        }
    }

    for (uint32_t di = 0; di < depths.size(); di++) {
        for (uint32_t j = 0; j < circuits_per_depth; j++) {
            uint64_t uid = uid_base + di * circuits_per_depth + j;
            Philox gen(seed, uid, kBuildPosition);

            SubCircuit sub;
            sub.depth = depths[di];
            CircuitIR& ideal = sub.ideal;
            CircuitIR& noisy = sub.noisy;
            ideal.n = noisy.n = layer.n;
            ideal.uid = noisy.uid = uid;
            noisy.tables = tables;

            PrepLayer prep = build_prep_layer(p_local, layer, gen);
            ideal.ops.push_back(PrepInst{prep.basis});
            noisy.ops.push_back(PrepInst{prep.basis});
            if (model && !model->spam.prep.empty()) {
                noisy.ops.push_back(XFlipInst{model->spam.prep});
            }

            for (uint32_t i = 0; i < depths[di]; i++) {
                CompiledLayer rc = compile_rc_layer(layer, gen);
                GateLayerInst pre{rc.pre_gates()};
                GateLayerInst post{rc.post_gates()};
                GateLayerInst vlayer{layer.v_gates};
                McmInst mcm;
                mcm.qubits = layer.measured;
                mcm.record = i;
                mcm.flip_mask = rc.flip_mask;

                for (CircuitIR* c : {&ideal, &noisy}) {
                    bool with_noise = c == &noisy && model;
                    if (!pre.gates.empty()) c->ops.push_back(pre);
                    if (with_noise) c->ops.push_back(PauliNoiseInst{0});
                    if (!vlayer.gates.empty()) c->ops.push_back(vlayer);
                    if (!layer.measured.empty()) c->ops.push_back(mcm);
                    if (with_noise) {
                        c->ops.push_back(PauliNoiseInst{1});
                        c->ops.push_back(PauliNoiseInst{2});
                        for (uint32_t ci = 0; ci < model->conditioned.size(); ci++) {
                            c->ops.push_back(CondPauliInst{mcm.record,
                                                           model->conditioned[ci].mask,
                                                           model->conditioned[ci].value,
                                                           3 + ci});
                        }
                    }
                    if (!post.gates.empty()) c->ops.push_back(post);
                }
            }

            if (!fin.gates.empty()) {
                ideal.ops.push_back(GateLayerInst{fin.gates});
                noisy.ops.push_back(GateLayerInst{fin.gates});
            }
            FinalMeasureInst fm;
            fm.record = depths[di];
            ideal.ops.push_back(fm);
            if (model && !model->spam.meas.empty()) fm.readout_flip = model->spam.meas;
            noisy.ops.push_back(fm);

            sub.ideal = merge_adjacent_pauli_layers(sub.ideal);
            sub.noisy = merge_adjacent_pauli_layers(sub.noisy);

            TableauSim tableau(layer.n);
            Philox ideal_rng(seed, uid, kIdealPosition);
            sub.ideal_record = run_one_shot(sub.ideal, tableau, ideal_rng);
            set.circuits.push_back(std::move(sub));
        }
    }
    return set;
}

DecayPrediction predict_r(const MCMLayerSpec& layer, const LambdaTildeTable& table,
                          const PauliOp& p_local, uint64_t c1, uint64_t c2, double delta) {
    uint32_t period = layer.v_even_order();
    DecayPrediction out;
    PauliOp pj = p_local;
    double product = 1.0;
    for (uint32_t j = 1; j <= period; j++) {
        pj = layer.conjugate_by_v(pj);
        uint64_t c_in = (j % 2 == 1) ? c1 : c2;
        uint64_t c_out = (j % 2 == 1) ? c2 : c1;
        double factor = table.at(pj, c_in, c_out);
        if (factor <= delta) out.reliable = false;
        product *= factor;
    }
    if (product <= 0) {
        out.r = 0;
        out.reliable = false;
        return out;
    }
    out.r = std::pow(product, 1.0 / period);
    return out;
}

double f_mcmcb_analytic(const MCMLayerSpec& layer, const LambdaTildeTable& table) {
    uint32_t nm = layer.num_unmeasured();
    uint32_t m = layer.m();
    double total = 0;
    for (uint64_t pi = 0; pi < (1ULL << (2 * nm)); pi++) {
        PauliOp p = pauli_from_index(pi, nm);
        for (uint64_t c1 = 0; c1 < (1ULL << m); c1++) {
            for (uint64_t c2 = 0; c2 < (1ULL << m); c2++) {
                total += predict_r(layer, table, p, c1, c2, -1.0).r;
            }
        }
    }
    return total / std::pow(4.0, layer.n);
}

namespace {

struct TripletRequest {
    uint64_t c1, c2;
    uint32_t multiplicity;
};

struct GroupRequest {
    PauliOp p;
    std::vector<TripletRequest> analyses;
};

std::vector<uint32_t> resolve_depths(const std::vector<uint32_t>& requested, uint32_t period) {
    if (requested.size() < 2) throw std::invalid_argument("need at least two depths");
    std::vector<uint32_t> out;
    for (uint32_t d : requested) {
        uint32_t scaled = period == 2 ? d : d / 2 * period;
        if (scaled == 0 || scaled % period != 0 || scaled % 2 != 0) {
            throw std::invalid_argument("depth " + std::to_string(d) +
                                        " is not a positive even multiple of the layer period");
        }
        out.push_back(scaled);
    }
    return out;
}

constexpr uint64_t kTripletStream = 0x7214c0de;
constexpr uint64_t kBootStream = 0xb0075ead;

std::map<uint64_t, std::map<std::pair<uint64_t, uint64_t>, uint32_t>> pick_triplets(
    const MCMLayerSpec& layer, const McmcbOptions& options, uint64_t seed) {
    uint32_t nm = layer.num_unmeasured();
    uint64_t num_p = 1ULL << (2 * nm);
    uint64_t num_z = 1ULL << layer.m();
    std::map<uint64_t, std::map<std::pair<uint64_t, uint64_t>, uint32_t>> chosen;
    if (options.mode == SamplingMode::UniformK) {
        if (options.K == 0) throw std::invalid_argument("K must be positive");
        Philox rng(seed, kTripletStream, 0);
        for (uint32_t k = 0; k < options.K; k++) {
            uint64_t pi = rng.below(num_p);
            uint64_t c1 = rng.below(num_z);
            uint64_t c2 = rng.below(num_z);
            chosen[pi][{c1, c2}]++;
        }
    } else {
        for (uint64_t pi = 0; pi < num_p; pi++) {
            for (uint64_t c1 = 0; c1 < num_z; c1++) {
                for (uint64_t c2 = 0; c2 < num_z; c2++) chosen[pi][{c1, c2}] = 1;
            }
        }
    }
    return chosen;
}

}  // namespace

size_t count_mcmcb_groups(const MCMLayerSpec& layer, const McmcbOptions& options, uint64_t seed) {
    return pick_triplets(layer, options, seed).size();
}

MCMCBResult run_mcmcb(const RawInstrumentModel& model, const McmcbOptions& options,
                      uint64_t seed) {
    model.validate();
    const MCMLayerSpec& layer = model.layer;
    uint32_t nm = layer.num_unmeasured();
    uint32_t m = layer.m();
    uint32_t period = layer.v_even_order();
    std::vector<uint32_t> depths = resolve_depths(options.depths, period);

    // Triplet selection, grouped by P: one circuit set serves every
    // (Z(c1), Z(c2)) analysis of that P.
    auto chosen = pick_triplets(layer, options, seed);
    (void)nm;
    (void)m;

    std::vector<GroupRequest> groups;
    for (const auto& [pi, analyses] : chosen) {
        GroupRequest g;
        g.p = pauli_from_index(pi, nm);
        for (const auto& [cc, mult] : analyses) {
            g.analyses.push_back({cc.first, cc.second, mult});
        }
        groups.push_back(std::move(g));
    }

    MCMCBResult result;
    result.layer = layer;
    result.mode = options.mode;
    result.K = options.mode == SamplingMode::UniformK ? options.K : 0;
    result.seed = seed;
    result.depths = depths;
    result.circuits_per_depth = options.circuits_per_depth;
    result.shots = options.shots;
    result.delta = options.delta;

    // Per-group simulation: independent tasks, merged in group order.
    std::vector<std::vector<TripletResult>> group_results(groups.size());
    uint64_t uids_per_group = static_cast<uint64_t>(depths.size()) * options.circuits_per_depth;
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t gi = next.fetch_add(1);
            if (gi >= groups.size()) break;
            const GroupRequest& group = groups[gi];
            CircuitSet set = build_subexperiment_circuits(group.p, layer, &model, depths,
                                                          options.circuits_per_depth, seed,
                                                          1 + gi * uids_per_group);
            size_t na = group.analyses.size();
            // masks and t0 per analysis
            std::vector<uint64_t> final_masks(na), t_mcms(na);
            for (size_t a = 0; a < na; a++) {
                final_masks[a] = full_final_mask(layer, set.t_f, group.analyses[a].c1);
                t_mcms[a] = group.analyses[a].c1 ^ group.analyses[a].c2;
            }
            std::vector<TripletResult> local(na);
            for (size_t a = 0; a < na; a++) {
                local[a].p = group.p;
                local[a].c1 = group.analyses[a].c1;
                local[a].c2 = group.analyses[a].c2;
                local[a].multiplicity = group.analyses[a].multiplicity;
                local[a].circuit_means.assign(depths.size(), {});
            }
            std::vector<int> t0s(na);
            std::vector<int64_t> sums(na);
            for (uint32_t di = 0; di < depths.size(); di++) {
                for (uint32_t j = 0; j < options.circuits_per_depth; j++) {
                    const SubCircuit& sub = set.at(di, j);
                    for (size_t a = 0; a < na; a++) {
                        t0s[a] = t0_for(sub.ideal_record, final_masks[a], t_mcms[a]);
                        sums[a] = 0;
                    }
                    run_shots_visit(sub.noisy, options.shots, seed, [&](const ShotRecord& shot) {
                        for (size_t a = 0; a < na; a++) {
                            sums[a] += analyze_shot(shot, final_masks[a], t_mcms[a], t0s[a]);
                        }
                        if (options.shot_sink) {
                            options.shot_sink(gi, group.p, depths[di], j, shot);
                        }
                    });
                    for (size_t a = 0; a < na; a++) {
                        local[a].circuit_means[di].push_back(
                            static_cast<double>(sums[a]) / options.shots);
                    }
                }
            }
            for (size_t a = 0; a < na; a++) {
                TripletResult& t = local[a];
                for (uint32_t di = 0; di < depths.size(); di++) {
                    t.depth_means.push_back(mean_of(t.circuit_means[di]));
                    t.depth_sems.push_back(sem_of(t.circuit_means[di]));
                }
                std::vector<double> dd(depths.begin(), depths.end());
                t.est = fit_decay(dd, t.depth_means, t.depth_sems, options.delta);
            }
            group_results[gi] = std::move(local);
        }
    };
    uint32_t jobs = std::max(1u, options.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (uint32_t j = 0; j < jobs; j++) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& local : group_results) {
        for (auto& t : local) result.triplets.push_back(std::move(t));
    }

    double weighted = 0;
    uint64_t weight = 0;
    for (const TripletResult& t : result.triplets) {
        if (!t.est.reliable) {
            result.num_unreliable += t.multiplicity;
            continue;
        }
        weighted += t.est.r_hat * t.multiplicity;
        weight += t.multiplicity;
    }
    if (weight == 0) throw std::runtime_error("no reliable decays; cannot estimate fidelity");
    result.F_hat = weighted / static_cast<double>(weight);

    BootstrapSummary bs = bootstrap_ci(result, options.bootstrap_resamples, seed);
    result.sigma = bs.sigma;
    result.ci_lo = bs.lo;
    result.ci_hi = bs.hi;
    return result;
}

BootstrapSummary bootstrap_ci(const MCMCBResult& result, uint32_t resamples, uint64_t seed) {
    if (result.triplets.empty()) throw std::invalid_argument("bootstrap: empty result");
    for (const TripletResult& t : result.triplets) {
        if (t.circuit_means.empty()) {
            throw std::invalid_argument("bootstrap: per-circuit data not retained");
        }
    }
    Philox rng(seed, kBootStream, 0);
    std::vector<double> dd(result.depths.begin(), result.depths.end());

    // Expanded draw list for uniform-K resampling.
    std::vector<size_t> draws;
    if (result.mode == SamplingMode::UniformK) {
        for (size_t t = 0; t < result.triplets.size(); t++) {
            for (uint32_t i = 0; i < result.triplets[t].multiplicity; i++) draws.push_back(t);
        }
    }

    std::vector<double> f_stars;
    std::vector<double> r_star(result.triplets.size());
    std::vector<char> r_ok(result.triplets.size());
    std::vector<double> means(dd.size()), sems(dd.size()), resampled;
    for (uint32_t rep = 0; rep < resamples; rep++) {
        for (size_t t = 0; t < result.triplets.size(); t++) {
            const TripletResult& trip = result.triplets[t];
            for (size_t di = 0; di < dd.size(); di++) {
                const std::vector<double>& pool = trip.circuit_means[di];
                resampled.clear();
                for (size_t j = 0; j < pool.size(); j++) {
                    resampled.push_back(pool[rng.below(pool.size())]);
                }
                means[di] = mean_of(resampled);
                sems[di] = sem_of(resampled);
            }
            DecayEstimate est = fit_decay(dd, means, sems, result.delta);
            r_star[t] = est.r_hat;
            r_ok[t] = est.reliable ? 1 : 0;
        }
        double acc = 0;
        uint64_t cnt = 0;
        if (result.mode == SamplingMode::UniformK) {
            for (size_t k = 0; k < draws.size(); k++) {
                size_t t = draws[rng.below(draws.size())];
                if (!r_ok[t]) continue;
                acc += r_star[t];
                cnt++;
            }
        } else {
            for (size_t t = 0; t < result.triplets.size(); t++) {
                if (!r_ok[t]) continue;
                acc += r_star[t];
                cnt++;
            }
        }
        if (cnt == 0) continue;
        f_stars.push_back(acc / static_cast<double>(cnt));
    }
    BootstrapSummary out;
    if (f_stars.size() < 2) throw std::runtime_error("bootstrap: insufficient resamples survived");
    out.sigma = sample_std(f_stars);
    out.lo = percentile(f_stars, 0.025);
    out.hi = percentile(f_stars, 0.975);
    return out;
}

EigenvalueEstimates extract_eigenvalues_m1(const MCMCBResult& result) {
    if (result.layer.m() != 1) {
        throw std::invalid_argument("eigenvalue extraction requires m = 1");
    }
    std::map<std::tuple<uint64_t, uint64_t, uint64_t>, double> r_by_key;
    for (const TripletResult& t : result.triplets) {
        r_by_key[{pauli_index(t.p), t.c1, t.c2}] = t.est.r_hat;
    }
    uint32_t nm = result.layer.num_unmeasured();
    EigenvalueEstimates out;
    for (uint64_t pi = 0; pi < (1ULL << (2 * nm)); pi++) {
        PauliOp p = pauli_from_index(pi, nm);
        auto diag0 = r_by_key.find({pi, 0, 0});
        auto diag1 = r_by_key.find({pi, 1, 1});
        auto off01 = r_by_key.find({pi, 0, 1});
        auto off10 = r_by_key.find({pi, 1, 0});
        if (diag0 == r_by_key.end() || diag1 == r_by_key.end() ||
            (off01 == r_by_key.end() && off10 == r_by_key.end())) {
            throw std::invalid_argument("missing decays for P = " + (nm ? p.str() : "(empty)"));
        }
        double off;
        if (off01 != r_by_key.end() && off10 != r_by_key.end()) {
            off = 0.5 * (off01->second + off10->second);
        } else {
            off = off01 != r_by_key.end() ? off01->second : off10->second;
        }
        double rii = diag0->second;
        double rzz = diag1->second;
        out.lam00[p] = 0.25 * (rii + rzz + 2 * off);
        out.lam01_plus_10[p] = 0.5 * (rii - rzz);
        out.lam11[p] = 0.25 * (rii + rzz - 2 * off);
    }
    return out;
}

PauliErrorRates extract_pauli_error_rates(const EigenvalueEstimates& eigenvalues) {
    if (eigenvalues.lam00.empty()) throw std::invalid_argument("empty eigenvalue set");
    uint32_t k = eigenvalues.lam00.begin()->first.n;
    PauliErrorRates out;
    out.no_flip = wht_eigenvalues_to_probs(eigenvalues.lam00, k).entries;
    out.both_flip = wht_eigenvalues_to_probs(eigenvalues.lam11, k).entries;
    out.one_flip = wht_eigenvalues_to_probs(eigenvalues.lam01_plus_10, k).entries;
    return out;
}

double marginal_subsystem_infidelity(const MCMCBResult& result,
                                     const std::vector<uint32_t>& subsystem) {
    std::vector<bool> in_set(result.layer.n, false);
    for (uint32_t q : subsystem) {
        if (q >= result.layer.n) throw std::invalid_argument("subsystem qubit out of range");
        in_set[q] = true;
    }
    std::vector<uint32_t> unmeas = result.layer.unmeasured();
    uint64_t allowed_local = 0;
    for (uint32_t i = 0; i < unmeas.size(); i++) {
        if (in_set[unmeas[i]]) allowed_local |= 1ULL << i;
    }
    uint64_t allowed_meas = 0;
    for (uint32_t i = 0; i < result.layer.measured.size(); i++) {
        if (in_set[result.layer.measured[i]]) allowed_meas |= 1ULL << i;
    }
    std::vector<double> rs;
    for (const TripletResult& t : result.triplets) {
        if (!t.est.reliable) continue;
        if (t.p.support() & ~allowed_local) continue;
        if ((t.c1 | t.c2) & ~allowed_meas) continue;
        rs.push_back(t.est.r_hat);
    }
    if (rs.empty()) throw std::runtime_error("no triplets cover the requested subsystem");
    return 1.0 - mean_of(rs);
}

}  // namespace mcmlab
