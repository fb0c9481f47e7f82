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

#include <map>

#include "mcmlab/noise_model.hpp"
#include "mcmlab/rc.hpp"
#include "mcmlab/sim.hpp"
#include "mcmlab/stats.hpp"

namespace mcmlab {

/// Product-state preparation for a subexperiment: a random tensor eigenstate
/// of P (x) Z(1...1), with the eigenvalue sign of the prepared state.
struct PrepLayer {
    std::vector<PrepBasis> basis;
    int sign = 1;
};
PrepLayer build_prep_layer(const PauliOp& p_local, const MCMLayerSpec& layer, Philox& rng);

/// Final basis-change layer: per unmeasured qubit, H for X, S† then H
/// for Y, nothing for I or Z. t_f marks the support of P at full-circuit
/// bit positions.
struct FinalLayer {
    std::vector<GateApp> gates;
    uint64_t t_f = 0;
};
FinalLayer build_final_layer(const PauliOp& p_local, const MCMLayerSpec& layer);

/// One generated circuit plus its noiseless twin's record. The twin pins
/// t0: both circuits share prep and RC draws, and the signed observable of
/// the ideal run is deterministic, so every analysis mask can read its
/// reference parity from one record.
struct SubCircuit {
    CircuitIR noisy;
    CircuitIR ideal;
    uint32_t depth = 0;
    ShotRecord ideal_record;
};

/// The circuit set of one input Pauli P; it serves every (Z(c1), Z(c2))
/// analysis of that P.
struct CircuitSet {
    PauliOp p_local;
    uint64_t t_f = 0;
    std::vector<uint32_t> depths;
    uint32_t per_depth = 0;
    std::vector<SubCircuit> circuits;  // depth-major

    const SubCircuit& at(size_t depth_index, size_t j) const {
        return circuits[depth_index * per_depth + j];
    }
};

/// Builds N circuits per depth with fresh randomized-compiling draws per
/// layer instance. Pass model = nullptr for noiseless circuits.
CircuitSet build_subexperiment_circuits(const PauliOp& p_local, const MCMLayerSpec& layer,
                                        const RawInstrumentModel* model,
                                        const std::vector<uint32_t>& depths,
                                        uint32_t circuits_per_depth, uint64_t seed,
                                        uint64_t uid_base);

/// n-bit final analysis mask: t_f on the unmeasured qubits, c1 on the
/// measured qubits.
uint64_t full_final_mask(const MCMLayerSpec& layer, uint64_t t_f, uint64_t c1);

/// f(C) = (-1)^{final_mask.b_f + t0} prod_i (-1)^{b_i.t_mcm}, returns +/-1.
int analyze_shot(const ShotRecord& shot, uint64_t final_mask, uint64_t t_mcm, int t0);

/// The t0 that makes the (noiseless) reference record analyze to +1.
int t0_for(const ShotRecord& ideal_record, uint64_t final_mask, uint64_t t_mcm);

struct DecayPrediction {
    double r = 1.0;
    bool reliable = true;
};

/// Analytic decay constant of the (P, Z(c1), Z(c2)) subexperiment: the
/// l-th root of the product of lambda-tilde factors traversed by the
/// tracked operator chain, whose mask pair alternates (c1, c2), (c2, c1)
/// while P walks through V^j[P]. Factors at or below delta flag the
/// prediction unreliable.
DecayPrediction predict_r(const MCMLayerSpec& layer, const LambdaTildeTable& table,
                          const PauliOp& p_local, uint64_t c1, uint64_t c2, double delta = 0.05);

/// Infinite-shot exhaustive average 4^{-n} sum_{P,c1,c2} r.
double f_mcmcb_analytic(const MCMLayerSpec& layer, const LambdaTildeTable& table);

enum class SamplingMode { UniformK, Exhaustive };

/// Optional per-shot tap, called from worker threads; a given group index
/// is only ever touched by one worker.
using ShotSink = std::function<void(size_t group_index, const PauliOp& p, uint32_t depth,
                                    uint32_t circuit_index, const ShotRecord& shot)>;

struct McmcbOptions {
    SamplingMode mode = SamplingMode::UniformK;
    uint32_t K = 100;
    std::vector<uint32_t> depths{2, 4, 8, 16, 32};
    uint32_t circuits_per_depth = 30;
    uint32_t shots = 1000;
    double delta = 0.05;
    uint32_t bootstrap_resamples = 200;
    uint32_t jobs = 1;
    ShotSink shot_sink;
};

/// Number of distinct-P circuit sets the run will generate; lets a shot
/// sink preallocate per-group buffers.
size_t count_mcmcb_groups(const MCMLayerSpec& layer, const McmcbOptions& options, uint64_t seed);

struct TripletResult {
    PauliOp p;
    uint64_t c1 = 0;
    uint64_t c2 = 0;
    uint32_t multiplicity = 1;
    DecayEstimate est;
    std::vector<double> depth_means;
    std::vector<double> depth_sems;
    std::vector<std::vector<double>> circuit_means;  // [depth][circuit]
};

struct MCMCBResult {
    MCMLayerSpec layer;
    SamplingMode mode = SamplingMode::UniformK;
    uint32_t K = 0;
    uint64_t seed = 0;
    std::vector<uint32_t> depths;
    uint32_t circuits_per_depth = 0;
    uint32_t shots = 0;
    double delta = 0.05;
    std::vector<TripletResult> triplets;
    double F_hat = 0;
    double sigma = 0;
    double ci_lo = 0;
    double ci_hi = 0;
    uint32_t num_unreliable = 0;
};

/// The full protocol: triplet sampling, circuit generation, simulation,
/// per-triplet decay fits, F_hat, and a bootstrap interval.
MCMCBResult run_mcmcb(const RawInstrumentModel& model, const McmcbOptions& options,
                      uint64_t seed);

struct BootstrapSummary {
    double sigma = 0;
    double lo = 0;
    double hi = 0;
};

/// Two-level nonparametric bootstrap: circuits within each subexperiment,
/// and (in uniform-K mode) the K sampled triplets.
BootstrapSummary bootstrap_ci(const MCMCBResult& result, uint32_t resamples, uint64_t seed);

/// Per-P estimates of lambda_{0,0}, lambda_{1,1}, and
/// lambda_{0,1} + lambda_{1,0} for an m = 1 layer, from the fitted decays.
struct EigenvalueEstimates {
    std::map<PauliOp, double> lam00;
    std::map<PauliOp, double> lam11;
    std::map<PauliOp, double> lam01_plus_10;
};
EigenvalueEstimates extract_eigenvalues_m1(const MCMCBResult& result);

/// Pauli error rates per flip class, from the inverse transform of each
/// eigenvalue set.
struct PauliErrorRates {
    std::map<PauliOp, double> no_flip;    // (a, b) = (0, 0)
    std::map<PauliOp, double> both_flip;  // (1, 1)
    std::map<PauliOp, double> one_flip;   // (0, 1) + (1, 0) combined
};
PauliErrorRates extract_pauli_error_rates(const EigenvalueEstimates& eigenvalues);

/// 1 - mean decay over the triplets supported inside `subsystem` (identity
/// elsewhere). Requires a covering triplet set.
double marginal_subsystem_infidelity(const MCMCBResult& result,
                                     const std::vector<uint32_t>& subsystem);

}  // namespace mcmlab
