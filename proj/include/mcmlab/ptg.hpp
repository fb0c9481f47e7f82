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

#include "mcmlab/mcmcb.hpp"
#include "mcmlab/noise_model.hpp"

namespace mcmlab {

/// One parameter of a layer set, drawn as a directed edge between Pauli
/// support patterns. Gate layers contribute one edge per n-qubit Pauli
/// (their channel eigenvalue); MCM layers one edge per (P, Z(c1), Z(c2)).
struct PtgEdge {
    uint32_t layer_index = 0;
    bool is_mcm = false;
    uint64_t tail = 0;
    uint64_t head = 0;
    PauliOp pre;   // full n-qubit operator entering the layer
    PauliOp post;  // full n-qubit operator leaving the layer
    uint64_t t_mask = 0;  // MCM outcome-processing mask (m bits of the layer)
    PauliOp p_local;      // MCM edges: input P on the unmeasured qubits
    uint64_t c1 = 0;
    uint64_t c2 = 0;
    std::string label;
};

/// Pattern transfer graph of a layer set.
struct PTG {
    uint32_t n = 0;
    std::vector<MCMLayerSpec> layers;
    std::vector<PtgEdge> edges;
    std::vector<uint64_t> vertices;  // sorted distinct support strings

    size_t vertex_index(uint64_t support) const;
    uint32_t num_components() const;
    /// Cycle space dimension E - V + C.
    size_t cycle_dim() const;
};

PTG build_ptg(const std::vector<MCMLayerSpec>& layers);

/// Product of parameters: edge index -> integer exponent (negative values
/// denote ratios).
using ParameterMonomial = std::map<size_t, int>;

/// True iff the monomial's integer edge flow is conserved at every vertex,
/// i.e. it is a Z-linear combination of closed walks.
bool is_learnable(const PTG& graph, const ParameterMonomial& monomial);

/// Fundamental-cycle basis from a spanning forest; size cycle_dim().
std::vector<ParameterMonomial> learnable_basis(const PTG& graph);

/// Graphviz rendition for visual inspection.
std::string ptg_to_dot(const PTG& graph);

/// Circuits for learning the product of parameters along a closed walk:
/// prep, d germ repetitions (each layer followed by its single-qubit
/// connector), and a final Z-basis rotation.
struct LscbCircuit {
    CircuitIR noisy;
    CircuitIR ideal;
    uint32_t germ_reps = 0;
    ShotRecord ideal_record;
};

struct LscbSet {
    std::vector<size_t> cycle;
    uint64_t t_f = 0;                   // final analysis mask (full n bits)
    std::vector<uint64_t> mcm_masks;    // per MCM record, in record order
    std::vector<uint32_t> germ_reps;
    uint32_t per_depth = 0;
    std::vector<LscbCircuit> circuits;  // depth-major

    const LscbCircuit& at(size_t depth_index, size_t j) const {
        return circuits[depth_index * per_depth + j];
    }
};

/// Models: one RawInstrumentModel per layer of the graph (gate layers use
/// m = 0 with the post-gate channel in e_post). Pass nullptr for noiseless.
LscbSet build_lscb_circuits(const PTG& graph, const std::vector<size_t>& cycle,
                            const std::vector<RawInstrumentModel>* models,
                            const std::vector<uint32_t>& germ_reps, uint32_t circuits_per_depth,
                            uint64_t seed, uint64_t uid_base);

/// Analytic per-layer-step decay: the k-th root of the product of traversed
/// parameters, one lambda-tilde table per layer.
DecayPrediction predict_lscb_decay(const PTG& graph, const std::vector<size_t>& cycle,
                                   const std::vector<LambdaTildeTable>& tables,
                                   double delta = 0.05);

struct LscbOptions {
    std::vector<uint32_t> germ_reps{1, 2, 4, 8, 16};
    uint32_t circuits_per_depth = 30;
    uint32_t shots = 1000;
    double delta = 0.05;
};

struct LscbResult {
    std::vector<size_t> cycle;
    DecayEstimate est;  // per-layer-step decay
    std::vector<double> depth_means;
    std::vector<double> depth_sems;
    std::vector<std::vector<double>> circuit_means;
    uint64_t seed = 0;
};

LscbResult run_lscb(const PTG& graph, const std::vector<size_t>& cycle,
                    const std::vector<RawInstrumentModel>& models, const LscbOptions& options,
                    uint64_t seed);

}  // namespace mcmlab
