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

#include "mcmlab/circuit.hpp"
#include "mcmlab/noise_model.hpp"

namespace mcmlab {

/// One randomly compiled instance of an MCM layer: a uniformly random Pauli
/// layer T0 before, T0^{-1} composed with a uniformly random Z layer after,
/// and the classical outcome-flip mask induced by T0's X/Y gates on the
/// measured qubits.
struct CompiledLayer {
    PauliOp twirl;        // T0 as an n-qubit Pauli
    uint64_t z_draw = 0;  // random Z layer bits, one per qubit
    MCMLayerSpec layer;
    uint64_t flip_mask = 0;  // m bits, aligned with layer.measured

    std::vector<GateApp> pre_gates() const;
    std::vector<GateApp> post_gates() const;
};

CompiledLayer compile_rc_layer(const MCMLayerSpec& layer, Philox& rng);

/// Fuses consecutive gate layers that contain only single-qubit Pauli/Z
/// gates into one layer. Unitary-equivalent up to global phase.
CircuitIR merge_adjacent_pauli_layers(const CircuitIR& circuit);

}  // namespace mcmlab
