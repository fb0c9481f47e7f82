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

#include <string>
#include <vector>

#include "mcmlab/pauli.hpp"

namespace mcmlab {

enum class Gate : uint8_t { I, X, Y, Z, H, S, SDG, CX, CZ, SWAP };

bool is_two_qubit(Gate g);
bool is_pauli_gate(Gate g);
std::string gate_name(Gate g);
Gate gate_from_name(const std::string& name);

/// One gate applied to explicit qubits (q1 ignored for single-qubit gates).
struct GateApp {
    Gate gate = Gate::I;
    uint32_t q0 = 0;
    uint32_t q1 = 0;

    GateApp() = default;
    GateApp(Gate g, uint32_t a) : gate(g), q0(a), q1(a) {}
    GateApp(Gate g, uint32_t a, uint32_t b) : gate(g), q0(a), q1(b) {}

    bool operator==(const GateApp& o) const = default;
};

/// Conjugates p in place by the gate: p -> U p U^dag, flipping `sign` when
/// the image picks up a -1.
void conjugate_pauli_in_place(PauliOp& p, bool& sign, Gate g, uint32_t q0, uint32_t q1);

/// Conjugates through a whole gate list, applied left to right.
PauliOp conjugate_pauli(const PauliOp& p, const std::vector<GateApp>& gates,
                        bool* sign_out = nullptr);

}  // namespace mcmlab
