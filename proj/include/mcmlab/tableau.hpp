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

#include "mcmlab/circuit.hpp"
#include "mcmlab/gates.hpp"
#include "mcmlab/pauli.hpp"
#include "mcmlab/rng.hpp"

namespace mcmlab {

/// Aaronson-Gottesman stabilizer tableau for n <= 64 qubits.
///
/// Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers, plus one scratch
/// row for deterministic-outcome measurement. Each row packs its X and Z
/// parts into one machine word per part.
class TableauSim {
  public:
    explicit TableauSim(uint32_t n);

    uint32_t n() const { return n_; }

    /// Back to |0...0>.
    void reset();
    /// reset() followed by the basis-change gates for each qubit's state.
    void prep_product(const std::vector<PrepBasis>& basis);

    void apply_gate(Gate g, uint32_t q0, uint32_t q1 = 0);
    void apply_gates(const std::vector<GateApp>& gates);
    /// Applies a Pauli as a unitary: only stabilizer signs change.
    void apply_pauli(const PauliOp& p);

    /// Z-basis measurement of one qubit. Deterministic outcomes don't touch
    /// the rng; random ones consume one draw and collapse the state.
    int measure_z(uint32_t q, Philox& rng, bool* was_random = nullptr);

    /// Returns +1/-1 when +p/-p stabilizes the current state, 0 when p is
    /// not in the stabilizer group up to sign. Test/diagnostic helper.
    int stabilizer_sign(const PauliOp& p) const;

    /// Row accessors for tests: row r as (x bits, z bits, sign).
    uint64_t row_x(size_t r) const { return xs_[r]; }
    uint64_t row_z(size_t r) const { return zs_[r]; }
    int row_sign(size_t r) const { return rs_[r]; }

  private:
    void rowsum(size_t h, size_t i);

    uint32_t n_;
    std::vector<uint64_t> xs_;  // 2n+1 rows
    std::vector<uint64_t> zs_;
    std::vector<uint8_t> rs_;
};

}  // namespace mcmlab
