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

#include <variant>
#include <vector>

#include "mcmlab/gates.hpp"
#include "mcmlab/pauli.hpp"
#include "mcmlab/rng.hpp"

namespace mcmlab {

/// Product-state preparation basis per qubit.
enum class PrepBasis : uint8_t { ZPlus, ZMinus, XPlus, XMinus, YPlus, YMinus };

std::string prep_basis_name(PrepBasis b);
PrepBasis prep_basis_from_name(const std::string& name);

/// A Pauli distribution preprocessed for O(log) per-shot sampling.
struct SampledTable {
    ProbTable<PauliOp> source;
    std::vector<double> cdf;
    std::vector<PauliOp> paulis;

    static SampledTable build(const ProbTable<PauliOp>& table, uint32_t n,
                              double tol = kProbTol);
    const PauliOp& sample(Philox& rng) const;
};

struct PrepInst {
    std::vector<PrepBasis> basis;  // size n
};

struct GateLayerInst {
    std::vector<GateApp> gates;
    bool pauli_only() const;
};

/// Samples one Pauli from the referenced table and applies it.
struct PauliNoiseInst {
    uint32_t table = 0;
};

/// Independent X flip on each qubit (state preparation error).
struct XFlipInst {
    std::vector<double> probs;  // size n
};

/// Mid-circuit Z measurement of the listed qubits. Bit i of the recorded
/// word is qubit `qubits[i]`'s outcome, XORed with bit i of `flip_mask`
/// (randomized compiling's classical correction).
struct McmInst {
    std::vector<uint32_t> qubits;
    uint32_t record = 0;
    uint64_t flip_mask = 0;
};

/// Applies a sampled Pauli iff (record & mask) == value for an earlier MCM.
/// The predicate sees the raw physical outcome, before any flip mask.
struct CondPauliInst {
    uint32_t record = 0;
    uint64_t mask = 0;
    uint64_t value = 0;
    uint32_t table = 0;
};

/// Z measurement of every qubit; `readout_flip[q]` flips the recorded bit
/// classically with that probability.
struct FinalMeasureInst {
    uint32_t record = 0;
    std::vector<double> readout_flip;
};

using Instruction = std::variant<PrepInst, GateLayerInst, PauliNoiseInst, XFlipInst, McmInst,
                                 CondPauliInst, FinalMeasureInst>;

/// Layered executable circuit: Clifford gate layers, MCMs, sampled noise
/// sites, and classical postprocessing annotations.
struct CircuitIR {
    uint32_t n = 0;
    uint64_t uid = 0;  // rng stream id for this circuit's shots
    std::vector<Instruction> ops;
    std::vector<SampledTable> tables;

    uint32_t num_mcms() const;
    /// Throws on malformed structure (bad record tags, dangling references,
    /// out-of-range qubits, missing tables).
    void validate() const;
};

struct ShotRecord {
    std::vector<uint64_t> mcm_bits;  // one word per MCM instruction, in order
    uint64_t final_bits = 0;
    uint32_t shot_index = 0;
};

}  // namespace mcmlab
