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

#include <optional>
#include <vector>

#include "mcmlab/gates.hpp"
#include "mcmlab/pauli.hpp"
#include "mcmlab/rng.hpp"

namespace mcmlab {

/// An n-qubit instruction layer: Z-basis measurement of `measured` and
/// Clifford gates on the remaining qubits. m = 0 describes a pure gate
/// layer.
struct MCMLayerSpec {
    uint32_t n = 0;
    std::vector<uint32_t> measured;
    std::vector<GateApp> v_gates;

    uint32_t m() const { return static_cast<uint32_t>(measured.size()); }
    uint32_t num_unmeasured() const { return n - m(); }
    /// Unmeasured qubit indices in ascending order; bit i of a local
    /// (n-m)-qubit Pauli refers to unmeasured()[i].
    std::vector<uint32_t> unmeasured() const;

    void validate() const;

    /// Builds the n-qubit Pauli with `local` on the unmeasured qubits and
    /// Z(c) on the measured qubits.
    PauliOp embed(const PauliOp& local, uint64_t c) const;
    /// Splits an n-qubit Pauli into its unmeasured-local and measured-local
    /// parts.
    void split(const PauliOp& full, PauliOp* unmeasured_part, PauliOp* measured_part) const;
    /// X part of `full` restricted to the measured qubits, packed into an
    /// m-bit word.
    uint64_t measured_x_pattern(const PauliOp& full) const;

    /// v_gates reindexed to local unmeasured coordinates.
    std::vector<GateApp> v_gates_local() const;
    /// Unsigned V[p] for a local (n-m)-qubit Pauli.
    PauliOp conjugate_by_v(const PauliOp& local) const;
    /// Smallest positive even l with V^l equal to the identity map on
    /// Paulis, signs included.
    uint32_t v_even_order(uint32_t cap = 4096) const;
};

/// Key of a USI's q-table: flip patterns (a, b) plus the unmeasured-qubit
/// Pauli error Q.
struct UsiKey {
    uint64_t a = 0;
    uint64_t b = 0;
    PauliOp q;

    UsiKey() = default;
    UsiKey(uint64_t a_bits, uint64_t b_bits, PauliOp q_op) : a(a_bits), b(b_bits), q(q_op) {}

    bool operator==(const UsiKey& o) const { return a == o.a && b == o.b && q == o.q; }
    bool operator<(const UsiKey& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        return q < o.q;
    }
};

/// Uniform stochastic instrument: sparse distribution q over (a, b, Q) with
/// the ideal Clifford V factored out of the q-table.
struct USI {
    MCMLayerSpec layer;
    ProbTable<UsiKey> q;

    uint32_t n() const { return layer.n; }
    uint32_t m() const { return layer.m(); }
    void validate(double tol = kProbTol) const;
};

/// Outcome-conditioned post error: the table fires when
/// (recorded outcome & mask) == value.
struct CondError {
    uint64_t mask = 0;
    uint64_t value = 0;
    ProbTable<PauliOp> table;  // n-qubit
};

/// Per-qubit preparation and final-readout bit-flip probabilities.
struct SpamSpec {
    std::vector<double> prep;
    std::vector<double> meas;

    bool empty() const { return prep.empty() && meas.empty(); }
};

/// Raw error model of one noisy MCM layer:
///   M = e_post . (t_mid (x) I) . L . e_pre
/// plus optional outcome-conditioned post errors and SPAM flips.
struct RawInstrumentModel {
    MCMLayerSpec layer;
    ProbTable<PauliOp> e_pre;   // n-qubit
    ProbTable<PauliOp> t_mid;   // (n-m)-qubit
    ProbTable<PauliOp> e_post;  // n-qubit
    std::vector<CondError> conditioned;
    SpamSpec spam;

    void validate(double tol = kProbTol) const;
    bool has_conditioned() const { return !conditioned.empty(); }
};

/// Dense table of lambda-tilde values, indexed by the local Pauli P and the
/// mask pair (c, c').
struct LambdaTildeTable {
    uint32_t num_unmeasured = 0;
    uint32_t m = 0;
    std::vector<double> values;  // pauli_index(P) * 4^m + (c | c' << m)

    double at(const PauliOp& p_local, uint64_t c, uint64_t c_prime) const {
        return values[pauli_index(p_local) * (1ULL << (2 * m)) + (c | (c_prime << m))];
    }
};

/// lambda_{a,b,P} = sum_Q q_{a,b,Q} (-1)^<P,Q>.
double lambda_eigenvalue(const USI& usi, uint64_t a, uint64_t b, const PauliOp& p_local);

/// Binary Fourier transform of the eigenvalues for every local P.
/// The identity entry at (c, c') = (0, 0) is 1 for any distribution.
LambdaTildeTable lambda_tilde_table(const USI& usi);

/// Process fidelity of the USI: the probability of no error, q_{(0,0,I)}.
double usi_fidelity(const USI& usi);
/// Same quantity through the transform: 4^{-n} sum_{P,c,c'} lambda-tilde.
double usi_fidelity_from_lambda(const LambdaTildeTable& table);

/// Analytic twirl: convolves the raw channels into the USI q-table.
/// Pre-measurement and post-measurement Z parts on measured qubits are
/// discarded (they are unobservable); the unmeasured pre-error part is
/// conjugated through V. Throws on conditioned models.
USI usi_from_raw(const RawInstrumentModel& raw);

enum class SamplerRecipe {
    /// Uniform random sparse error locations; component infidelities in the
    /// ratio t_mid : e_pre : e_post = 2 : 1 : 1 summing to total_error.
    Sparse,
    /// Per-qubit depolarizing t_mid ~ N(p, 0.2p); e_pre infidelity 5p and
    /// e_post infidelity p with `num_terms` crosstalk locations each.
    DepolCrosstalk,
    /// Named three-model suite presets.
    SuiteSparse,
    SuiteDepolMcmCrosstalk,
    SuiteDepolPreCrosstalk,
};

struct SamplerSpec {
    SamplerRecipe recipe = SamplerRecipe::Sparse;
    /// Sparse: total error budget. DepolCrosstalk: the parameter p.
    double p = 0.01;
    /// Error locations per channel; 0 picks the recipe default
    /// (3^{n-m} sparse, 100 depol-crosstalk, 2^n suite).
    uint32_t num_terms = 0;
    double prep_flip_mean = 0.0;
    double meas_flip_mean = 0.0;
};

RawInstrumentModel sample_random_usi(const MCMLayerSpec& layer, const SamplerSpec& spec,
                                     Philox& rng);

/// Per-qubit SPAM flip rates: uniform draws rescaled to the requested means.
SpamSpec sample_spam(uint32_t n, double prep_mean, double meas_mean, Philox& rng);

/// Fidelity of the randomly compiled instrument,
///   F = 2^{-m} sum_k Tr(M_k (V^dag (x) |k>><<k|)) / 4^{n-m},
/// computed by weight bookkeeping over the stochastic terms. Supports
/// conditioned models; equals usi_fidelity(usi_from_raw(.)) without them.
double rc_fidelity_from_raw(const RawInstrumentModel& raw);

/// Instrument process fidelity (sum_k sqrt(F_k))^2 with branch overlaps
/// F_k = Tr(M_k L_k^dag)/4^n, the normalization for which the noiseless
/// instrument scores 1.
double instrument_fidelity_eq3(const RawInstrumentModel& raw);

/// Per-branch overlap values S_k = Tr(M_k L_k^dag) / 4^{n-m}, one per
/// outcome k. Exposed for oracle validation.
std::vector<double> branch_overlaps(const RawInstrumentModel& raw);

/// Splits M into (M' with V = I, V); the q-table is shared.
std::pair<USI, std::vector<GateApp>> decompose_general_v(const USI& usi);

}  // namespace mcmlab
