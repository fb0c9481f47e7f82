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

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcmlab {

/// Default tolerance for probability-normalization checks.
constexpr double kProbTol = 1e-12;

/// An unsigned n-qubit Pauli operator stored as packed (x, z) bit pairs.
///
/// Bit i of `x`/`z` is the X/Z part on qubit i. The label map per qubit is
/// I=(0,0), X=(1,0), Z=(0,1), Y=(1,1). Supports n <= 64 (one machine word
/// per part), which covers every workload this library targets. n = 0 is
/// the empty operator on a fully measured layer's unmeasured subsystem.
struct PauliOp {
    uint64_t x = 0;
    uint64_t z = 0;
    uint32_t n = 0;

    PauliOp() = default;
    PauliOp(uint64_t x_bits, uint64_t z_bits, uint32_t num_qubits);

    static PauliOp identity(uint32_t num_qubits);
    /// Parses a string over {I,X,Y,Z}; qubit 0 is the leftmost character.
    static PauliOp from_str(const std::string& text);
    /// Single-qubit letter placed at `qubit` in an otherwise-identity op.
    static PauliOp single(uint32_t num_qubits, uint32_t qubit, char letter);

    std::string str() const;
    char letter(uint32_t qubit) const;
    void set_letter(uint32_t qubit, char letter);

    bool is_identity() const { return x == 0 && z == 0; }
    /// Support bit-string: bit i set iff the letter on qubit i is not I.
    uint64_t support() const { return x | z; }
    uint32_t weight() const { return std::popcount(support()); }

    bool operator==(const PauliOp& o) const { return n == o.n && x == o.x && z == o.z; }
    bool operator!=(const PauliOp& o) const { return !(*this == o); }
    bool operator<(const PauliOp& o) const {
        if (n != o.n) return n < o.n;
        if (x != o.x) return x < o.x;
        return z < o.z;
    }
};

/// An m-qubit Z-type Pauli Z(c), stored as the mask c. The all-zero mask is
/// the identity.
struct ZMask {
    uint64_t bits = 0;
    uint32_t m = 0;

    ZMask() = default;
    ZMask(uint64_t c, uint32_t m_qubits) : bits(c), m(m_qubits) {}

    static ZMask from_str(const std::string& text);
    std::string str() const;

    bool operator==(const ZMask& o) const { return m == o.m && bits == o.bits; }
    bool operator<(const ZMask& o) const {
        if (m != o.m) return m < o.m;
        return bits < o.bits;
    }
};

/// Pre/post measurement bit-flip patterns (a, b) on m measured qubits.
struct FlipPatternPair {
    uint64_t a = 0;
    uint64_t b = 0;
    uint32_t m = 0;

    FlipPatternPair() = default;
    FlipPatternPair(uint64_t a_bits, uint64_t b_bits, uint32_t m_qubits)
        : a(a_bits), b(b_bits), m(m_qubits) {}

    bool operator==(const FlipPatternPair& o) const { return m == o.m && a == o.a && b == o.b; }
    bool operator<(const FlipPatternPair& o) const {
        if (m != o.m) return m < o.m;
        if (a != o.a) return a < o.a;
        return b < o.b;
    }
};

/// Sparse probability table keyed by bit-strings or Pauli labels.
template <typename Key>
struct ProbTable {
    std::map<Key, double> entries;

    double sum() const {
        double s = 0;
        for (const auto& [k, v] : entries) s += v;
        return s;
    }

    /// Throws unless all values are >= 0 and the total is 1 within `tol`.
    void check_distribution(double tol = kProbTol) const {
        for (const auto& [k, v] : entries) {
            if (v < -tol) throw std::invalid_argument("ProbTable: negative probability");
        }
        double s = sum();
        if (s < 1.0 - tol || s > 1.0 + tol) {
            throw std::invalid_argument("ProbTable: probabilities sum to " + std::to_string(s) +
                                        ", not 1");
        }
    }

    double get(const Key& k) const {
        auto it = entries.find(k);
        return it == entries.end() ? 0.0 : it->second;
    }

    void add(const Key& k, double p) {
        if (p == 0) return;
        entries[k] += p;
    }
};

/// Sign-free composition (bitwise XOR of the (x, z) parts).
PauliOp compose(const PauliOp& p, const PauliOp& q);

/// Symplectic anticommutation indicator <p, q>: 1 iff p and q anticommute.
int anticommutes(const PauliOp& p, const PauliOp& q);
bool commutes(const PauliOp& p, const PauliOp& q);

/// Dense packed index: qubit i contributes (x_i + 2 z_i) * 4^i.
uint64_t pauli_index(const PauliOp& p);
PauliOp pauli_from_index(uint64_t idx, uint32_t num_qubits);

/// Walsh-Hadamard transform between a Pauli error distribution over P_k and
/// the channel eigenvalues lambda_P = sum_Q p_Q (-1)^<P,Q>.
///
/// Sparse inputs are summed directly; dense inputs go through the O(4^k k)
/// butterfly. The identity eigenvalue of a distribution is exactly 1.
std::map<PauliOp, double> wht_probs_to_eigenvalues(const ProbTable<PauliOp>& probs, uint32_t k,
                                                   double tol = kProbTol);

/// Inverse transform: p_Q = 4^{-k} sum_P lambda_P (-1)^<P,Q>. Requires a
/// complete eigenvalue table over P_k.
ProbTable<PauliOp> wht_eigenvalues_to_probs(const std::map<PauliOp, double>& lambdas, uint32_t k);

/// In-place Pauli-label butterfly on a dense vector of size 4^k indexed by
/// pauli_index. Self-inverse up to a factor 4^k.
void wht_pauli_in_place(std::vector<double>& values, uint32_t k);

/// Binary Fourier transform over flip patterns:
///   out(c, c') = sum_{a,b} in(a, b) (-1)^{a.c + b.c'}
/// Keys absent from the input read as zero. The transform is self-inverse up
/// to a factor 4^m; `binary_fourier_inverse` includes that factor.
std::map<FlipPatternPair, double> binary_fourier(const std::map<FlipPatternPair, double>& lambdas,
                                                 uint32_t m);
std::map<FlipPatternPair, double> binary_fourier_inverse(
    const std::map<FlipPatternPair, double>& tilde, uint32_t m);

/// Dense versions on vectors of size 4^m indexed by (a | b << m).
void binary_fourier_in_place(std::vector<double>& values, uint32_t m);

/// Parity of the bitwise AND, i.e. the GF(2) dot product.
inline int parity64(uint64_t v) { return std::popcount(v) & 1; }
inline int dot2(uint64_t a, uint64_t b) { return parity64(a & b); }

}  // namespace mcmlab
