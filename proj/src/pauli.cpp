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

#include "mcmlab/pauli.hpp"

#include <array>

namespace mcmlab {

namespace {

// n = 0 is allowed: the empty operator shows up when every qubit of a layer
// is measured.
void require_qubits(uint32_t n) {
    if (n > 64) {
        throw std::invalid_argument("qubit count must be at most 64, got " + std::to_string(n));
    }
}

uint64_t low_mask(uint32_t n) {
    return n >= 64 ? ~0ULL : ((1ULL << n) - 1);
}

}  // namespace

PauliOp::PauliOp(uint64_t x_bits, uint64_t z_bits, uint32_t num_qubits)
    : x(x_bits), z(z_bits), n(num_qubits) {
    require_qubits(num_qubits);
    if ((x & ~low_mask(n)) || (z & ~low_mask(n))) {
        throw std::invalid_argument("Pauli bit tables exceed qubit count");
    }
}

PauliOp PauliOp::identity(uint32_t num_qubits) {
    require_qubits(num_qubits);
    PauliOp p;
    p.n = num_qubits;
    return p;
}

PauliOp PauliOp::from_str(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty Pauli string");
    PauliOp p = identity(static_cast<uint32_t>(text.size()));
    for (uint32_t i = 0; i < text.size(); i++) {
        p.set_letter(i, text[i]);
    }
    return p;
}

PauliOp PauliOp::single(uint32_t num_qubits, uint32_t qubit, char letter) {
    PauliOp p = identity(num_qubits);
    p.set_letter(qubit, letter);
    return p;
}

std::string PauliOp::str() const {
    std::string s(n, 'I');
    for (uint32_t i = 0; i < n; i++) s[i] = letter(i);
    return s;
}

char PauliOp::letter(uint32_t qubit) const {
    if (qubit >= n) throw std::out_of_range("qubit index out of range");
    int v = static_cast<int>((x >> qubit) & 1) | (static_cast<int>((z >> qubit) & 1) << 1);
    constexpr std::array<char, 4> kLetters{'I', 'X', 'Z', 'Y'};
    return kLetters[v];
}

void PauliOp::set_letter(uint32_t qubit, char letter) {
    if (qubit >= n) throw std::out_of_range("qubit index out of range");
    uint64_t bit = 1ULL << qubit;
    x &= ~bit;
    z &= ~bit;
    switch (letter) {
        case 'I':
        case '_':
            break;
        case 'X':
            x |= bit;
            break;
        case 'Y':
            x |= bit;
            z |= bit;
            break;
        case 'Z':
            z |= bit;
            break;
        default:
            throw std::invalid_argument(std::string("unknown Pauli letter '") + letter + "'");
    }
}

ZMask ZMask::from_str(const std::string& text) {
    if (text.empty() || text.size() > 64) throw std::invalid_argument("bad Z-mask string");
    ZMask z;
    z.m = static_cast<uint32_t>(text.size());
    for (uint32_t i = 0; i < text.size(); i++) {
        if (text[i] == '1') {
            z.bits |= 1ULL << i;
        } else if (text[i] != '0') {
            throw std::invalid_argument("Z-mask strings contain only 0/1");
        }
    }
    return z;
}

std::string ZMask::str() const {
    std::string s(m, '0');
    for (uint32_t i = 0; i < m; i++) {
        if ((bits >> i) & 1) s[i] = '1';
    }
    return s;
}

PauliOp compose(const PauliOp& p, const PauliOp& q) {
    if (p.n != q.n) throw std::invalid_argument("compose: Pauli dimension mismatch");
    PauliOp r;
    r.n = p.n;
    r.x = p.x ^ q.x;
    r.z = p.z ^ q.z;
    return r;
}

int anticommutes(const PauliOp& p, const PauliOp& q) {
    if (p.n != q.n) throw std::invalid_argument("commutator: Pauli dimension mismatch");
    return dot2(p.x, q.z) ^ dot2(p.z, q.x);
}

bool commutes(const PauliOp& p, const PauliOp& q) {
    return anticommutes(p, q) == 0;
}

uint64_t pauli_index(const PauliOp& p) {
    // Interleave: qubit i occupies bits (2i, 2i+1) as x_i | z_i << 1.
    uint64_t idx = 0;
    for (uint32_t i = 0; i < p.n; i++) {
        idx |= (((p.x >> i) & 1) | (((p.z >> i) & 1) << 1)) << (2 * i);
    }
    return idx;
}

PauliOp pauli_from_index(uint64_t idx, uint32_t num_qubits) {
    PauliOp p = PauliOp::identity(num_qubits);
    for (uint32_t i = 0; i < num_qubits; i++) {
        p.x |= ((idx >> (2 * i)) & 1) << i;
        p.z |= ((idx >> (2 * i + 1)) & 1) << i;
    }
    return p;
}

void wht_pauli_in_place(std::vector<double>& values, uint32_t k) {
    if (values.size() != (1ULL << (2 * k))) {
        throw std::invalid_argument("wht: dense table size must be 4^k");
    }
    // Label order per qubit is (I, X, Z, Y); the per-qubit kernel is the
    // +/-1 matrix of (-1)^<P,Q>, which squares to 4I.
    for (uint32_t q = 0; q < k; q++) {
        size_t stride = 1ULL << (2 * q);
        size_t block = stride * 4;
        for (size_t base = 0; base < values.size(); base += block) {
            for (size_t off = 0; off < stride; off++) {
                double vi = values[base + off];
                double vx = values[base + stride + off];
                double vz = values[base + 2 * stride + off];
                double vy = values[base + 3 * stride + off];
                values[base + off] = vi + vx + vz + vy;
                values[base + stride + off] = vi + vx - vz - vy;
                values[base + 2 * stride + off] = vi - vx + vz - vy;
                values[base + 3 * stride + off] = vi - vx - vz + vy;
            }
        }
    }
}

std::map<PauliOp, double> wht_probs_to_eigenvalues(const ProbTable<PauliOp>& probs, uint32_t k,
                                                   double tol) {
    require_qubits(k);
    probs.check_distribution(tol);
    for (const auto& [q, v] : probs.entries) {
        if (q.n != k) throw std::invalid_argument("wht: table key has wrong qubit count");
    }

    size_t dense_size = 1ULL << (2 * k);
    std::map<PauliOp, double> lambdas;
    if (probs.entries.size() * 8 < dense_size) {
        // Sparse path: direct sum over the nonzero error locations.
        for (uint64_t idx = 0; idx < dense_size; idx++) {
            PauliOp p = pauli_from_index(idx, k);
            double lam = 0;
            for (const auto& [q, v] : probs.entries) {
                lam += anticommutes(p, q) ? -v : v;
            }
            lambdas[p] = lam;
        }
    } else {
        std::vector<double> dense(dense_size, 0.0);
        for (const auto& [q, v] : probs.entries) dense[pauli_index(q)] += v;
        wht_pauli_in_place(dense, k);
        for (uint64_t idx = 0; idx < dense_size; idx++) {
            lambdas[pauli_from_index(idx, k)] = dense[idx];
        }
    }
    lambdas[PauliOp::identity(k)] = 1.0;
    return lambdas;
}

ProbTable<PauliOp> wht_eigenvalues_to_probs(const std::map<PauliOp, double>& lambdas, uint32_t k) {
    require_qubits(k);
    size_t dense_size = 1ULL << (2 * k);
    if (lambdas.size() != dense_size) {
        throw std::invalid_argument("wht inverse: eigenvalue table must cover all of P_k");
    }
    std::vector<double> dense(dense_size, 0.0);
    for (const auto& [p, v] : lambdas) {
        if (p.n != k) throw std::invalid_argument("wht inverse: key has wrong qubit count");
        dense[pauli_index(p)] = v;
    }
    wht_pauli_in_place(dense, k);
    double scale = 1.0 / static_cast<double>(dense_size);
    ProbTable<PauliOp> probs;
    for (uint64_t idx = 0; idx < dense_size; idx++) {
        double p = dense[idx] * scale;
        if (p != 0.0) probs.entries[pauli_from_index(idx, k)] = p;
    }
    return probs;
}

void binary_fourier_in_place(std::vector<double>& values, uint32_t m) {
    if (values.size() != (1ULL << (2 * m))) {
        throw std::invalid_argument("binary fourier: dense table size must be 4^m");
    }
    // Plain +/- butterfly over the 2m index bits of (a | b << m).
    for (uint32_t bit = 0; bit < 2 * m; bit++) {
        size_t stride = 1ULL << bit;
        for (size_t base = 0; base < values.size(); base += 2 * stride) {
            for (size_t off = 0; off < stride; off++) {
                double lo = values[base + off];
                double hi = values[base + stride + off];
                values[base + off] = lo + hi;
                values[base + stride + off] = lo - hi;
            }
        }
    }
}

namespace {

std::map<FlipPatternPair, double> binary_fourier_impl(
    const std::map<FlipPatternPair, double>& input, uint32_t m, bool inverse) {
    if (m < 1 || m > 16) throw std::invalid_argument("binary fourier: m out of range");
    size_t size = 1ULL << (2 * m);
    std::vector<double> dense(size, 0.0);
    for (const auto& [key, v] : input) {
        if (key.m != m) throw std::invalid_argument("binary fourier: key has wrong length");
        dense[key.a | (key.b << m)] += v;
    }
    binary_fourier_in_place(dense, m);
    double scale = inverse ? 1.0 / static_cast<double>(size) : 1.0;
    std::map<FlipPatternPair, double> out;
    uint64_t mask = (1ULL << m) - 1;
    for (uint64_t idx = 0; idx < size; idx++) {
        out[FlipPatternPair(idx & mask, idx >> m, m)] = dense[idx] * scale;
    }
    return out;
}

}  // namespace

std::map<FlipPatternPair, double> binary_fourier(const std::map<FlipPatternPair, double>& lambdas,
                                                 uint32_t m) {
    return binary_fourier_impl(lambdas, m, false);
}

std::map<FlipPatternPair, double> binary_fourier_inverse(
    const std::map<FlipPatternPair, double>& tilde, uint32_t m) {
    return binary_fourier_impl(tilde, m, true);
}

}  // namespace mcmlab
