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

#include "mcmlab/tableau.hpp"

namespace mcmlab {

TableauSim::TableauSim(uint32_t n) : n_(n) {
    if (n < 1 || n > 64) throw std::invalid_argument("tableau supports 1..64 qubits");
    xs_.assign(2 * n_ + 1, 0);
    zs_.assign(2 * n_ + 1, 0);
    rs_.assign(2 * n_ + 1, 0);
    reset();
}

void TableauSim::reset() {
    for (uint32_t i = 0; i < n_; i++) {
        xs_[i] = 1ULL << i;
        zs_[i] = 0;
        rs_[i] = 0;
        xs_[n_ + i] = 0;
        zs_[n_ + i] = 1ULL << i;
        rs_[n_ + i] = 0;
    }
    xs_[2 * n_] = zs_[2 * n_] = 0;
    rs_[2 * n_] = 0;
}

void TableauSim::prep_product(const std::vector<PrepBasis>& basis) {
    if (basis.size() != n_) throw std::invalid_argument("prep size != n");
    reset();
    for (uint32_t q = 0; q < n_; q++) {
        switch (basis[q]) {
            case PrepBasis::ZPlus: break;
            case PrepBasis::ZMinus: apply_gate(Gate::X, q); break;
            case PrepBasis::XPlus: apply_gate(Gate::H, q); break;
            case PrepBasis::XMinus:
                apply_gate(Gate::X, q);
                apply_gate(Gate::H, q);
                break;
            case PrepBasis::YPlus:
                apply_gate(Gate::H, q);
                apply_gate(Gate::S, q);
                break;
            case PrepBasis::YMinus:
                apply_gate(Gate::H, q);
                apply_gate(Gate::SDG, q);
                break;
        }
    }
}

void TableauSim::apply_gate(Gate g, uint32_t q0, uint32_t q1) {
    size_t rows = 2 * n_;
    switch (g) {
        case Gate::I:
            break;
        case Gate::X: {
            uint64_t qb = 1ULL << q0;
            for (size_t r = 0; r < rows; r++) rs_[r] ^= (zs_[r] >> q0) & 1;
            (void)qb;
            break;
        }
        case Gate::Y:
            for (size_t r = 0; r < rows; r++) rs_[r] ^= ((xs_[r] ^ zs_[r]) >> q0) & 1;
            break;
        case Gate::Z:
            for (size_t r = 0; r < rows; r++) rs_[r] ^= (xs_[r] >> q0) & 1;
            break;
        case Gate::H:
            for (size_t r = 0; r < rows; r++) {
                uint64_t xb = (xs_[r] >> q0) & 1;
                uint64_t zb = (zs_[r] >> q0) & 1;
                rs_[r] ^= xb & zb;
                uint64_t diff = (xb ^ zb) << q0;
                xs_[r] ^= diff;
                zs_[r] ^= diff;
            }
            break;
        case Gate::S:
            for (size_t r = 0; r < rows; r++) {
                uint64_t xb = (xs_[r] >> q0) & 1;
                uint64_t zb = (zs_[r] >> q0) & 1;
                rs_[r] ^= xb & zb;
                zs_[r] ^= xb << q0;
            }
            break;
        case Gate::SDG:
            for (size_t r = 0; r < rows; r++) {
                uint64_t xb = (xs_[r] >> q0) & 1;
                uint64_t zb = (zs_[r] >> q0) & 1;
                rs_[r] ^= xb & (zb ^ 1);
                zs_[r] ^= xb << q0;
            }
            break;
        case Gate::CX:
            for (size_t r = 0; r < rows; r++) {
                uint64_t xa = (xs_[r] >> q0) & 1;
                uint64_t za = (zs_[r] >> q0) & 1;
                uint64_t xb = (xs_[r] >> q1) & 1;
                uint64_t zb = (zs_[r] >> q1) & 1;
                rs_[r] ^= xa & zb & (xb ^ za ^ 1);
                xs_[r] ^= xa << q1;
                zs_[r] ^= zb << q0;
            }
            break;
        case Gate::CZ:
            apply_gate(Gate::H, q1);
            apply_gate(Gate::CX, q0, q1);
            apply_gate(Gate::H, q1);
            break;
        case Gate::SWAP:
            for (size_t r = 0; r < rows; r++) {
                uint64_t xa = (xs_[r] >> q0) & 1;
                uint64_t za = (zs_[r] >> q0) & 1;
                uint64_t xb = (xs_[r] >> q1) & 1;
                uint64_t zb = (zs_[r] >> q1) & 1;
                xs_[r] ^= ((xa ^ xb) << q0) | ((xa ^ xb) << q1);
                zs_[r] ^= ((za ^ zb) << q0) | ((za ^ zb) << q1);
            }
            break;
    }
}

void TableauSim::apply_gates(const std::vector<GateApp>& gates) {
    for (const GateApp& g : gates) apply_gate(g.gate, g.q0, g.q1);
}

void TableauSim::apply_pauli(const PauliOp& p) {
    size_t rows = 2 * n_;
    for (size_t r = 0; r < rows; r++) {
        rs_[r] ^= parity64((xs_[r] & p.z) ^ (zs_[r] & p.x));
    }
}

void TableauSim::rowsum(size_t h, size_t i) {
    uint64_t xi = xs_[i], zi = zs_[i];
    uint64_t xh = xs_[h], zh = zs_[h];
    // Powers of i accumulated while normal-ordering the product row_i * row_h.
    uint64_t plus = (xi & zi & ~xh & zh) | (xi & ~zi & xh & zh) | (~xi & zi & xh & ~zh);
    uint64_t minus = (xi & zi & xh & ~zh) | (xi & ~zi & ~xh & zh) | (~xi & zi & xh & zh);
    int total = 2 * rs_[h] + 2 * rs_[i] + std::popcount(plus) - std::popcount(minus);
    rs_[h] = static_cast<uint8_t>(((total % 4) + 4) % 4 == 2);
    xs_[h] = xh ^ xi;
    zs_[h] = zh ^ zi;
}

int TableauSim::measure_z(uint32_t q, Philox& rng, bool* was_random) {
    uint64_t qb = 1ULL << q;
    size_t pivot = SIZE_MAX;
    for (size_t r = n_; r < 2 * n_; r++) {
        if (xs_[r] & qb) {
            pivot = r;
            break;
        }
    }
    if (pivot != SIZE_MAX) {
        // Z_q anticommutes with a stabilizer: coin flip plus collapse.
        for (size_t r = 0; r < 2 * n_; r++) {
            if (r != pivot && (xs_[r] & qb)) rowsum(r, pivot);
        }
        xs_[pivot - n_] = xs_[pivot];
        zs_[pivot - n_] = zs_[pivot];
        rs_[pivot - n_] = rs_[pivot];
        xs_[pivot] = 0;
        zs_[pivot] = qb;
        rs_[pivot] = rng.bernoulli(0.5) ? 1 : 0;
        if (was_random) *was_random = true;
        return rs_[pivot];
    }
    // Deterministic outcome: accumulate the matching stabilizers in scratch.
    size_t scratch = 2 * n_;
    xs_[scratch] = zs_[scratch] = 0;
    rs_[scratch] = 0;
    for (size_t i = 0; i < n_; i++) {
        if (xs_[i] & qb) rowsum(scratch, i + n_);
    }
    if (was_random) *was_random = false;
    return rs_[scratch];
}

int TableauSim::stabilizer_sign(const PauliOp& p) const {
    if (p.n != n_) throw std::invalid_argument("stabilizer_sign: dimension mismatch");
    // P is in the group iff it anticommutes with no destabilizer-complement
    // pattern; reconstruct it as the product of stabilizers flagged by the
    // destabilizers it anticommutes with.
    TableauSim scratch_copy = *this;
    size_t scratch = 2 * n_;
    scratch_copy.xs_[scratch] = scratch_copy.zs_[scratch] = 0;
    scratch_copy.rs_[scratch] = 0;
    for (size_t i = 0; i < n_; i++) {
        int anti = parity64((xs_[i] & p.z) ^ (zs_[i] & p.x));
        if (anti) scratch_copy.rowsum(scratch, i + n_);
    }
    if (scratch_copy.xs_[scratch] != p.x || scratch_copy.zs_[scratch] != p.z) return 0;
    return scratch_copy.rs_[scratch] ? -1 : 1;
}

}  // namespace mcmlab
