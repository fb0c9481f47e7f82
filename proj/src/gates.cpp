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

#include "mcmlab/gates.hpp"

namespace mcmlab {

bool is_two_qubit(Gate g) {
    return g == Gate::CX || g == Gate::CZ || g == Gate::SWAP;
}

bool is_pauli_gate(Gate g) {
    return g == Gate::I || g == Gate::X || g == Gate::Y || g == Gate::Z;
}

std::string gate_name(Gate g) {
    switch (g) {
        case Gate::I: return "I";
        case Gate::X: return "X";
        case Gate::Y: return "Y";
        case Gate::Z: return "Z";
        case Gate::H: return "H";
        case Gate::S: return "S";
        case Gate::SDG: return "Sdg";
        case Gate::CX: return "CX";
        case Gate::CZ: return "CZ";
        case Gate::SWAP: return "SWAP";
    }
    throw std::invalid_argument("unreachable gate");
}

Gate gate_from_name(const std::string& name) {
    if (name == "I") return Gate::I;
    if (name == "X") return Gate::X;
    if (name == "Y") return Gate::Y;
    if (name == "Z") return Gate::Z;
    if (name == "H") return Gate::H;
    if (name == "S") return Gate::S;
    if (name == "Sdg" || name == "SDG" || name == "S+" || name == "S†") return Gate::SDG;
    if (name == "CX" || name == "CNOT") return Gate::CX;
    if (name == "CZ") return Gate::CZ;
    if (name == "SWAP") return Gate::SWAP;
    throw std::invalid_argument("unknown gate '" + name + "'");
}

namespace {

inline uint64_t bit_at(uint64_t word, uint32_t q) { return (word >> q) & 1; }

void set_bit(uint64_t& word, uint32_t q, uint64_t v) {
    word = (word & ~(1ULL << q)) | (v << q);
}

// Standard stabilizer-frame conjugation rules on one (x, z) bit pair.
void conj_single(PauliOp& p, bool& sign, Gate g, uint32_t q) {
    uint64_t x = bit_at(p.x, q);
    uint64_t z = bit_at(p.z, q);
    switch (g) {
        case Gate::I:
            break;
        case Gate::X:
            sign ^= z;
            break;
        case Gate::Y:
            sign ^= x ^ z;
            break;
        case Gate::Z:
            sign ^= x;
            break;
        case Gate::H:
            sign ^= x & z;
            set_bit(p.x, q, z);
            set_bit(p.z, q, x);
            break;
        case Gate::S:
            sign ^= x & z;
            set_bit(p.z, q, z ^ x);
            break;
        case Gate::SDG:
            sign ^= x & (z ^ 1);
            set_bit(p.z, q, z ^ x);
            break;
        default:
            throw std::invalid_argument("conj_single: not a single-qubit gate");
    }
}

void conj_cx(PauliOp& p, bool& sign, uint32_t a, uint32_t b) {
    uint64_t xa = bit_at(p.x, a), za = bit_at(p.z, a);
    uint64_t xb = bit_at(p.x, b), zb = bit_at(p.z, b);
    sign ^= xa & zb & (xb ^ za ^ 1);
    set_bit(p.x, b, xb ^ xa);
    set_bit(p.z, a, za ^ zb);
}

}  // namespace

void conjugate_pauli_in_place(PauliOp& p, bool& sign, Gate g, uint32_t q0, uint32_t q1) {
    if (q0 >= p.n || (is_two_qubit(g) && q1 >= p.n)) {
        throw std::out_of_range("gate qubit out of range");
    }
    switch (g) {
        case Gate::CX:
            conj_cx(p, sign, q0, q1);
            break;
        case Gate::CZ:
            conj_single(p, sign, Gate::H, q1);
            conj_cx(p, sign, q0, q1);
            conj_single(p, sign, Gate::H, q1);
            break;
        case Gate::SWAP: {
            uint64_t x0 = bit_at(p.x, q0), z0 = bit_at(p.z, q0);
            uint64_t x1 = bit_at(p.x, q1), z1 = bit_at(p.z, q1);
            set_bit(p.x, q0, x1);
            set_bit(p.z, q0, z1);
            set_bit(p.x, q1, x0);
            set_bit(p.z, q1, z0);
            break;
        }
        default:
            conj_single(p, sign, g, q0);
            break;
    }
}

PauliOp conjugate_pauli(const PauliOp& p, const std::vector<GateApp>& gates, bool* sign_out) {
    PauliOp out = p;
    bool sign = false;
    for (const GateApp& g : gates) {
        conjugate_pauli_in_place(out, sign, g.gate, g.q0, g.q1);
    }
    if (sign_out) *sign_out = sign;
    return out;
}

}  // namespace mcmlab
