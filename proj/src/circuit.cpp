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

#include "mcmlab/circuit.hpp"

#include <algorithm>
#include <set>

namespace mcmlab {

std::string prep_basis_name(PrepBasis b) {
    switch (b) {
        case PrepBasis::ZPlus: return "Z+";
        case PrepBasis::ZMinus: return "Z-";
        case PrepBasis::XPlus: return "X+";
        case PrepBasis::XMinus: return "X-";
        case PrepBasis::YPlus: return "Y+";
        case PrepBasis::YMinus: return "Y-";
    }
    throw std::invalid_argument("unreachable prep basis");
}

PrepBasis prep_basis_from_name(const std::string& name) {
    if (name == "Z+") return PrepBasis::ZPlus;
    if (name == "Z-") return PrepBasis::ZMinus;
    if (name == "X+") return PrepBasis::XPlus;
    if (name == "X-") return PrepBasis::XMinus;
    if (name == "Y+") return PrepBasis::YPlus;
    if (name == "Y-") return PrepBasis::YMinus;
    throw std::invalid_argument("unknown prep basis '" + name + "'");
}

SampledTable SampledTable::build(const ProbTable<PauliOp>& table, uint32_t n, double tol) {
    table.check_distribution(tol);
    SampledTable out;
    out.source = table;
    double acc = 0;
    for (const auto& [p, v] : table.entries) {
        if (p.n != n) throw std::invalid_argument("noise table key has wrong qubit count");
        if (v <= 0) continue;
        acc += v;
        out.cdf.push_back(acc);
        out.paulis.push_back(p);
    }
    if (!out.cdf.empty()) out.cdf.back() = 1.0;
    return out;
}

const PauliOp& SampledTable::sample(Philox& rng) const {
    double u = rng.uniform();
    size_t lo = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    if (lo >= paulis.size()) lo = paulis.size() - 1;
    return paulis[lo];
}

bool GateLayerInst::pauli_only() const {
    return std::all_of(gates.begin(), gates.end(),
                       [](const GateApp& g) { return is_pauli_gate(g.gate); });
}

uint32_t CircuitIR::num_mcms() const {
    uint32_t k = 0;
    for (const auto& op : ops) {
        if (std::holds_alternative<McmInst>(op)) k++;
    }
    return k;
}

void CircuitIR::validate() const {
    if (n < 1 || n > 64) throw std::invalid_argument("circuit qubit count out of range");
    std::set<uint32_t> records;
    bool saw_final = false;
    for (const auto& op : ops) {
        if (saw_final) throw std::invalid_argument("instructions after final measurement");
        if (const auto* prep = std::get_if<PrepInst>(&op)) {
            if (prep->basis.size() != n) throw std::invalid_argument("prep size != n");
        } else if (const auto* layer = std::get_if<GateLayerInst>(&op)) {
            for (const GateApp& g : layer->gates) {
                if (g.q0 >= n || (is_two_qubit(g.gate) && g.q1 >= n)) {
                    throw std::invalid_argument("gate qubit out of range");
                }
                if (is_two_qubit(g.gate) && g.q0 == g.q1) {
                    throw std::invalid_argument("two-qubit gate on identical qubits");
                }
            }
        } else if (const auto* noise = std::get_if<PauliNoiseInst>(&op)) {
            if (noise->table >= tables.size()) throw std::invalid_argument("missing noise table");
        } else if (const auto* flips = std::get_if<XFlipInst>(&op)) {
            if (flips->probs.size() != n) throw std::invalid_argument("x-flip size != n");
        } else if (const auto* mcm = std::get_if<McmInst>(&op)) {
            if (mcm->qubits.empty()) throw std::invalid_argument("MCM with no qubits");
            std::set<uint32_t> uniq(mcm->qubits.begin(), mcm->qubits.end());
            if (uniq.size() != mcm->qubits.size()) throw std::invalid_argument("duplicate MCM qubit");
            for (uint32_t q : mcm->qubits) {
                if (q >= n) throw std::invalid_argument("MCM qubit out of range");
            }
            if (!records.insert(mcm->record).second) {
                throw std::invalid_argument("duplicate record tag");
            }
        } else if (const auto* cond = std::get_if<CondPauliInst>(&op)) {
            if (!records.count(cond->record)) {
                throw std::invalid_argument("conditioned error references unknown/later record");
            }
            if (cond->table >= tables.size()) throw std::invalid_argument("missing noise table");
        } else if (const auto* fin = std::get_if<FinalMeasureInst>(&op)) {
            if (!fin->readout_flip.empty() && fin->readout_flip.size() != n) {
                throw std::invalid_argument("readout flip size != n");
            }
            if (records.count(fin->record)) throw std::invalid_argument("duplicate record tag");
            saw_final = true;
        }
    }
}

}  // namespace mcmlab
