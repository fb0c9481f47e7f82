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

#include "mcmlab/sim.hpp"

#include <unordered_map>

namespace mcmlab {

ShotRecord run_one_shot(const CircuitIR& circuit, TableauSim& tableau, Philox& rng,
                        uint32_t shot_index) {
    ShotRecord record;
    record.shot_index = shot_index;
    record.mcm_bits.reserve(circuit.num_mcms());
    // Record tag -> raw mcm word (post flip-mask), for conditioned errors.
    std::unordered_map<uint32_t, uint64_t> by_tag;

    for (const auto& op : circuit.ops) {
        if (const auto* prep = std::get_if<PrepInst>(&op)) {
            tableau.prep_product(prep->basis);
        } else if (const auto* layer = std::get_if<GateLayerInst>(&op)) {
            tableau.apply_gates(layer->gates);
        } else if (const auto* noise = std::get_if<PauliNoiseInst>(&op)) {
            tableau.apply_pauli(circuit.tables[noise->table].sample(rng));
        } else if (const auto* flips = std::get_if<XFlipInst>(&op)) {
            for (uint32_t q = 0; q < circuit.n; q++) {
                if (flips->probs[q] > 0 && rng.bernoulli(flips->probs[q])) {
                    tableau.apply_gate(Gate::X, q);
                }
            }
        } else if (const auto* mcm = std::get_if<McmInst>(&op)) {
            uint64_t raw_bits = 0;
            for (size_t i = 0; i < mcm->qubits.size(); i++) {
                raw_bits |= static_cast<uint64_t>(tableau.measure_z(mcm->qubits[i], rng)) << i;
            }
            // Conditioned errors are physical-layer effects: they see the
            // raw outcome, while the record carries the corrected bits.
            by_tag[mcm->record] = raw_bits;
            record.mcm_bits.push_back(raw_bits ^ mcm->flip_mask);
        } else if (const auto* cond = std::get_if<CondPauliInst>(&op)) {
            uint64_t bits = by_tag.at(cond->record);
            if ((bits & cond->mask) == cond->value) {
                tableau.apply_pauli(circuit.tables[cond->table].sample(rng));
            }
        } else if (const auto* fin = std::get_if<FinalMeasureInst>(&op)) {
            uint64_t bits = 0;
            for (uint32_t q = 0; q < circuit.n; q++) {
                bits |= static_cast<uint64_t>(tableau.measure_z(q, rng)) << q;
            }
            for (uint32_t q = 0; q < fin->readout_flip.size(); q++) {
                if (fin->readout_flip[q] > 0 && rng.bernoulli(fin->readout_flip[q])) {
                    bits ^= 1ULL << q;
                }
            }
            record.final_bits = bits;
        }
    }
    return record;
}

std::vector<ShotRecord> run_shots(const CircuitIR& circuit, uint32_t shots, uint64_t seed) {
    std::vector<ShotRecord> records;
    records.reserve(shots);
    run_shots_visit(circuit, shots, seed,
                    [&](const ShotRecord& r) { records.push_back(r); });
    return records;
}

void run_shots_visit(const CircuitIR& circuit, uint32_t shots, uint64_t seed,
                     const std::function<void(const ShotRecord&)>& visit) {
    circuit.validate();
    TableauSim tableau(circuit.n);
    for (uint32_t s = 0; s < shots; s++) {
        Philox rng(seed, circuit.uid, s);
        ShotRecord record = run_one_shot(circuit, tableau, rng, s);
        visit(record);
    }
}

}  // namespace mcmlab
