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

#include "mcmlab/rc.hpp"

namespace mcmlab {

namespace {

Gate pauli_letter_gate(char letter) {
    switch (letter) {
        case 'I': return Gate::I;
        case 'X': return Gate::X;
        case 'Y': return Gate::Y;
        case 'Z': return Gate::Z;
    }
    throw std::invalid_argument("not a Pauli letter");
}

std::vector<GateApp> pauli_to_gate_layer(const PauliOp& p) {
    std::vector<GateApp> gates;
    for (uint32_t q = 0; q < p.n; q++) {
        char c = p.letter(q);
        if (c != 'I') gates.emplace_back(pauli_letter_gate(c), q);
    }
    return gates;
}

}  // namespace

std::vector<GateApp> CompiledLayer::pre_gates() const {
    return pauli_to_gate_layer(twirl);
}

std::vector<GateApp> CompiledLayer::post_gates() const {
    // T0^{-1} = T0 up to phase; fold the Z layer in so adjacent Pauli layers
    // stay a single layer.
    PauliOp net = twirl;
    net.z ^= z_draw;
    return pauli_to_gate_layer(net);
}

CompiledLayer compile_rc_layer(const MCMLayerSpec& layer, Philox& rng) {
    layer.validate();
    CompiledLayer out;
    out.layer = layer;
    out.twirl = PauliOp::identity(layer.n);
    for (uint32_t q = 0; q < layer.n; q++) {
        uint64_t draw = rng.below(4);
        out.twirl.x |= (draw & 1) << q;
        out.twirl.z |= ((draw >> 1) & 1) << q;
    }
    for (uint32_t q = 0; q < layer.n; q++) {
        out.z_draw |= (rng.below(2)) << q;
    }
    for (uint32_t i = 0; i < layer.measured.size(); i++) {
        out.flip_mask |= static_cast<uint64_t>((out.twirl.x >> layer.measured[i]) & 1) << i;
    }
    return out;
}

CircuitIR merge_adjacent_pauli_layers(const CircuitIR& circuit) {
    CircuitIR out;
    out.n = circuit.n;
    out.uid = circuit.uid;
    out.tables = circuit.tables;

    PauliOp pending = PauliOp::identity(circuit.n);
    bool have_pending = false;
    auto flush = [&]() {
        if (!have_pending) return;
        std::vector<GateApp> gates = pauli_to_gate_layer(pending);
        if (!gates.empty()) out.ops.push_back(GateLayerInst{std::move(gates)});
        pending = PauliOp::identity(circuit.n);
        have_pending = false;
    };

    for (const auto& op : circuit.ops) {
        if (const auto* layer = std::get_if<GateLayerInst>(&op)) {
            if (layer->pauli_only()) {
                for (const GateApp& g : layer->gates) {
                    PauliOp single = PauliOp::identity(circuit.n);
                    switch (g.gate) {
                        case Gate::I: break;
                        case Gate::X: single.set_letter(g.q0, 'X'); break;
                        case Gate::Y: single.set_letter(g.q0, 'Y'); break;
                        case Gate::Z: single.set_letter(g.q0, 'Z'); break;
                        default: throw std::logic_error("pauli_only layer with non-Pauli gate");
                    }
                    pending = compose(pending, single);
                }
                have_pending = true;
                continue;
            }
        }
        flush();
        out.ops.push_back(op);
    }
    flush();
    return out;
}

}  // namespace mcmlab
