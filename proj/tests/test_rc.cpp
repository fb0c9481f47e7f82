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

#include <cmath>

#include "doctest.h"
#include "mcmlab/mcmcb.hpp"
#include "mcmlab/sim.hpp"
#include "support/dense_oracle.hpp"

using namespace mcmlab;

namespace {

MCMLayerSpec one_measured_layer() {
    MCMLayerSpec layer;
    layer.n = 2;
    layer.measured = {0};
    return layer;
}

CompiledLayer forced_draw(const MCMLayerSpec& layer, const PauliOp& twirl, uint64_t z_draw) {
    CompiledLayer out;
    out.layer = layer;
    out.twirl = twirl;
    out.z_draw = z_draw;
    for (uint32_t i = 0; i < layer.measured.size(); i++) {
        out.flip_mask |= ((twirl.x >> layer.measured[i]) & 1) << i;
    }
    return out;
}

}  // namespace

TEST_CASE("compiled layer structure") {
    MCMLayerSpec layer = one_measured_layer();
    Philox rng(5, 0, 0);
    bool saw_flip = false, saw_clean = false;
    for (int i = 0; i < 64; i++) {
        CompiledLayer rc = compile_rc_layer(layer, rng);
        // Flip mask set exactly where T0 has X or Y on the measured qubit.
        bool x_on_measured = (rc.twirl.x >> 0) & 1;
        CHECK(rc.flip_mask == (x_on_measured ? 1u : 0u));
        (x_on_measured ? saw_flip : saw_clean) = true;
        // Post layer is the same Pauli with the Z draw folded in.
        PauliOp expected = rc.twirl;
        expected.z ^= rc.z_draw;
        PauliOp post = PauliOp::identity(layer.n);
        for (const GateApp& g : rc.post_gates()) {
            PauliOp single = PauliOp::identity(layer.n);
            single.set_letter(g.q0, gate_name(g.gate)[0]);
            post = compose(post, single);
        }
        CHECK(post == expected);
    }
    CHECK(saw_flip);
    CHECK(saw_clean);

    CompiledLayer all_i = forced_draw(layer, PauliOp::from_str("II"), 0b10);
    CHECK(all_i.flip_mask == 0);
    CHECK(all_i.pre_gates().empty());
    REQUIRE(all_i.post_gates().size() == 1);
    CHECK(all_i.post_gates()[0].gate == Gate::Z);
    CHECK(all_i.post_gates()[0].q0 == 1);

    CompiledLayer x_meas = forced_draw(layer, PauliOp::from_str("XI"), 0);
    CHECK(x_meas.flip_mask == 1);
}

TEST_CASE("compiled layer reproduces the bare layer for every draw") {
    // Exhaustive over all 16 twirls and 4 Z draws on n=2: the corrected
    // outcome and computational-basis post-state distributions match the
    // bare layer exactly.
    MCMLayerSpec layer = one_measured_layer();
    std::vector<std::vector<PrepBasis>> inputs = {
        {PrepBasis::ZPlus, PrepBasis::XPlus},
        {PrepBasis::XMinus, PrepBasis::YPlus},
        {PrepBasis::ZMinus, PrepBasis::ZPlus},
    };
    for (const auto& basis : inputs) {
        CircuitIR bare;
        bare.n = 2;
        bare.ops.push_back(PrepInst{basis});
        bare.ops.push_back(McmInst{{0}, 0, 0});
        bare.ops.push_back(FinalMeasureInst{1, {}});
        auto bare_dist = testing::dense_circuit_distribution(bare);

        for (uint64_t ti = 0; ti < 16; ti++) {
            for (uint64_t z = 0; z < 4; z++) {
                CompiledLayer rc = forced_draw(layer, pauli_from_index(ti, 2), z);
                CircuitIR compiled;
                compiled.n = 2;
                compiled.ops.push_back(PrepInst{basis});
                if (!rc.pre_gates().empty()) compiled.ops.push_back(GateLayerInst{rc.pre_gates()});
                compiled.ops.push_back(McmInst{{0}, 0, rc.flip_mask});
                if (!rc.post_gates().empty()) {
                    compiled.ops.push_back(GateLayerInst{rc.post_gates()});
                }
                compiled.ops.push_back(FinalMeasureInst{1, {}});
                auto dist = testing::dense_circuit_distribution(compiled);
                REQUIRE(dist.size() == bare_dist.size());
                for (const auto& [key, p] : bare_dist) {
                    CHECK(dist.at(key) == doctest::Approx(p).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("merge fuses adjacent Pauli layers") {
    CircuitIR c;
    c.n = 2;
    c.ops.push_back(PrepInst{{PrepBasis::ZPlus, PrepBasis::ZPlus}});
    c.ops.push_back(GateLayerInst{{GateApp(Gate::X, 0)}});
    c.ops.push_back(GateLayerInst{{GateApp(Gate::X, 0)}});
    c.ops.push_back(FinalMeasureInst{0, {}});
    CircuitIR merged = merge_adjacent_pauli_layers(c);
    // X then X cancels into nothing.
    CHECK(merged.ops.size() == 2);

    CircuitIR d;
    d.n = 2;
    d.ops.push_back(PrepInst{{PrepBasis::ZPlus, PrepBasis::ZPlus}});
    d.ops.push_back(GateLayerInst{{GateApp(Gate::Z, 0), GateApp(Gate::Z, 1)}});
    d.ops.push_back(GateLayerInst{{GateApp(Gate::X, 0), GateApp(Gate::Y, 1)}});
    d.ops.push_back(GateLayerInst{{GateApp(Gate::H, 0)}});  // not a Pauli layer
    d.ops.push_back(FinalMeasureInst{0, {}});
    CircuitIR dm = merge_adjacent_pauli_layers(d);
    REQUIRE(dm.ops.size() == 4);
    const auto* fused = std::get_if<GateLayerInst>(&dm.ops[1]);
    REQUIRE(fused != nullptr);
    // Z.X = Y and Z.Y = X per qubit.
    REQUIRE(fused->gates.size() == 2);
    CHECK(fused->gates[0].gate == Gate::Y);
    CHECK(fused->gates[1].gate == Gate::X);

    CircuitIR empty;
    empty.n = 1;
    CHECK(merge_adjacent_pauli_layers(empty).ops.empty());
}

TEST_CASE("merge preserves noiseless semantics on random circuits") {
    for (int trial = 0; trial < 20; trial++) {
        Philox gen(808 + trial, 0, 0);
        CircuitIR c;
        c.n = 2;
        c.uid = trial;
        c.ops.push_back(PrepInst{{static_cast<PrepBasis>(gen.below(6)),
                                  static_cast<PrepBasis>(gen.below(6))}});
        for (int k = 0; k < 6; k++) {
            if (gen.below(3) == 0) {
                c.ops.push_back(GateLayerInst{{GateApp(Gate::CX, 0, 1)}});
            } else {
                std::vector<GateApp> gates;
                for (uint32_t q = 0; q < 2; q++) {
                    Gate g = static_cast<Gate>(gen.below(4));  // Pauli layer
                    if (g != Gate::I) gates.emplace_back(g, q);
                }
                c.ops.push_back(GateLayerInst{gates});
            }
            if (k == 3) c.ops.push_back(McmInst{{0}, 0, 0});
        }
        c.ops.push_back(FinalMeasureInst{1, {}});
        CircuitIR merged = merge_adjacent_pauli_layers(c);
        CHECK(merged.ops.size() <= c.ops.size());
        auto before = testing::dense_circuit_distribution(c);
        auto after = testing::dense_circuit_distribution(merged);
        REQUIRE(before.size() == after.size());
        for (const auto& [key, p] : before) {
            CHECK(after.at(key) == doctest::Approx(p).epsilon(1e-12));
        }
    }
}

TEST_CASE("twirled layers realize the analytic lambda-tilde values") {
    // The reason this module exists: Monte-Carlo estimates of each
    // lambda-tilde through randomly compiled layers converge to the
    // analytic table of the twirl of the raw model. Depth-1 subexperiments,
    // m=1, n=2, 1e5 shots per parameter, 4-standard-error agreement.
    MCMLayerSpec layer = one_measured_layer();
    Philox model_rng(314, 0, 0);
    SamplerSpec spec;
    spec.p = 0.12;
    RawInstrumentModel model = sample_random_usi(layer, spec, model_rng);
    model.spam = SpamSpec{};
    USI usi = usi_from_raw(model);
    LambdaTildeTable lt = lambda_tilde_table(usi);

    const uint32_t circuits = 200;
    const uint32_t shots = 500;
    uint64_t uid_base = 1;
    for (uint64_t pi = 0; pi < 4; pi++) {
        PauliOp p = pauli_from_index(pi, 1);
        CircuitSet set = build_subexperiment_circuits(p, layer, &model, {1}, circuits,
                                                      4100 + pi, uid_base);
        uid_base += circuits;
        for (uint64_t c1 = 0; c1 < 2; c1++) {
            for (uint64_t c2 = 0; c2 < 2; c2++) {
                // After one layer the tracked operator sits at Z(c2) on the
                // measured qubit.
                uint64_t final_mask = full_final_mask(layer, set.t_f, c2);
                uint64_t t_mcm = c1 ^ c2;
                std::vector<double> means;
                for (uint32_t j = 0; j < circuits; j++) {
                    const SubCircuit& sub = set.at(0, j);
                    int t0 = t0_for(sub.ideal_record, final_mask, t_mcm);
                    int64_t sum = 0;
                    run_shots_visit(sub.noisy, shots, 4200 + pi, [&](const ShotRecord& s) {
                        sum += analyze_shot(s, final_mask, t_mcm, t0);
                    });
                    means.push_back(static_cast<double>(sum) / shots);
                }
                double estimate = mean_of(means);
                double se = sem_of(means);
                double expected = lt.at(p, c1, c2);
                CHECK(std::abs(estimate - expected) <= 4 * std::max(se, 1e-4));
            }
        }
    }
}
