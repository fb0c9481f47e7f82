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

#include <cmath>

#include "doctest.h"
#include "support/dense_oracle.hpp"

using namespace mcmlab;

namespace {

CircuitIR prep_and_measure(uint32_t n, const std::vector<PrepBasis>& basis) {
    CircuitIR c;
    c.n = n;
    c.uid = 1;
    c.ops.push_back(PrepInst{basis});
    c.ops.push_back(FinalMeasureInst{0, {}});
    return c;
}

}  // namespace

TEST_CASE("measuring |0> always gives 0") {
    CircuitIR c = prep_and_measure(1, {PrepBasis::ZPlus});
    for (const ShotRecord& s : run_shots(c, 50, 7)) CHECK(s.final_bits == 0);
}

TEST_CASE("measuring X|0> always gives 1") {
    CircuitIR c;
    c.n = 1;
    c.uid = 2;
    c.ops.push_back(PrepInst{{PrepBasis::ZPlus}});
    c.ops.push_back(GateLayerInst{{GateApp(Gate::X, 0)}});
    c.ops.push_back(FinalMeasureInst{0, {}});
    for (const ShotRecord& s : run_shots(c, 50, 7)) CHECK(s.final_bits == 1);
}

TEST_CASE("measuring |+> is a fair coin") {
    CircuitIR c = prep_and_measure(1, {PrepBasis::XPlus});
    uint32_t shots = 10000;
    uint64_t ones = 0;
    for (const ShotRecord& s : run_shots(c, shots, 11)) ones += s.final_bits & 1;
    double mean = static_cast<double>(ones) / shots;
    CHECK(std::abs(mean - 0.5) < 0.015);  // 3 sigma of a fair binomial
}

TEST_CASE("deterministic X noise flips the outcome") {
    CircuitIR c;
    c.n = 1;
    c.uid = 3;
    ProbTable<PauliOp> always_x;
    always_x.entries[PauliOp::from_str("X")] = 1.0;
    c.tables.push_back(SampledTable::build(always_x, 1));
    c.ops.push_back(PrepInst{{PrepBasis::ZPlus}});
    c.ops.push_back(PauliNoiseInst{0});
    c.ops.push_back(FinalMeasureInst{0, {}});
    for (const ShotRecord& s : run_shots(c, 50, 7)) CHECK(s.final_bits == 1);
}

TEST_CASE("repeated measurement is idempotent") {
    CircuitIR c;
    c.n = 1;
    c.uid = 4;
    c.ops.push_back(PrepInst{{PrepBasis::XPlus}});
    c.ops.push_back(McmInst{{0}, 0, 0});
    c.ops.push_back(McmInst{{0}, 1, 0});
    c.ops.push_back(FinalMeasureInst{2, {}});
    for (const ShotRecord& s : run_shots(c, 200, 5)) {
        CHECK(s.mcm_bits[0] == s.mcm_bits[1]);
        CHECK(s.mcm_bits[1] == s.final_bits);
    }
}

TEST_CASE("S twice on |+> lands on |->") {
    // Measure X by rotating with H: the outcome must be deterministically 1.
    CircuitIR c;
    c.n = 1;
    c.uid = 5;
    c.ops.push_back(PrepInst{{PrepBasis::XPlus}});
    c.ops.push_back(GateLayerInst{{GateApp(Gate::S, 0), GateApp(Gate::S, 0)}});
    c.ops.push_back(GateLayerInst{{GateApp(Gate::H, 0)}});
    c.ops.push_back(FinalMeasureInst{0, {}});
    for (const ShotRecord& s : run_shots(c, 50, 7)) CHECK(s.final_bits == 1);
}

TEST_CASE("CZ conjugation on tableau rows") {
    TableauSim t(2);
    t.prep_product({PrepBasis::XPlus, PrepBasis::XPlus});  // stabilizers X0, X1
    t.apply_gate(Gate::CZ, 0, 1);
    // CZ maps X0 -> X0 Z1 and X1 -> Z0 X1; the result is entangled, so the
    // single-qubit X operators leave the group.
    CHECK(t.stabilizer_sign(PauliOp::from_str("XZ")) == 1);
    CHECK(t.stabilizer_sign(PauliOp::from_str("ZX")) == 1);
    CHECK(t.stabilizer_sign(PauliOp::from_str("XI")) == 0);
    CHECK(t.stabilizer_sign(PauliOp::from_str("IX")) == 0);
    CHECK(t.stabilizer_sign(PauliOp::from_str("YY")) == 1);  // product of both
}

TEST_CASE("GHZ measurement correlations") {
    CircuitIR c;
    c.n = 2;
    c.uid = 6;
    c.ops.push_back(PrepInst{{PrepBasis::XPlus, PrepBasis::ZPlus}});
    c.ops.push_back(GateLayerInst{{GateApp(Gate::CX, 0, 1)}});
    c.ops.push_back(McmInst{{0}, 0, 0});
    c.ops.push_back(McmInst{{1}, 1, 0});
    c.ops.push_back(FinalMeasureInst{2, {}});
    uint32_t shots = 4000;
    uint64_t ones = 0;
    for (const ShotRecord& s : run_shots(c, shots, 13)) {
        CHECK(s.mcm_bits[0] == s.mcm_bits[1]);
        ones += s.mcm_bits[0];
    }
    double mean = static_cast<double>(ones) / shots;
    CHECK(std::abs(mean - 0.5) < 0.024);  // 3 sigma
}

TEST_CASE("prep bases are eigenstates of the right operators") {
    struct Case {
        PrepBasis basis;
        const char* op;
        int sign;
    };
    for (const Case& k : {Case{PrepBasis::ZPlus, "Z", 1}, Case{PrepBasis::ZMinus, "Z", -1},
                          Case{PrepBasis::XPlus, "X", 1}, Case{PrepBasis::XMinus, "X", -1},
                          Case{PrepBasis::YPlus, "Y", 1}, Case{PrepBasis::YMinus, "Y", -1}}) {
        TableauSim t(1);
        t.prep_product({k.basis});
        CHECK(t.stabilizer_sign(PauliOp::from_str(k.op)) == k.sign);
    }
}

TEST_CASE("fixed seed reproduces identical records") {
    CircuitIR c;
    c.n = 3;
    c.uid = 99;
    ProbTable<PauliOp> noise;
    noise.entries[PauliOp::from_str("III")] = 0.7;
    noise.entries[PauliOp::from_str("XXI")] = 0.2;
    noise.entries[PauliOp::from_str("IZY")] = 0.1;
    c.tables.push_back(SampledTable::build(noise, 3));
    c.ops.push_back(PrepInst{{PrepBasis::XPlus, PrepBasis::YPlus, PrepBasis::ZPlus}});
    c.ops.push_back(PauliNoiseInst{0});
    c.ops.push_back(GateLayerInst{{GateApp(Gate::CX, 0, 1), GateApp(Gate::H, 2)}});
    c.ops.push_back(McmInst{{1}, 0, 1});
    c.ops.push_back(FinalMeasureInst{1, {}});

    auto a = run_shots(c, 300, 4242);
    auto b = run_shots(c, 300, 4242);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); i++) {
        CHECK(a[i].final_bits == b[i].final_bits);
        CHECK(a[i].mcm_bits == b[i].mcm_bits);
    }
    // Shot streams are addressed, not sequential: any suffix reproduces.
    TableauSim tab(3);
    Philox rng(4242, c.uid, 17);
    ShotRecord r17 = run_one_shot(c, tab, rng, 17);
    CHECK(r17.final_bits == a[17].final_bits);
    CHECK(r17.mcm_bits == a[17].mcm_bits);
}

TEST_CASE("malformed circuits are rejected") {
    CircuitIR c;
    c.n = 2;
    c.ops.push_back(PrepInst{{PrepBasis::ZPlus, PrepBasis::ZPlus}});
    c.ops.push_back(McmInst{{0}, 0, 0});
    c.ops.push_back(McmInst{{1}, 0, 0});  // duplicate record tag
    c.ops.push_back(FinalMeasureInst{9, {}});
    CHECK_THROWS_AS(run_shots(c, 1, 1), std::invalid_argument);

    CircuitIR d;
    d.n = 2;
    d.ops.push_back(PrepInst{{PrepBasis::ZPlus, PrepBasis::ZPlus}});
    d.ops.push_back(CondPauliInst{5, 1, 1, 0});  // dangling record reference
    CHECK_THROWS_AS(run_shots(d, 1, 1), std::invalid_argument);
}

TEST_CASE("simulator matches dense evolution on random noisy MCM circuits") {
    // 50 random <=3 qubit circuits with planted Pauli noise; compare the
    // joint (mcm, final) distribution against exact density-matrix
    // evolution.
    uint32_t shots = 20000;
    for (int trial = 0; trial < 50; trial++) {
        Philox gen(1234, trial, 0);
        uint32_t n = 1 + static_cast<uint32_t>(gen.below(3));
        CircuitIR c;
        c.n = n;
        c.uid = 100 + trial;

        ProbTable<PauliOp> noise;
        double remaining = 1.0;
        for (int t = 0; t < 3; t++) {
            PauliOp p = pauli_from_index(gen.below(1ULL << (2 * n)), n);
            if (p.is_identity()) continue;
            double w = 0.15 * gen.uniform();
            noise.add(p, w);
            remaining -= w;
        }
        noise.add(PauliOp::identity(n), remaining);
        c.tables.push_back(SampledTable::build(noise, n));

        std::vector<PrepBasis> basis;
        for (uint32_t q = 0; q < n; q++) {
            basis.push_back(static_cast<PrepBasis>(gen.below(6)));
        }
        c.ops.push_back(PrepInst{basis});

        uint32_t record = 0;
        for (int depth = 0; depth < 3; depth++) {
            std::vector<GateApp> gates;
            for (uint32_t q = 0; q < n; q++) {
                Gate g = static_cast<Gate>(gen.below(7));  // single-qubit set
                if (g != Gate::I) gates.emplace_back(g, q);
            }
            if (n >= 2 && gen.below(2)) {
                uint32_t a = static_cast<uint32_t>(gen.below(n));
                uint32_t b = (a + 1 + static_cast<uint32_t>(gen.below(n - 1))) % n;
                Gate g2 = gen.below(2) ? Gate::CX : Gate::CZ;
                gates.emplace_back(g2, a, b);
            }
            if (!gates.empty()) c.ops.push_back(GateLayerInst{gates});
            c.ops.push_back(PauliNoiseInst{0});
            McmInst mcm;
            mcm.qubits = {static_cast<uint32_t>(gen.below(n))};
            mcm.record = record++;
            mcm.flip_mask = gen.below(2);
            c.ops.push_back(mcm);
        }
        c.ops.push_back(FinalMeasureInst{record, {}});

        auto exact = testing::dense_circuit_distribution(c);
        std::map<std::vector<uint64_t>, double> empirical;
        run_shots_visit(c, shots, 555 + trial, [&](const ShotRecord& s) {
            std::vector<uint64_t> key = s.mcm_bits;
            key.push_back(s.final_bits);
            empirical[key] += 1.0 / shots;
        });

        double tvd = 0;
        double sigma_scale = 0;
        for (const auto& [key, p] : exact) {
            auto it = empirical.find(key);
            double hat = it == empirical.end() ? 0.0 : it->second;
            tvd += std::abs(hat - p);
            sigma_scale += std::sqrt(p * (1 - p) / shots);
        }
        for (const auto& [key, hat] : empirical) {
            if (!exact.count(key)) tvd += hat;
        }
        tvd *= 0.5;
        sigma_scale *= 0.5;
        CHECK(tvd <= 4 * std::max(sigma_scale, 1e-4));
    }
}
