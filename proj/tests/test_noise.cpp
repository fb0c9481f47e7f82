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

#include "mcmlab/noise_model.hpp"

#include <cmath>

#include "doctest.h"
#include "support/dense_oracle.hpp"

using namespace mcmlab;

namespace {

MCMLayerSpec idle_layer(uint32_t n, std::vector<uint32_t> measured) {
    MCMLayerSpec layer;
    layer.n = n;
    layer.measured = std::move(measured);
    return layer;
}

/// The m=1, no-unmeasured-qubit flip-pattern fixture.
USI fixture_usi_m1() {
    USI usi;
    usi.layer = idle_layer(1, {0});
    PauliOp empty = PauliOp::identity(0);
    usi.q.entries[UsiKey(0, 0, empty)] = 0.9;
    usi.q.entries[UsiKey(1, 0, empty)] = 0.05;
    usi.q.entries[UsiKey(0, 1, empty)] = 0.03;
    usi.q.entries[UsiKey(1, 1, empty)] = 0.02;
    return usi;
}

RawInstrumentModel random_sparse_model(const MCMLayerSpec& layer, double p, uint64_t seed) {
    Philox rng(seed, 0xfeed, 0);
    SamplerSpec spec;
    spec.recipe = SamplerRecipe::Sparse;
    spec.p = p;
    return sample_random_usi(layer, spec, rng);
}

}  // namespace

TEST_CASE("lambda eigenvalues of simple q tables") {
    MCMLayerSpec layer = idle_layer(2, {0});
    PauliOp id1 = PauliOp::identity(1);

    USI noiseless;
    noiseless.layer = layer;
    noiseless.q.entries[UsiKey(0, 0, id1)] = 1.0;
    for (uint64_t pi = 0; pi < 4; pi++) {
        CHECK(lambda_eigenvalue(noiseless, 0, 0, pauli_from_index(pi, 1)) == 1.0);
        CHECK(lambda_eigenvalue(noiseless, 1, 0, pauli_from_index(pi, 1)) == 0.0);
    }

    USI flips;
    flips.layer = layer;
    flips.q.entries[UsiKey(0, 0, id1)] = 0.9;
    flips.q.entries[UsiKey(1, 0, id1)] = 0.1;
    for (uint64_t pi = 0; pi < 4; pi++) {
        CHECK(lambda_eigenvalue(flips, 1, 0, pauli_from_index(pi, 1)) ==
              doctest::Approx(0.1).epsilon(1e-15));
    }

    USI zerr;
    zerr.layer = layer;
    zerr.q.entries[UsiKey(0, 0, PauliOp::from_str("I"))] = 0.9;
    zerr.q.entries[UsiKey(0, 0, PauliOp::from_str("Z"))] = 0.1;
    CHECK(lambda_eigenvalue(zerr, 0, 0, PauliOp::from_str("X")) ==
          doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("lambda tilde table of the m=1 fixture") {
    USI usi = fixture_usi_m1();
    LambdaTildeTable lt = lambda_tilde_table(usi);
    PauliOp empty = PauliOp::identity(0);
    CHECK(lt.at(empty, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lt.at(empty, 1, 0) == doctest::Approx(0.86).epsilon(1e-14));
    CHECK(lt.at(empty, 0, 1) == doctest::Approx(0.90).epsilon(1e-14));
    CHECK(lt.at(empty, 1, 1) == doctest::Approx(0.84).epsilon(1e-14));
}

TEST_CASE("lambda tilde of a noiseless instrument is all ones") {
    USI usi;
    usi.layer = idle_layer(3, {0, 2});
    usi.q.entries[UsiKey(0, 0, PauliOp::identity(1))] = 1.0;
    LambdaTildeTable lt = lambda_tilde_table(usi);
    for (double v : lt.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("lambda tilde at (0,0) is the sum over flip patterns") {
    MCMLayerSpec layer = idle_layer(3, {1});
    RawInstrumentModel model = random_sparse_model(layer, 0.12, 5);
    USI usi = usi_from_raw(model);
    LambdaTildeTable lt = lambda_tilde_table(usi);
    for (uint64_t pi = 0; pi < 16; pi++) {
        PauliOp p = pauli_from_index(pi, 2);
        double direct = 0;
        for (uint64_t a = 0; a < 2; a++) {
            for (uint64_t b = 0; b < 2; b++) direct += lambda_eigenvalue(usi, a, b, p);
        }
        CHECK(lt.at(p, 0, 0) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("usi fidelity agrees between q-lookup and the transform sum") {
    USI fixture = fixture_usi_m1();
    CHECK(usi_fidelity(fixture) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(usi_fidelity_from_lambda(lambda_tilde_table(fixture)) ==
          doctest::Approx(0.9).epsilon(1e-12));

    for (uint64_t trial = 0; trial < 100; trial++) {
        MCMLayerSpec layer = idle_layer(3, trial % 2 ? std::vector<uint32_t>{0}
                                                     : std::vector<uint32_t>{0, 2});
        RawInstrumentModel model = random_sparse_model(layer, 0.02 + 0.002 * trial, 100 + trial);
        USI usi = usi_from_raw(model);
        double via_q = usi_fidelity(usi);
        double via_lambda = usi_fidelity_from_lambda(lambda_tilde_table(usi));
        CHECK(std::abs(via_q - via_lambda) < 1e-10);
    }
}

TEST_CASE("usi_from_raw single-branch convolutions") {
    MCMLayerSpec layer = idle_layer(2, {0});

    // Pre-measurement X on the measured qubit becomes the flip pattern a.
    RawInstrumentModel pre;
    pre.layer = layer;
    pre.e_pre.entries[PauliOp::from_str("II")] = 0.9;
    pre.e_pre.entries[PauliOp::from_str("XI")] = 0.1;
    pre.t_mid.entries[PauliOp::identity(1)] = 1.0;
    pre.e_post.entries[PauliOp::identity(2)] = 1.0;
    USI u1 = usi_from_raw(pre);
    CHECK(u1.q.get(UsiKey(0, 0, PauliOp::identity(1))) == doctest::Approx(0.9));
    CHECK(u1.q.get(UsiKey(1, 0, PauliOp::identity(1))) == doctest::Approx(0.1));

    // Post-measurement Z on the measured qubit is invisible.
    RawInstrumentModel post;
    post.layer = layer;
    post.e_pre.entries[PauliOp::identity(2)] = 1.0;
    post.t_mid.entries[PauliOp::identity(1)] = 1.0;
    post.e_post.entries[PauliOp::from_str("II")] = 0.95;
    post.e_post.entries[PauliOp::from_str("ZI")] = 0.05;
    USI u2 = usi_from_raw(post);
    CHECK(u2.q.get(UsiKey(0, 0, PauliOp::identity(1))) == doctest::Approx(1.0));
    CHECK(u2.q.entries.size() == 1);

    // Mid-circuit unmeasured error passes straight through.
    RawInstrumentModel mid;
    mid.layer = layer;
    mid.e_pre.entries[PauliOp::identity(2)] = 1.0;
    mid.t_mid.entries[PauliOp::from_str("I")] = 0.99;
    mid.t_mid.entries[PauliOp::from_str("X")] = 0.01;
    mid.e_post.entries[PauliOp::identity(2)] = 1.0;
    USI u3 = usi_from_raw(mid);
    CHECK(u3.q.get(UsiKey(0, 0, PauliOp::from_str("I"))) == doctest::Approx(0.99));
    CHECK(u3.q.get(UsiKey(0, 0, PauliOp::from_str("X"))) == doctest::Approx(0.01));
}

TEST_CASE("usi_from_raw rejects conditioned models") {
    MCMLayerSpec layer = idle_layer(2, {0});
    RawInstrumentModel model;
    model.layer = layer;
    model.e_pre.entries[PauliOp::identity(2)] = 1.0;
    model.t_mid.entries[PauliOp::identity(1)] = 1.0;
    model.e_post.entries[PauliOp::identity(2)] = 1.0;
    CondError cond;
    cond.mask = 1;
    cond.value = 1;
    cond.table.entries[PauliOp::identity(2)] = 1.0;
    model.conditioned.push_back(cond);
    CHECK_THROWS_AS(usi_from_raw(model), std::invalid_argument);
}

TEST_CASE("sparse sampler hits its component infidelities") {
    MCMLayerSpec layer = idle_layer(5, {0});

    Philox rng0(42, 0, 0);
    SamplerSpec zero;
    zero.p = 0;
    RawInstrumentModel none = sample_random_usi(layer, zero, rng0);
    CHECK(none.e_pre.entries.size() == 1);
    CHECK(none.t_mid.entries.size() == 1);
    CHECK(usi_fidelity(usi_from_raw(none)) == doctest::Approx(1.0));

    Philox rng(43, 0, 0);
    SamplerSpec spec;
    spec.p = 0.06;
    RawInstrumentModel model = sample_random_usi(layer, spec, rng);
    // 3^{n-m} = 81 error locations per channel, infidelities 2:1:1.
    CHECK(model.t_mid.entries.size() == 82);
    CHECK(1.0 - model.t_mid.get(PauliOp::identity(4)) == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(1.0 - model.e_pre.get(PauliOp::identity(5)) == doctest::Approx(0.015).epsilon(1e-12));
    CHECK(1.0 - model.e_post.get(PauliOp::identity(5)) == doctest::Approx(0.015).epsilon(1e-12));
    for (const auto& [p, v] : model.e_pre.entries) {
        if (!p.is_identity()) CHECK((p.support() & 1) != 0);  // touches the measured qubit
    }
    double f = usi_fidelity(usi_from_raw(model));
    CHECK(f == doctest::Approx(1.0 - 0.06).epsilon(0.003));

    // Requesting more terms than Paulis exist must fail.
    SamplerSpec infeasible;
    infeasible.p = 0.01;
    infeasible.num_terms = 5000;
    Philox rng2(44, 0, 0);
    CHECK_THROWS_AS(sample_random_usi(idle_layer(2, {0}), infeasible, rng2),
                    std::invalid_argument);
}

TEST_CASE("spam sampler hits the requested means") {
    Philox rng(7, 0, 0);
    SpamSpec spam = sample_spam(6, 0.005, 0.01, rng);
    double prep_mean = 0, meas_mean = 0;
    for (double v : spam.prep) prep_mean += v / 6;
    for (double v : spam.meas) meas_mean += v / 6;
    CHECK(prep_mean == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(meas_mean == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("rc fidelity matches the usi fidelity on unconditioned models") {
    for (uint64_t trial = 0; trial < 100; trial++) {
        MCMLayerSpec layer = idle_layer(3, trial % 2 ? std::vector<uint32_t>{1}
                                                     : std::vector<uint32_t>{0, 1});
        RawInstrumentModel model = random_sparse_model(layer, 0.15, 900 + trial);
        CHECK(std::abs(rc_fidelity_from_raw(model) - usi_fidelity(usi_from_raw(model))) < 1e-10);
        CHECK(std::abs(instrument_fidelity_eq3(model) - rc_fidelity_from_raw(model)) < 1e-10);
    }
}

TEST_CASE("rc fidelity of the outcome-conditioned flip model") {
    // Apply X on the measured qubit after the MCM iff the outcome was 1.
    MCMLayerSpec layer = idle_layer(1, {0});
    RawInstrumentModel model;
    model.layer = layer;
    model.e_pre.entries[PauliOp::from_str("I")] = 1.0;
    model.t_mid.entries[PauliOp::identity(0)] = 1.0;
    model.e_post.entries[PauliOp::from_str("I")] = 1.0;
    CondError cond;
    cond.mask = 1;
    cond.value = 1;
    cond.table.entries[PauliOp::from_str("X")] = 1.0;
    model.conditioned.push_back(cond);

    CHECK(rc_fidelity_from_raw(model) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(instrument_fidelity_eq3(model) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("noiseless model scores 1 in both fidelity formulas") {
    MCMLayerSpec layer = idle_layer(2, {1});
    RawInstrumentModel model;
    model.layer = layer;
    model.e_pre.entries[PauliOp::identity(2)] = 1.0;
    model.t_mid.entries[PauliOp::identity(1)] = 1.0;
    model.e_post.entries[PauliOp::identity(2)] = 1.0;
    CHECK(rc_fidelity_from_raw(model) == doctest::Approx(1.0));
    CHECK(instrument_fidelity_eq3(model) == doctest::Approx(1.0));
}

namespace {

RawInstrumentModel random_conditioned_model(uint32_t n, std::vector<uint32_t> measured,
                                            uint64_t seed) {
    MCMLayerSpec layer = idle_layer(n, std::move(measured));
    RawInstrumentModel model = random_sparse_model(layer, 0.1, seed);
    model.spam = SpamSpec{};
    Philox rng(seed, 0xc01d, 0);
    uint32_t m = layer.m();
    for (uint64_t k = 0; k < (1ULL << m); k++) {
        if (rng.below(2) == 0) continue;
        CondError cond;
        cond.mask = (1ULL << m) - 1;
        cond.value = k;
        double p = 0.3 * rng.uniform();
        PauliOp err = PauliOp::identity(n);
        while (err.is_identity()) {
            err = pauli_from_index(rng.below(1ULL << (2 * n)), n);
        }
        cond.table.entries[PauliOp::identity(n)] = 1 - p;
        cond.table.entries[err] = p;
        model.conditioned.push_back(std::move(cond));
    }
    return model;
}

}  // namespace

TEST_CASE("branch bookkeeping matches the dense PTM oracle") {
    // Validates the Frobenius-overlap branch values and both fidelity
    // formulas against brute-force PTMs, on conditioned models up to n=2.
    for (uint64_t trial = 0; trial < 6; trial++) {
        uint32_t n = trial % 2 ? 2 : 1;
        RawInstrumentModel model = random_conditioned_model(
            n, n == 1 ? std::vector<uint32_t>{0} : std::vector<uint32_t>{1}, 3000 + trial);
        uint32_t m = model.layer.m();
        uint32_t nm = model.layer.num_unmeasured();

        std::vector<double> overlaps = branch_overlaps(model);
        double frob_sum = 0;
        double root_sum = 0;
        for (uint64_t k = 0; k < (1ULL << m); k++) {
            testing::RealMat mk = testing::branch_ptm_raw(model, k);
            testing::RealMat lk = testing::branch_ptm_ideal(model.layer, k);
            double frob = (mk.array() * lk.array()).sum();
            double expected_overlap = frob / std::pow(4.0, nm);
            CHECK(overlaps[k] == doctest::Approx(expected_overlap).epsilon(1e-10));
            frob_sum += frob;
            root_sum += std::sqrt(std::max(frob, 0.0) / std::pow(4.0, nm));
        }
        double eq16_dense = frob_sum / (std::pow(2.0, m) * std::pow(4.0, nm));
        double eq3_dense = root_sum * root_sum / std::pow(4.0, m);
        CHECK(rc_fidelity_from_raw(model) == doctest::Approx(eq16_dense).epsilon(1e-10));
        CHECK(instrument_fidelity_eq3(model) == doctest::Approx(eq3_dense).epsilon(1e-10));

        // Verified ordering: the compiled-instrument fidelity dominates the
        // square-root branch formula, with equality iff the branch overlaps
        // coincide (Cauchy-Schwarz over outcomes).
        CHECK(instrument_fidelity_eq3(model) <= rc_fidelity_from_raw(model) + 1e-12);
    }
}

TEST_CASE("twirled dense PTM matches the analytic q-table") {
    // The full randomized-compiling average, branch by branch, against
    // lambda-tilde of usi_from_raw. Pins the PTM structure: elements vanish
    // off the (V[P], Z-type) pattern and carry the (-1)^{k.(c+c')} sign.
    MCMLayerSpec layer;
    layer.n = 2;
    layer.measured = {0};
    layer.v_gates = {GateApp(Gate::H, 1)};

    RawInstrumentModel model = random_sparse_model(layer, 0.2, 777);
    model.spam = SpamSpec{};
    USI usi = usi_from_raw(model);
    LambdaTildeTable lt = lambda_tilde_table(usi);

    uint32_t n = layer.n, m = layer.m();
    for (uint64_t k = 0; k < (1ULL << m); k++) {
        testing::RealMat twirled = testing::branch_ptm_twirled(model, k);
        for (uint64_t col = 0; col < (1ULL << (2 * n)); col++) {
            PauliOp in = pauli_from_index(col, n);
            PauliOp in_u, in_m;
            layer.split(in, &in_u, &in_m);
            for (uint64_t row = 0; row < (1ULL << (2 * n)); row++) {
                PauliOp out = pauli_from_index(row, n);
                PauliOp out_u, out_m;
                layer.split(out, &out_u, &out_m);
                double got = twirled(row, col);
                // Non-Z measured parts and mismatched unmeasured parts must
                // vanish.
                bool in_z = in_m.x == 0;
                bool out_z = out_m.x == 0;
                bool sign = false;
                PauliOp vp = conjugate_pauli(in_u, layer.v_gates_local(), &sign);
                if (!in_z || !out_z || !(vp == out_u)) {
                    CHECK(std::abs(got) < 1e-12);
                    continue;
                }
                uint64_t c = in_m.z, cp = out_m.z;
                double expect = lt.at(vp, c, cp) / std::pow(2.0, m);
                if (dot2(k, c ^ cp)) expect = -expect;
                if (sign) expect = -expect;
                CHECK(got == doctest::Approx(expect).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("tracing out the classical register collapses to the diagonal") {
    MCMLayerSpec layer;
    layer.n = 2;
    layer.measured = {0};
    RawInstrumentModel model = random_sparse_model(layer, 0.15, 778);
    model.spam = SpamSpec{};
    USI usi = usi_from_raw(model);
    LambdaTildeTable lt = lambda_tilde_table(usi);

    uint32_t m = layer.m();
    std::vector<testing::RealMat> twirled;
    for (uint64_t k = 0; k < (1ULL << m); k++) {
        twirled.push_back(testing::branch_ptm_twirled(model, k));
    }
    for (uint64_t pi = 0; pi < 4; pi++) {
        PauliOp p = pauli_from_index(pi, 1);
        for (uint64_t c = 0; c < 2; c++) {
            for (uint64_t cp = 0; cp < 2; cp++) {
                uint64_t col = pauli_index(layer.embed(p, c));
                uint64_t row = pauli_index(layer.embed(p, cp));
                double summed = 0;
                for (const auto& mk : twirled) summed += mk(row, col);
                double expect = (c == cp) ? lt.at(p, c, cp) : 0.0;
                CHECK(summed == doctest::Approx(expect).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("general V factors out of the USI") {
    MCMLayerSpec layer;
    layer.n = 2;
    layer.measured = {0};
    layer.v_gates = {GateApp(Gate::H, 1)};
    RawInstrumentModel model = random_sparse_model(layer, 0.1, 779);
    USI usi = usi_from_raw(model);
    auto [prime, v] = decompose_general_v(usi);
    CHECK(prime.layer.v_gates.empty());
    CHECK(v == layer.v_gates);
    CHECK(prime.q.entries == usi.q.entries);
    // The twirled-PTM test above pins the element convention: column P maps
    // to row V[P] with M-prime's lambda-tilde evaluated at V[P].
}

TEST_CASE("v_even_order on representative gate sets") {
    MCMLayerSpec idle = idle_layer(3, {0});
    CHECK(idle.v_even_order() == 2);

    MCMLayerSpec hadamard;
    hadamard.n = 2;
    hadamard.measured = {0};
    hadamard.v_gates = {GateApp(Gate::H, 1)};
    CHECK(hadamard.v_even_order() == 2);

    MCMLayerSpec phase;
    phase.n = 2;
    phase.measured = {0};
    phase.v_gates = {GateApp(Gate::S, 1)};
    // S has superoperator order 4 (S^2 flips the sign of X).
    CHECK(phase.v_even_order() == 4);

    MCMLayerSpec cz;
    cz.n = 3;
    cz.measured = {0};
    cz.v_gates = {GateApp(Gate::CZ, 1, 2)};
    CHECK(cz.v_even_order() == 2);
}
