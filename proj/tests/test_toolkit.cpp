#include "doctest.h"

#include "qts/errors.hpp"
#include "qts/io.hpp"
#include "qts/toolkit.hpp"
#include "test_util.hpp"

using namespace qts;

namespace {

InstanceSpec spec_of(SystemKind kind, std::uint64_t seed) {
    InstanceSpec s;
    s.kind = kind;
    s.seed = seed;
    switch (kind) {
        case SystemKind::axb:
            s.modes = {{"I", {4}}, {"J", {2}}, {"K", {2}}, {"L", {5}}};
            break;
        case SystemKind::two_term:
            s.modes = {{"I", {2, 3}}, {"J", {3}}, {"K", {3}}, {"L", {7}}, {"Q", {4}}, {"H", {5}}};
            break;
        case SystemKind::mixed:
            s.modes = {{"I", {2, 3}}, {"K", {3}}, {"O", {2}}, {"J", {7}},
                       {"Q", {2}},    {"P", {3}}, {"L", {2}}, {"S", {2}}};
            break;
        case SystemKind::triple:
            s.modes = {{"I", {4}}, {"K", {2}}, {"O", {2}}, {"J", {4}}, {"Q", {2}}, {"P", {2}}};
            break;
        case SystemKind::chain:
            s.modes = {{"I", {3}}, {"J", {3}}, {"Q", {2}}, {"P", {2}}};
            break;
    }
    return s;
}

} // namespace

TEST_CASE("gen_consistent produces verifiable witnesses deterministically") {
    for (SystemKind kind : {SystemKind::axb, SystemKind::two_term, SystemKind::mixed,
                            SystemKind::triple, SystemKind::chain}) {
        INFO("kind ", to_string(kind));
        const Instance inst = gen_consistent(spec_of(kind, 7));
        REQUIRE_FALSE(inst.witness.empty());
        const ResidualReport rep = verify_solution(inst, inst.witness);
        CHECK(rep.max_ratio() < 1e-10);

        // determinism: byte-identical JSON for the same seed
        const Instance again = gen_consistent(spec_of(kind, 7));
        CHECK(io::instance_to_json(inst).dump() == io::instance_to_json(again).dump());
        const Instance other = gen_consistent(spec_of(kind, 8));
        CHECK(io::instance_to_json(inst).dump() != io::instance_to_json(other).dump());
    }
}

TEST_CASE("gen_consistent smallest case: all modes 1") {
    InstanceSpec s;
    s.kind = SystemKind::axb;
    s.modes = {{"I", {1}}, {"J", {1}}, {"K", {1}}, {"L", {1}}};
    s.seed = 3;
    const Instance inst = gen_consistent(s);
    CHECK(verify_solution(inst, inst.witness).max_ratio() < 1e-12);
    CHECK(solve_instance(inst).consistent);
}

TEST_CASE("gen_inconsistent is rejected by solver and oracle") {
    for (SystemKind kind : {SystemKind::axb, SystemKind::two_term, SystemKind::mixed,
                            SystemKind::triple, SystemKind::chain}) {
        INFO("kind ", to_string(kind));
        const Instance inst = gen_inconsistent(spec_of(kind, 11));
        const SolveOutcome out = solve_instance(inst);
        CHECK_FALSE(out.consistent);
        const auto bad = out.violated();
        REQUIRE_FALSE(bad.empty());
        double worst = 0.0;
        for (const auto& v : bad) worst = std::max(worst, v.residual);
        CHECK(worst >= 0.5); // unit-norm violation lands on one condition
        const OracleResult oracle = oracle_solve(inst);
        CHECK_FALSE(oracle.consistent);
        CHECK(oracle.residual > 1e-3);
    }
}

TEST_CASE("verify_solution flags wrong unknowns") {
    Rng rng(60);
    const Instance inst = gen_consistent(spec_of(SystemKind::two_term, 21));
    CHECK(verify_solution(inst, inst.witness).max_ratio() < 1e-10);

    auto wrong = inst.witness;
    wrong.at("X") = wrong.at("X") + random_tensor(rng, wrong.at("X").shape());
    CHECK(verify_solution(inst, wrong).max_ratio() > 1e-2);

    // zero unknowns against zero right-hand sides
    Instance zero_inst = inst;
    for (auto& e : zero_inst.rhs) e = QTensor::zeros(e.shape());
    std::map<std::string, QTensor> zeros;
    for (const auto& [name, t] : inst.witness) zeros.emplace(name, QTensor::zeros(t.shape()));
    CHECK(verify_solution(zero_inst, zeros).max_ratio() == 0.0);
}

TEST_CASE("oracle agrees with the solver on many small instances") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (SystemKind kind : {SystemKind::axb, SystemKind::two_term}) {
            const Instance good = gen_consistent(spec_of(kind, seed));
            const Instance bad = gen_inconsistent(spec_of(kind, seed));
            CHECK(solve_instance(good).consistent == oracle_solve(good).consistent);
            CHECK(solve_instance(bad).consistent == oracle_solve(bad).consistent);
            CHECK(oracle_solve(good).consistent);
            CHECK_FALSE(oracle_solve(bad).consistent);
            checked += 2;
        }
    }
    CHECK(checked == 80);
}

TEST_CASE("oracle edge cases") {
    // zero map, zero rhs -> consistent; zero map, nonzero rhs -> residual = ||e||
    InstanceSpec s = spec_of(SystemKind::axb, 5);
    Instance inst = gen_consistent(s);
    const TensorShape ashape = inst.coeff("A").shape();
    const TensorShape bshape = inst.coeff("B").shape();
    inst.coefficients.at("A") = QTensor::zeros(ashape);
    inst.coefficients.at("B") = QTensor::zeros(bshape);
    inst.rhs[0] = QTensor::zeros(inst.rhs[0].shape());
    CHECK(oracle_solve(inst).consistent);

    Rng rng(61);
    inst.rhs[0] = test::random_tensor(rng, inst.rhs[0].shape());
    const OracleResult r = oracle_solve(inst);
    CHECK_FALSE(r.consistent);
    CHECK(r.residual == doctest::Approx(inst.rhs[0].frobenius_norm()));

    // the real-dimension guard
    InstanceSpec big = spec_of(SystemKind::axb, 1);
    big.modes = {{"I", {8}}, {"J", {16}}, {"K", {16}}, {"L", {8}}};
    const Instance bi = gen_consistent(big);
    CHECK_THROWS_AS(oracle_solve(bi, 1e-6, 512), SizeExceeded);
}

TEST_CASE("conditioned coefficients expose the spread knob") {
    InstanceSpec s = spec_of(SystemKind::axb, 9);
    s.conditioning = 1e3;
    const Instance inst = gen_consistent(s);
    CHECK(verify_solution(inst, inst.witness).max_ratio() < 1e-9);
    // spread shows up in the matricized coefficient's extreme singular values:
    // sigma_max/sigma_min ~ conditioning
    const QMatrix a = matricize(inst.coeff("A"));
    const QMatrix ad = mat_pinv(a);
    // ||A||_2 >= sigma_max >= ||A||_F/sqrt(r); 1/||A^+||_2 <= sigma_min
    const double smax_lb = a.frobenius_norm() / std::sqrt(2.0);
    const double smin_ub = 1.0; // unit top singular value by construction
    CHECK(smax_lb <= smin_ub + 1e-9); // sanity: profile is anchored at 1
    CHECK(ad.frobenius_norm() > 1e2); // pinv blows up with the spread
}
