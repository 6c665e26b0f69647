#include "doctest.h"

#include "qts/errors.hpp"
#include "qts/generalized_inverse.hpp"
#include "qts/solvers.hpp"
#include "test_util.hpp"

using namespace qts;
using test::max_abs_diff;
using test::random_tensor;

namespace {

std::map<std::string, QTensor> random_assignment(Rng& rng, const SlotRegistry& reg) {
    std::map<std::string, QTensor> out;
    for (const auto& slot : reg.all()) out.emplace(slot.name, random_tensor(rng, slot.shape));
    return out;
}

std::map<std::string, QTensor> instantiate_all(const SolveOutcome& outcome,
                                               const std::map<std::string, QTensor>& assignment) {
    std::map<std::string, QTensor> out;
    for (const auto& [name, sol] : outcome.solutions) {
        out.emplace(name, instantiate_solution(sol, assignment));
    }
    return out;
}

} // namespace

TEST_CASE("solve_axb") {
    Rng rng(40);

    SUBCASE("identity coefficients pass the right-hand side through") {
        const QTensor c = random_tensor(rng, TensorShape({2, 2}, {3}));
        const SolveOutcome out =
            solve_axb(identity_tensor({2, 2}), identity_tensor({3}), c);
        REQUIRE(out.consistent);
        CHECK(max_abs_diff(out.solutions.at("X").particular(), c) < 1e-12);
        // L_A = R_B = 0 kill both slots: any assignment returns C exactly
        Rng rng2(41);
        const auto assignment = random_assignment(rng2, *out.slots);
        CHECK(max_abs_diff(instantiate_solution(out.solutions.at("X"), assignment), c) < 1e-12);
    }

    SUBCASE("zero A with nonzero C is inconsistent with residual ||C||") {
        const QTensor a = QTensor::zeros(TensorShape({3}, {2}));
        const QTensor b = random_tensor(rng, TensorShape({2}, {3}));
        const QTensor c = random_tensor(rng, TensorShape({3}, {3}));
        const SolveOutcome out = solve_axb(a, b, c);
        CHECK_FALSE(out.consistent);
        REQUIRE(out.condition_residuals.size() == 2);
        CHECK(out.condition_residuals[0].label == "RA*C");
        CHECK(out.condition_residuals[0].residual == doctest::Approx(c.frobenius_norm()));
    }

    SUBCASE("constructed consistent instance round-trips") {
        const QTensor a = random_tensor(rng, TensorShape({4}, {2}));
        const QTensor x0 = random_tensor(rng, TensorShape({2}, {2}));
        const QTensor b = random_tensor(rng, TensorShape({2}, {5}));
        const QTensor c = einstein_product(einstein_product(a, x0), b);
        const SolveOutcome out = solve_axb(a, b, c);
        REQUIRE(out.consistent);
        const double scale = 1.0 + c.frobenius_norm();

        auto residual = [&](const QTensor& x) {
            return (einstein_product(einstein_product(a, x), b) - c).frobenius_norm();
        };
        CHECK(residual(out.solutions.at("X").particular()) < 1e-9 * scale);
        for (int trial = 0; trial < 5; ++trial) {
            const auto values = random_assignment(rng, *out.slots);
            CHECK(residual(instantiate_solution(out.solutions.at("X"), values)) < 1e-9 * scale);
        }
        // zero assignment reproduces the particular
        CHECK(max_abs_diff(instantiate_solution(out.solutions.at("X"), {}),
                           out.solutions.at("X").particular()) == 0.0);
    }

    SUBCASE("shape mismatch is rejected") {
        const QTensor a = random_tensor(rng, TensorShape({2}, {2}));
        const QTensor b = random_tensor(rng, TensorShape({2}, {2}));
        const QTensor c = random_tensor(rng, TensorShape({3}, {2}));
        CHECK_THROWS_AS(solve_axb(a, b, c), ShapeMismatch);
    }
}

TEST_CASE("solve_two_term") {
    Rng rng(42);
    const TensorShape ash({2, 3}, {3});   // A
    const TensorShape bsh({3}, {7});      // B
    const TensorShape csh({2, 3}, {4});   // C
    const TensorShape dsh({5}, {7});      // D

    SUBCASE("zero right-hand side gives zero particulars") {
        const SolveOutcome out = solve_two_term(
            random_tensor(rng, ash), random_tensor(rng, bsh), random_tensor(rng, csh),
            random_tensor(rng, dsh), QTensor::zeros(TensorShape({2, 3}, {7})));
        REQUIRE(out.consistent);
        CHECK(out.solutions.at("X").particular().is_zero());
        CHECK(out.solutions.at("Y").particular().is_zero());
    }

    SUBCASE("forward-constructed instance is consistent and every slot value solves") {
        const QTensor a = random_tensor(rng, ash), b = random_tensor(rng, bsh);
        const QTensor c = random_tensor(rng, csh), d = random_tensor(rng, dsh);
        const QTensor x0 = random_tensor(rng, TensorShape({3}, {3}));
        const QTensor y0 = random_tensor(rng, TensorShape({4}, {5}));
        const QTensor e = einstein_product(einstein_product(a, x0), b) +
                          einstein_product(einstein_product(c, y0), d);
        const SolveOutcome out = solve_two_term(a, b, c, d, e);
        REQUIRE(out.consistent);
        const double scale = 1.0 + e.frobenius_norm();
        auto residual = [&](const QTensor& x, const QTensor& y) {
            return (einstein_product(einstein_product(a, x), b) +
                    einstein_product(einstein_product(c, y), d) - e)
                .frobenius_norm();
        };
        CHECK(residual(out.solutions.at("X").particular(), out.solutions.at("Y").particular()) <
              1e-9 * scale);
        for (int trial = 0; trial < 8; ++trial) {
            const auto values = random_assignment(rng, *out.slots);
            const auto sol = instantiate_all(out, values);
            CHECK(residual(sol.at("X"), sol.at("Y")) < 1e-9 * scale);
        }
    }

    SUBCASE("C = D = 0 degenerates to the one-term solver") {
        const QTensor a = random_tensor(rng, TensorShape({4}, {2}));
        const QTensor b = random_tensor(rng, TensorShape({2}, {5}));
        const QTensor c0 = QTensor::zeros(TensorShape({4}, {3}));
        const QTensor d0 = QTensor::zeros(TensorShape({3}, {5}));
        const QTensor x0 = random_tensor(rng, TensorShape({2}, {2}));
        const QTensor e = einstein_product(einstein_product(a, x0), b);

        const SolveOutcome two = solve_two_term(a, b, c0, d0, e);
        const SolveOutcome one = solve_axb(a, b, e);
        REQUIRE(two.consistent);
        REQUIRE(one.consistent);
        CHECK(max_abs_diff(two.solutions.at("X").particular(),
                           one.solutions.at("X").particular()) < 1e-14);
        CHECK(two.solutions.at("Y").particular().is_zero());

        // and the degenerate inconsistent case agrees too
        const QTensor bad = e + dematricize(mat_mul(mat_projector_R(matricize(a)),
                                                    matricize(random_tensor(rng, e.shape()))),
                                            e.shape());
        CHECK_FALSE(solve_two_term(a, b, c0, d0, bad).consistent);
        CHECK_FALSE(solve_axb(a, b, bad).consistent);
    }
}

TEST_CASE("solve_mixed") {
    Rng rng(43);
    // shapes chosen so L_P, S, R_Q in the reduced core are all nonzero
    const TensorShape ash({2, 3}, {3});  // A: I x K
    const TensorShape bsh({2}, {7});     // B: O x J
    const TensorShape csh({2, 3}, {2});  // C: I x Q
    const TensorShape dsh({3}, {7});     // D: P x J
    const TensorShape fsh({2, 3}, {2});  // F: I x L
    const TensorShape gsh({2}, {7});     // G: S x J

    SUBCASE("forward-constructed instance") {
        const QTensor a = random_tensor(rng, ash), b = random_tensor(rng, bsh);
        const QTensor c = random_tensor(rng, csh), d = random_tensor(rng, dsh);
        const QTensor f = random_tensor(rng, fsh), g = random_tensor(rng, gsh);
        const QTensor x0 = random_tensor(rng, TensorShape({3}, {7}));
        const QTensor y0 = random_tensor(rng, TensorShape({2, 3}, {2}));
        const QTensor z10 = random_tensor(rng, TensorShape({2}, {3}));
        const QTensor z20 = random_tensor(rng, TensorShape({2}, {2}));
        const QTensor e = einstein_product(a, x0) + einstein_product(y0, b) +
                          einstein_product(einstein_product(c, z10), d) +
                          einstein_product(einstein_product(f, z20), g);

        const SolveOutcome out = solve_mixed(a, b, c, d, f, g, e);
        REQUIRE(out.consistent);
        CHECK(out.condition_residuals.size() == 4);
        const double scale = 1.0 + e.frobenius_norm();
        auto residual = [&](const std::map<std::string, QTensor>& u) {
            return (einstein_product(a, u.at("X")) + einstein_product(u.at("Y"), b) +
                    einstein_product(einstein_product(c, u.at("Z1")), d) +
                    einstein_product(einstein_product(f, u.at("Z2")), g) - e)
                .frobenius_norm();
        };
        std::map<std::string, QTensor> particulars;
        for (const auto& [name, sol] : out.solutions) particulars.emplace(name, sol.particular());
        CHECK(residual(particulars) < 1e-9 * scale);
        // parameter sweep: every assignment must solve the equation
        for (int trial = 0; trial < 20; ++trial) {
            const auto values = random_assignment(rng, *out.slots);
            CHECK(residual(instantiate_all(out, values)) < 1e-9 * scale);
        }
    }

    SUBCASE("C = F = 0, B = 0 reduces to A X = E") {
        const QTensor a = random_tensor(rng, TensorShape({4}, {2}));
        const QTensor b = QTensor::zeros(TensorShape({2}, {3}));
        const QTensor c = QTensor::zeros(TensorShape({4}, {2}));
        const QTensor d = random_tensor(rng, TensorShape({2}, {3}));
        const QTensor f = QTensor::zeros(TensorShape({4}, {2}));
        const QTensor g = random_tensor(rng, TensorShape({2}, {3}));

        const QTensor x0 = random_tensor(rng, TensorShape({2}, {3}));
        const QTensor good = einstein_product(a, x0);
        const SolveOutcome ok = solve_mixed(a, b, c, d, f, g, good);
        REQUIRE(ok.consistent);
        CHECK((einstein_product(a, ok.solutions.at("X").particular()) - good).frobenius_norm() <
              1e-9 * (1.0 + good.frobenius_norm()));

        // push the right-hand side out of range(A): R_A E != 0
        const QTensor noise = random_tensor(rng, good.shape());
        const QTensor bad =
            good + dematricize(mat_mul(mat_projector_R(matricize(a)), matricize(noise)),
                               good.shape());
        CHECK_FALSE(solve_mixed(a, b, c, d, f, g, bad).consistent);
    }
}

TEST_CASE("condition residuals are stable across rank tolerances") {
    Rng rng(44);
    const QTensor a = random_tensor(rng, TensorShape({2, 2}, {3}));
    const QTensor b = random_tensor(rng, TensorShape({2}, {5}));
    const QTensor c = random_tensor(rng, TensorShape({2, 2}, {3}));
    const QTensor d = random_tensor(rng, TensorShape({3}, {5}));
    const QTensor x0 = random_tensor(rng, TensorShape({3}, {2}));
    const QTensor y0 = random_tensor(rng, TensorShape({3}, {3}));
    const QTensor e = einstein_product(einstein_product(a, x0), b) +
                      einstein_product(einstein_product(c, y0), d);

    const SolveOutcome base = solve_two_term(a, b, c, d, e, SolveOptions{1e-8, 1e-12});
    for (double tol : {1e-13, 1e-11, 1e-10}) {
        const SolveOutcome other = solve_two_term(a, b, c, d, e, SolveOptions{1e-8, tol});
        REQUIRE(other.condition_residuals.size() == base.condition_residuals.size());
        for (std::size_t i = 0; i < base.condition_residuals.size(); ++i) {
            CHECK(std::abs(base.condition_residuals[i].residual -
                           other.condition_residuals[i].residual) < 1e-9 * base.rhs_scale);
        }
        CHECK(other.consistent == base.consistent);
    }
}

TEST_CASE("instantiate_solution rejects bad slot values") {
    Rng rng(45);
    const QTensor a = random_tensor(rng, TensorShape({4}, {2}));
    const QTensor b = random_tensor(rng, TensorShape({2}, {4}));
    const QTensor x0 = random_tensor(rng, TensorShape({2}, {2}));
    const QTensor c = einstein_product(einstein_product(a, x0), b);
    const SolveOutcome out = solve_axb(a, b, c);
    REQUIRE(out.consistent);

    std::map<std::string, QTensor> wrong_shape{
        {"U", random_tensor(rng, TensorShape({3}, {2}))}};
    CHECK_THROWS_AS(instantiate_solution(out.solutions.at("X"), wrong_shape), ShapeMismatch);

    std::map<std::string, QTensor> unknown_name{
        {"NOPE", random_tensor(rng, TensorShape({2}, {2}))}};
    CHECK_THROWS_AS(instantiate_solution(out.solutions.at("X"), unknown_name), ShapeMismatch);
}
