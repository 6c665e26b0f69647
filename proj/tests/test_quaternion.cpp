#include "doctest.h"

#include "qts/quaternion.hpp"
#include "qts/rng.hpp"

using namespace qts;

namespace {

// Reference multiplication through the structure constants forced by
// i^2 = j^2 = k^2 = ijk = -1, independent of qmul's component formula.
// basis_table[s][t] = e_s * e_t as (sign, basis index).
struct BasisProduct {
    int sign;
    int idx;
};
constexpr BasisProduct kTable[4][4] = {
    {{1, 0}, {1, 1}, {1, 2}, {1, 3}},
    {{1, 1}, {-1, 0}, {1, 3}, {-1, 2}},
    {{1, 2}, {-1, 3}, {-1, 0}, {1, 1}},
    {{1, 3}, {1, 2}, {-1, 1}, {-1, 0}},
};

Quaternion ref_mul(const Quaternion& a, const Quaternion& b) {
    const double ac[4] = {a.w, a.x, a.y, a.z};
    const double bc[4] = {b.w, b.x, b.y, b.z};
    double out[4] = {0, 0, 0, 0};
    for (int s = 0; s < 4; ++s) {
        for (int t = 0; t < 4; ++t) {
            out[kTable[s][t].idx] += kTable[s][t].sign * ac[s] * bc[t];
        }
    }
    return {out[0], out[1], out[2], out[3]};
}

Quaternion basis(int s) {
    Quaternion q;
    (s == 0 ? q.w : s == 1 ? q.x : s == 2 ? q.y : q.z) = 1.0;
    return q;
}

} // namespace

TEST_CASE("basis multiplication table") {
    for (int s = 0; s < 4; ++s) {
        for (int t = 0; t < 4; ++t) {
            const Quaternion got = qmul(basis(s), basis(t));
            const Quaternion want = ref_mul(basis(s), basis(t));
            CHECK(got == want);
        }
    }
    CHECK(qmul(Quaternion::i(), Quaternion::j()) == Quaternion::k());
    CHECK(qmul(Quaternion::j(), Quaternion::i()) == -Quaternion::k());
    // ijk = -1
    CHECK(qmul(qmul(Quaternion::i(), Quaternion::j()), Quaternion::k()) == Quaternion(-1.0));
}

TEST_CASE("identity and reference agreement on random values") {
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const Quaternion a = rng.quaternion();
        const Quaternion b = rng.quaternion();
        CHECK(qmul(Quaternion::one(), a) == a);
        CHECK(qmul(a, Quaternion::one()) == a);
        const Quaternion got = qmul(a, b);
        const Quaternion want = ref_mul(a, b);
        CHECK((got - want).abs() <= 1e-14 * (1.0 + want.abs()));
    }
}

TEST_CASE("conjugation") {
    CHECK(qconj(Quaternion{1, 2, 3, 4}) == Quaternion{1, -2, -3, -4});
    CHECK(qconj(Quaternion{2.5, 0, 0, 0}) == Quaternion{2.5, 0, 0, 0});
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const Quaternion a = rng.quaternion();
        const Quaternion b = rng.quaternion();
        CHECK(qconj(qconj(a)) == a);
        const Quaternion lhs = qconj(qmul(a, b));
        const Quaternion rhs = qmul(qconj(b), qconj(a));
        CHECK((lhs - rhs).abs() <= 1e-13 * (1.0 + rhs.abs()));
    }
}

TEST_CASE("inverse") {
    CHECK(qinv(Quaternion::i()) == -Quaternion::i());
    CHECK(qinv(Quaternion(2.0)) == Quaternion(0.5));
    CHECK_THROWS_AS(qinv(Quaternion{}), ZeroDivision);
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Quaternion q = rng.quaternion();
        q = q * (1.0 / q.abs()); // unit
        CHECK((qinv(q) - qconj(q)).abs() <= 1e-14);
        CHECK((qmul(q, qinv(q)) - Quaternion::one()).abs() <= 1e-15 * 4);
    }
}

TEST_CASE("algebra properties") {
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const Quaternion a = rng.quaternion();
        const Quaternion b = rng.quaternion();
        const Quaternion c = rng.quaternion();
        const Quaternion lhs = qmul(qmul(a, b), c);
        const Quaternion rhs = qmul(a, qmul(b, c));
        CHECK((lhs - rhs).abs() <= 1e-13 * (1.0 + rhs.abs()));
        CHECK(qmul(a, b).abs() == doctest::Approx(a.abs() * b.abs()).epsilon(1e-12));
        // distributivity
        const Quaternion d1 = qmul(a, b + c);
        const Quaternion d2 = qmul(a, b) + qmul(a, c);
        CHECK((d1 - d2).abs() <= 1e-13 * (1.0 + d2.abs()));
    }
}
