#include "doctest.h"

#include "qts/complex_adjoint.hpp"
#include "qts/errors.hpp"
#include "qts/qmatrix.hpp"
#include "test_util.hpp"

using namespace qts;
using test::max_abs_diff;
using test::random_matrix;

namespace {

QMatrix naive_mul(const QMatrix& a, const QMatrix& b) {
    QMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Quaternion s;
            for (std::size_t k = 0; k < a.cols(); ++k) s += qmul(a.at(i, k), b.at(k, j));
            out.at(i, j) = s;
        }
    return out;
}

double cplx_diff(const ComplexAdjoint& a, const ComplexAdjoint& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

} // namespace

TEST_CASE("mat_mul basics") {
    QMatrix a(1, 1), b(1, 1);
    a.at(0, 0) = Quaternion::i();
    b.at(0, 0) = Quaternion::j();
    CHECK(mat_mul(a, b).at(0, 0) == Quaternion::k());

    Rng rng(5);
    const QMatrix m = random_matrix(rng, 3, 4);
    CHECK(max_abs_diff(mat_mul(m, QMatrix::identity(4)), m) == 0.0);

    const QMatrix x = random_matrix(rng, 3, 2);
    const QMatrix y = random_matrix(rng, 2, 4);
    CHECK(max_abs_diff(mat_mul(x, y), naive_mul(x, y)) < 1e-13);

    CHECK_THROWS_AS(mat_mul(x, x), ShapeMismatch);
}

TEST_CASE("conj_transpose") {
    QMatrix a(1, 1);
    a.at(0, 0) = Quaternion::i();
    CHECK(conj_transpose(a).at(0, 0) == -Quaternion::i());

    Rng rng(6);
    const QMatrix x = random_matrix(rng, 3, 2);
    const QMatrix y = random_matrix(rng, 2, 4);
    CHECK(max_abs_diff(conj_transpose(mat_mul(x, y)),
                       mat_mul(conj_transpose(y), conj_transpose(x))) < 1e-12);
    CHECK(max_abs_diff(conj_transpose(conj_transpose(x)), x) == 0.0);

    // real symmetric fixed point
    QMatrix s(2, 2);
    s.at(0, 0) = 1.0;
    s.at(0, 1) = 2.0;
    s.at(1, 0) = 2.0;
    s.at(1, 1) = -3.0;
    CHECK(max_abs_diff(conj_transpose(s), s) == 0.0);
}

TEST_CASE("complex adjoint is a *-homomorphism") {
    QMatrix one(1, 1);
    one.at(0, 0) = Quaternion::one();
    const ComplexAdjoint c1 = to_complex_adjoint(one);
    CHECK(c1.at(0, 0) == std::complex<double>(1, 0));
    CHECK(c1.at(1, 1) == std::complex<double>(1, 0));
    CHECK(c1.at(0, 1) == std::complex<double>(0, 0));

    QMatrix jm(1, 1);
    jm.at(0, 0) = Quaternion::j();
    const ComplexAdjoint cj = to_complex_adjoint(jm);
    CHECK(cj.at(0, 0) == std::complex<double>(0, 0));
    CHECK(cj.at(0, 1) == std::complex<double>(1, 0));
    CHECK(cj.at(1, 0) == std::complex<double>(-1, 0));
    CHECK(cj.at(1, 1) == std::complex<double>(0, 0));

    Rng rng(7);
    const QMatrix a = random_matrix(rng, 2, 3);
    const QMatrix b = random_matrix(rng, 3, 2);
    // chi(AB) = chi(A) chi(B), via quaternion product on one side and a
    // complex block product on the other
    const ComplexAdjoint lhs = to_complex_adjoint(mat_mul(a, b));
    const ComplexAdjoint ca = to_complex_adjoint(a);
    const ComplexAdjoint cb = to_complex_adjoint(b);
    ComplexAdjoint rhs(ca.rows, cb.cols);
    for (std::size_t i = 0; i < ca.rows; ++i)
        for (std::size_t k = 0; k < ca.cols; ++k)
            for (std::size_t j = 0; j < cb.cols; ++j) rhs.at(i, j) += ca.at(i, k) * cb.at(k, j);
    CHECK(cplx_diff(lhs, rhs) < 1e-12);

    // chi(A^*) = chi(A)^H
    const ComplexAdjoint lhs2 = to_complex_adjoint(conj_transpose(a));
    ComplexAdjoint rhs2(ca.cols, ca.rows);
    for (std::size_t i = 0; i < ca.rows; ++i)
        for (std::size_t j = 0; j < ca.cols; ++j) rhs2.at(j, i) = std::conj(ca.at(i, j));
    CHECK(cplx_diff(lhs2, rhs2) < 1e-15);
}

TEST_CASE("from_complex_adjoint") {
    Rng rng(8);
    const QMatrix a = random_matrix(rng, 3, 4);
    CHECK(max_abs_diff(from_complex_adjoint(to_complex_adjoint(a)), a) == 0.0);

    ComplexAdjoint id(2, 2);
    id.at(0, 0) = 1.0;
    id.at(1, 1) = 1.0;
    const QMatrix q = from_complex_adjoint(id);
    CHECK(q.rows() == 1);
    CHECK(q.at(0, 0) == Quaternion::one());

    ComplexAdjoint bad = to_complex_adjoint(a);
    bad.at(0, 0) += 0.5; // break the block symmetry
    CHECK_THROWS_AS(from_complex_adjoint(bad), StructureViolation);
}

TEST_CASE("mat_pinv") {
    const QMatrix z = QMatrix::zeros(3, 2);
    const QMatrix zp = mat_pinv(z);
    CHECK(zp.rows() == 2);
    CHECK(zp.cols() == 3);
    CHECK(zp.is_zero());

    QMatrix d(1, 1);
    const Quaternion q{1, -2, 0.5, 3};
    d.at(0, 0) = q;
    const QMatrix dp = mat_pinv(d);
    CHECK((dp.at(0, 0) - qconj(q) * (1.0 / q.norm_sq())).abs() < 1e-14);

    Rng rng(9);
    const QMatrix a = random_matrix(rng, 4, 3);
    const auto res = penrose_check(a, mat_pinv(a));
    const double bound = 1e-10 * (1.0 + a.frobenius_norm());
    for (double r : res) CHECK(r < bound);

    // rank-deficient case
    const QMatrix low = mat_mul(random_matrix(rng, 4, 2), random_matrix(rng, 2, 5));
    const auto res2 = penrose_check(low, mat_pinv(low));
    for (double r : res2) CHECK(r < 1e-10 * (1.0 + low.frobenius_norm()));
    CHECK(mat_pinv_rank(low).rank == 2);
}

TEST_CASE("penrose_check edge values") {
    const QMatrix id = QMatrix::identity(3);
    const auto zero_res = penrose_check(id, id);
    for (double r : zero_res) CHECK(r == 0.0);

    Rng rng(10);
    const QMatrix a = random_matrix(rng, 3, 2);
    const auto res = penrose_check(a, QMatrix::zeros(2, 3));
    CHECK(res[0] == doctest::Approx(a.frobenius_norm()));
    CHECK(res[1] == 0.0);
    CHECK(res[2] == 0.0);
    CHECK(res[3] == 0.0);

    CHECK_THROWS_AS(penrose_check(a, QMatrix::zeros(3, 2)), ShapeMismatch);
}

TEST_CASE("pseudoinverse identities") {
    Rng rng(11);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t m = 2 + trial % 3, n = 2 + (trial / 2) % 3;
        QMatrix a = random_matrix(rng, m, n);
        if (trial % 3 == 0 && std::min(m, n) > 1) {
            a = mat_mul(random_matrix(rng, m, 1), random_matrix(rng, 1, n));
        }
        const QMatrix ad = mat_pinv(a);
        const double scale = 1.0 + a.frobenius_norm();

        CHECK((mat_pinv(ad) - a).frobenius_norm() < 1e-9 * scale);
        CHECK((mat_pinv(conj_transpose(a)) - conj_transpose(ad)).frobenius_norm() < 1e-9 * scale);
        // (A* A)^+ = A^+ (A*)^+ and (A A*)^+ = (A*)^+ A^+
        const QMatrix asa = mat_mul(conj_transpose(a), a);
        CHECK((mat_pinv(asa) - mat_mul(ad, mat_pinv(conj_transpose(a)))).frobenius_norm() <
              1e-9 * scale);
        const QMatrix aas = mat_mul(a, conj_transpose(a));
        CHECK((mat_pinv(aas) - mat_mul(mat_pinv(conj_transpose(a)), ad)).frobenius_norm() <
              1e-9 * scale);
        // A^+ R_A = 0 and R_A A = 0
        const QMatrix ra = QMatrix::identity(m) - mat_mul(a, ad);
        CHECK(mat_mul(ad, ra).frobenius_norm() < 1e-10 * scale);
        CHECK(mat_mul(ra, a).frobenius_norm() < 1e-10 * scale);
    }
}
