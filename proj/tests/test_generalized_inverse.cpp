#include "doctest.h"

#include "qts/errors.hpp"
#include "qts/generalized_inverse.hpp"
#include "test_util.hpp"

using namespace qts;
using test::max_abs_diff;
using test::random_tensor;

TEST_CASE("tensor_pinv") {
    const QTensor id = identity_tensor({2, 2});
    CHECK(max_abs_diff(tensor_pinv(id), id) < 1e-14);

    const QTensor z = QTensor::zeros(TensorShape({2, 3}, {2}));
    const QTensor zp = tensor_pinv(z);
    CHECK(zp.shape().row_modes == std::vector<std::size_t>{2});
    CHECK(zp.shape().col_modes == (std::vector<std::size_t>{2, 3}));
    CHECK(zp.is_zero());

    Rng rng(30);
    const QTensor a = random_tensor(rng, TensorShape({2, 2}, {3, 2}));
    const QTensor ap = tensor_pinv(a);
    const auto res = penrose_check(matricize(a), matricize(ap));
    for (double r : res) CHECK(r < 1e-10 * (1.0 + a.frobenius_norm()));

    // pinv commutes with matricization by construction
    CHECK(max_abs_diff(matricize(ap), mat_pinv(matricize(a))) == 0.0);
}

TEST_CASE("projectors") {
    Rng rng(31);
    // invertible square tensor: both projectors exactly zero
    const QTensor sq = random_tensor(rng, TensorShape({2, 2}, {2, 2}));
    CHECK(projector_L(sq).is_zero());
    CHECK(projector_R(sq).is_zero());

    // zero tensor: both projectors are identities
    const QTensor z = QTensor::zeros(TensorShape({2}, {3}));
    CHECK(max_abs_diff(projector_L(z), identity_tensor({3})) == 0.0);
    CHECK(max_abs_diff(projector_R(z), identity_tensor({2})) == 0.0);

    for (int trial = 0; trial < 10; ++trial) {
        const QTensor a = random_tensor(rng, TensorShape({2, 2}, {3}));
        const QTensor l = projector_L(a);
        const QTensor r = projector_R(a);
        const double scale = 1.0 + a.frobenius_norm();
        CHECK((einstein_product(l, l) - l).frobenius_norm() < 1e-10);
        CHECK((tensor_conj_transpose(l) - l).frobenius_norm() < 1e-10);
        CHECK((einstein_product(r, r) - r).frobenius_norm() < 1e-10);
        CHECK((tensor_conj_transpose(r) - r).frobenius_norm() < 1e-10);
        CHECK(einstein_product(a, l).frobenius_norm() < 1e-10 * scale);
        CHECK(einstein_product(r, a).frobenius_norm() < 1e-10 * scale);
        CHECK(einstein_product(tensor_pinv(a), r).frobenius_norm() < 1e-10 * scale);
    }
}

TEST_CASE("tensor_inverse") {
    const QTensor id = identity_tensor({3});
    CHECK(max_abs_diff(tensor_inverse(id), id) < 1e-14);

    // diagonal of i inverts to diagonal of -i
    QTensor di = QTensor::zeros(TensorShape({2, 2}, {2, 2}));
    for (std::size_t k = 0; k < 4; ++k) di.data()[k * 4 + k] = Quaternion::i();
    const QTensor inv = tensor_inverse(di);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK((inv.data()[k * 4 + k] + Quaternion::i()).abs() < 1e-14);
    }
    CHECK(max_abs_diff(einstein_product(di, inv), identity_tensor({2, 2})) < 1e-13);

    Rng rng(32);
    // rank-deficient square tensor is singular
    const QTensor a = random_tensor(rng, TensorShape({3}, {1}));
    const QTensor b = random_tensor(rng, TensorShape({1}, {3}));
    CHECK_THROWS_AS(tensor_inverse(einstein_product(a, b)), Singular);

    CHECK_THROWS_AS(tensor_inverse(random_tensor(rng, TensorShape({2}, {3}))), ShapeMismatch);
}
