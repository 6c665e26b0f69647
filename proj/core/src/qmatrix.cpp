#include "qts/qmatrix.hpp"

#include <cmath>
#include <string>

#include "qts/complex_adjoint.hpp"
#include "qts/errors.hpp"
#include "qts/svd.hpp"

namespace qts {

QMatrix::QMatrix(std::size_t rows, std::size_t cols, std::vector<Quaternion> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeMismatch("QMatrix: data length " + std::to_string(data_.size()) +
                            " != rows*cols = " + std::to_string(rows_ * cols_));
    }
}

QMatrix QMatrix::identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Quaternion::one();
    return m;
}

bool QMatrix::is_zero() const {
    for (const auto& q : data_)
        if (!q.is_zero()) return false;
    return true;
}

double QMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& q : data_) s += q.norm_sq();
    return std::sqrt(s);
}

Quaternion QMatrix::trace() const {
    if (rows_ != cols_) throw ShapeMismatch("trace: matrix not square");
    Quaternion t;
    for (std::size_t i = 0; i < rows_; ++i) t += at(i, i);
    return t;
}

QMatrix QMatrix::operator+(const QMatrix& o) const {
    QMatrix r = *this;
    r += o;
    return r;
}

QMatrix QMatrix::operator-(const QMatrix& o) const {
    QMatrix r = *this;
    r -= o;
    return r;
}

QMatrix QMatrix::operator-() const {
    QMatrix r = *this;
    for (auto& q : r.data_) q = -q;
    return r;
}

QMatrix QMatrix::operator*(double s) const {
    QMatrix r = *this;
    for (auto& q : r.data_) q = q * s;
    return r;
}

QMatrix& QMatrix::operator+=(const QMatrix& o) {
    if (!same_shape(o)) throw ShapeMismatch("matrix add: shapes differ");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

QMatrix& QMatrix::operator-=(const QMatrix& o) {
    if (!same_shape(o)) throw ShapeMismatch("matrix sub: shapes differ");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

QMatrix QMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw ShapeMismatch("block: out of range");
    QMatrix out(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) out.at(i, j) = at(r0 + i, c0 + j);
    return out;
}

QMatrix mat_mul(const QMatrix& a, const QMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeMismatch("mat_mul: " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
    }
    QMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Quaternion aik = a.at(i, k);
            if (aik.is_zero()) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out.at(i, j) += qmul(aik, b.at(k, j));
            }
        }
    }
    return out;
}

QMatrix conj_transpose(const QMatrix& a) {
    QMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out.at(j, i) = qconj(a.at(i, j));
    return out;
}

QMatrix hstack(const QMatrix& a, const QMatrix& b) {
    if (a.rows() != b.rows()) throw ShapeMismatch("hstack: row counts differ");
    QMatrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, a.cols() + j) = b.at(i, j);
    }
    return out;
}

QMatrix vstack(const QMatrix& a, const QMatrix& b) {
    if (a.cols() != b.cols()) throw ShapeMismatch("vstack: column counts differ");
    QMatrix out(a.rows() + b.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) out.at(a.rows() + i, j) = b.at(i, j);
    return out;
}

PinvResult mat_pinv_rank(const QMatrix& a, double tol_rel) {
    if (a.is_zero()) {
        return {QMatrix::zeros(a.cols(), a.rows()), 0};
    }
    const ComplexPinv cp = complex_pinv(to_complex_adjoint(a), tol_rel);
    // chi(A)'s Penrose solution is itself an adjoint image, so the block
    // symmetry holds up to rounding; from_complex_adjoint checks it.
    return {from_complex_adjoint(cp.pinv), cp.rank / 2};
}

QMatrix mat_pinv(const QMatrix& a, double tol_rel) { return mat_pinv_rank(a, tol_rel).pinv; }

std::array<double, 4> penrose_check(const QMatrix& a, const QMatrix& x) {
    if (x.rows() != a.cols() || x.cols() != a.rows()) {
        throw ShapeMismatch("penrose_check: x must be cols(a) x rows(a)");
    }
    const QMatrix ax = mat_mul(a, x);
    const QMatrix xa = mat_mul(x, a);
    return {
        (mat_mul(ax, a) - a).frobenius_norm(),
        (mat_mul(xa, x) - x).frobenius_norm(),
        (conj_transpose(ax) - ax).frobenius_norm(),
        (conj_transpose(xa) - xa).frobenius_norm(),
    };
}

} // namespace qts
