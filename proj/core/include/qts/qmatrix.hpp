#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "qts/quaternion.hpp"

namespace qts {

/// Dense quaternion matrix, row-major storage.
class QMatrix {
public:
    QMatrix() = default;
    QMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}
    QMatrix(std::size_t rows, std::size_t cols, std::vector<Quaternion> data);

    static QMatrix identity(std::size_t n);
    static QMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    Quaternion& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Quaternion& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    Quaternion& operator()(std::size_t i, std::size_t j) { return at(i, j); }
    const Quaternion& operator()(std::size_t i, std::size_t j) const { return at(i, j); }

    std::vector<Quaternion>& data() { return data_; }
    const std::vector<Quaternion>& data() const { return data_; }

    bool same_shape(const QMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool is_zero() const;

    double frobenius_norm() const;
    Quaternion trace() const;

    QMatrix operator+(const QMatrix& o) const;
    QMatrix operator-(const QMatrix& o) const;
    QMatrix operator-() const;
    QMatrix operator*(double s) const;
    QMatrix& operator+=(const QMatrix& o);
    QMatrix& operator-=(const QMatrix& o);

    /// Copy of the block starting at (r0, c0) of extent (nr, nc).
    QMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Quaternion> data_;
};

/// Matrix product with the quaternion factor order a[i,k]*b[k,j].
QMatrix mat_mul(const QMatrix& a, const QMatrix& b);
inline QMatrix operator*(const QMatrix& a, const QMatrix& b) { return mat_mul(a, b); }

/// (A*)[j,i] = conj(A[i,j]).
QMatrix conj_transpose(const QMatrix& a);

/// [a b]
QMatrix hstack(const QMatrix& a, const QMatrix& b);
/// [a; b]
QMatrix vstack(const QMatrix& a, const QMatrix& b);

/// Moore-Penrose inverse computed through the complex adjoint SVD.
/// Singular values sigma <= tol_rel * sigma_max * max(2*rows, 2*cols)
/// are truncated to zero.
QMatrix mat_pinv(const QMatrix& a, double tol_rel = 1e-12);

/// Pseudoinverse plus the numerical rank decision it was based on.
struct PinvResult {
    QMatrix pinv;
    std::size_t rank = 0; // quaternion rank (complex adjoint rank / 2)
};
PinvResult mat_pinv_rank(const QMatrix& a, double tol_rel = 1e-12);

/// Frobenius norms of the four Penrose residuals
/// (AXA-A, XAX-X, (AX)*-AX, (XA)*-XA).
std::array<double, 4> penrose_check(const QMatrix& a, const QMatrix& x);

} // namespace qts
