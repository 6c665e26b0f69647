#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qts/qmatrix.hpp"

namespace qts {

/// Mode lists of an even-order tensor: row modes (I_1..I_N) index the "output"
/// side of the Einstein product, column modes (J_1..J_M) the "input" side.
struct TensorShape {
    std::vector<std::size_t> row_modes;
    std::vector<std::size_t> col_modes;

    TensorShape() = default;
    TensorShape(std::vector<std::size_t> rm, std::vector<std::size_t> cm);

    std::size_t flat_rows() const;
    std::size_t flat_cols() const;
    bool operator==(const TensorShape&) const = default;
    std::string to_string() const;
};

/// Even-order dense quaternion tensor. Entries are stored row-major over the
/// concatenated multi-index (i_1..i_N, j_1..j_M); under that fixed flattening,
/// matricize is a reinterpretation and an algebra isomorphism.
class QTensor {
public:
    QTensor() = default;
    explicit QTensor(TensorShape shape);
    QTensor(TensorShape shape, std::vector<Quaternion> data);

    static QTensor zeros(TensorShape shape) { return QTensor(std::move(shape)); }

    const TensorShape& shape() const { return shape_; }
    const std::vector<Quaternion>& data() const { return data_; }
    std::vector<Quaternion>& data() { return data_; }

    double frobenius_norm() const;
    bool is_zero() const;

    QTensor operator+(const QTensor& o) const;
    QTensor operator-(const QTensor& o) const;
    QTensor operator-() const;
    QTensor operator*(double s) const;

private:
    TensorShape shape_;
    std::vector<Quaternion> data_;
};

/// Contraction of a's column modes against b's row modes (the Einstein
/// product); requires a.col_modes == b.row_modes elementwise.
QTensor einstein_product(const QTensor& a, const QTensor& b);

/// Swaps mode lists and conjugates: (A*)[j..,i..] = conj(A[i..,j..]).
QTensor tensor_conj_transpose(const QTensor& a);

/// Swaps mode lists without conjugation: (A^T)[j..,i..] = A[i..,j..].
QTensor tensor_transpose(const QTensor& a);

/// Unit (identity) tensor over the given modes: shape (modes; modes).
QTensor identity_tensor(const std::vector<std::size_t>& modes);

/// Sum of diagonal entries; requires row_modes == col_modes.
Quaternion tensor_trace(const QTensor& a);

/// Flatten to a (prod row_modes) x (prod col_modes) matrix.
QMatrix matricize(const QTensor& a);

/// Inverse of matricize for the declared shape.
QTensor dematricize(const QMatrix& m, TensorShape shape);

/// Block concatenations, performed in the matricized domain. The stacked side
/// of the result carries a single synthetic mode of the summed flat extent.
QTensor block_row(const QTensor& a, const QTensor& b);            // [a; b]
QTensor block_col(const QTensor& a, const QTensor& b);            // [a b]
QTensor block_2x2(const QTensor& a, const QTensor& b,             // [[a b]
                  const QTensor& c, const QTensor& d);            //  [c d]]

} // namespace qts
