#include "qts/tensor.hpp"

#include <cmath>
#include <sstream>

#include "qts/errors.hpp"

namespace qts {
namespace {

std::size_t checked_product(const std::vector<std::size_t>& modes, const char* side) {
    if (modes.empty()) {
        throw ShapeMismatch(std::string("TensorShape: empty ") + side + " mode list");
    }
    std::size_t p = 1;
    for (std::size_t m : modes) {
        if (m == 0) throw ShapeMismatch(std::string("TensorShape: zero extent in ") + side);
        p *= m;
    }
    return p;
}

std::string modes_str(const std::vector<std::size_t>& modes) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < modes.size(); ++i) os << (i ? "," : "") << modes[i];
    os << ")";
    return os.str();
}

} // namespace

TensorShape::TensorShape(std::vector<std::size_t> rm, std::vector<std::size_t> cm)
    : row_modes(std::move(rm)), col_modes(std::move(cm)) {
    checked_product(row_modes, "row");
    checked_product(col_modes, "col");
}

std::size_t TensorShape::flat_rows() const { return checked_product(row_modes, "row"); }
std::size_t TensorShape::flat_cols() const { return checked_product(col_modes, "col"); }

std::string TensorShape::to_string() const {
    return modes_str(row_modes) + "x" + modes_str(col_modes);
}

QTensor::QTensor(TensorShape shape)
    : shape_(std::move(shape)), data_(shape_.flat_rows() * shape_.flat_cols()) {}

QTensor::QTensor(TensorShape shape, std::vector<Quaternion> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.flat_rows() * shape_.flat_cols()) {
        throw ShapeMismatch("QTensor: data length " + std::to_string(data_.size()) +
                            " does not match shape " + shape_.to_string());
    }
}

double QTensor::frobenius_norm() const {
    double s = 0.0;
    for (const auto& q : data_) s += q.norm_sq();
    return std::sqrt(s);
}

bool QTensor::is_zero() const {
    for (const auto& q : data_)
        if (!q.is_zero()) return false;
    return true;
}

QTensor QTensor::operator+(const QTensor& o) const {
    if (!(shape_ == o.shape_)) throw ShapeMismatch("tensor add: shapes differ");
    QTensor r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
    return r;
}

QTensor QTensor::operator-(const QTensor& o) const {
    if (!(shape_ == o.shape_)) throw ShapeMismatch("tensor sub: shapes differ");
    QTensor r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
    return r;
}

QTensor QTensor::operator-() const {
    QTensor r = *this;
    for (auto& q : r.data()) q = -q;
    return r;
}

QTensor QTensor::operator*(double s) const {
    QTensor r = *this;
    for (auto& q : r.data()) q = q * s;
    return r;
}

QMatrix matricize(const QTensor& a) {
    return QMatrix(a.shape().flat_rows(), a.shape().flat_cols(), a.data());
}

QTensor dematricize(const QMatrix& m, TensorShape shape) {
    if (m.rows() != shape.flat_rows() || m.cols() != shape.flat_cols()) {
        throw ShapeMismatch("dematricize: matrix " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + " does not flatten-match shape " +
                            shape.to_string());
    }
    return QTensor(std::move(shape), m.data());
}

QTensor einstein_product(const QTensor& a, const QTensor& b) {
    if (a.shape().col_modes != b.shape().row_modes) {
        throw ShapeMismatch("einstein_product: contraction modes " +
                            modes_str(a.shape().col_modes) + " vs " +
                            modes_str(b.shape().row_modes));
    }
    QMatrix prod = mat_mul(matricize(a), matricize(b));
    return dematricize(prod, TensorShape(a.shape().row_modes, b.shape().col_modes));
}

QTensor tensor_conj_transpose(const QTensor& a) {
    // matricize commutes with *: the flat index maps agree on both sides.
    return dematricize(conj_transpose(matricize(a)),
                       TensorShape(a.shape().col_modes, a.shape().row_modes));
}

QTensor tensor_transpose(const QTensor& a) {
    const QMatrix m = matricize(a);
    QMatrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t.at(j, i) = m.at(i, j);
    return dematricize(t, TensorShape(a.shape().col_modes, a.shape().row_modes));
}

QTensor identity_tensor(const std::vector<std::size_t>& modes) {
    TensorShape shape(modes, modes);
    const std::size_t n = shape.flat_rows();
    return dematricize(QMatrix::identity(n), std::move(shape));
}

Quaternion tensor_trace(const QTensor& a) {
    if (a.shape().row_modes != a.shape().col_modes) {
        throw ShapeMismatch("tensor_trace: shape not square: " + a.shape().to_string());
    }
    const std::size_t n = a.shape().flat_rows();
    Quaternion t;
    for (std::size_t i = 0; i < n; ++i) t += a.data()[i * n + i];
    return t;
}

QTensor block_row(const QTensor& a, const QTensor& b) {
    if (a.shape().col_modes != b.shape().col_modes) {
        throw ShapeMismatch("block_row: col modes differ: " + modes_str(a.shape().col_modes) +
                            " vs " + modes_str(b.shape().col_modes));
    }
    QMatrix m = vstack(matricize(a), matricize(b));
    return dematricize(m, TensorShape({m.rows()}, a.shape().col_modes));
}

QTensor block_col(const QTensor& a, const QTensor& b) {
    if (a.shape().row_modes != b.shape().row_modes) {
        throw ShapeMismatch("block_col: row modes differ: " + modes_str(a.shape().row_modes) +
                            " vs " + modes_str(b.shape().row_modes));
    }
    QMatrix m = hstack(matricize(a), matricize(b));
    return dematricize(m, TensorShape(a.shape().row_modes, {m.cols()}));
}

QTensor block_2x2(const QTensor& a, const QTensor& b, const QTensor& c, const QTensor& d) {
    QTensor top = block_col(a, b);
    QTensor bottom = block_col(c, d);
    if (top.shape().col_modes != bottom.shape().col_modes) {
        throw ShapeMismatch("block_2x2: concatenated column extents differ");
    }
    QMatrix m = vstack(matricize(top), matricize(bottom));
    return dematricize(m, TensorShape({m.rows()}, {m.cols()}));
}

} // namespace qts
