#include "qts/generalized_inverse.hpp"

#include "qts/errors.hpp"

namespace qts {

QTensor tensor_pinv(const QTensor& a, double tol_rel) {
    QMatrix p = mat_pinv(matricize(a), tol_rel);
    return dematricize(p, TensorShape(a.shape().col_modes, a.shape().row_modes));
}

QMatrix mat_projector_L(const QMatrix& a, double tol_rel) {
    const PinvResult p = mat_pinv_rank(a, tol_rel);
    if (p.rank == a.cols()) return QMatrix::zeros(a.cols(), a.cols());
    return QMatrix::identity(a.cols()) - mat_mul(p.pinv, a);
}

QMatrix mat_projector_R(const QMatrix& a, double tol_rel) {
    const PinvResult p = mat_pinv_rank(a, tol_rel);
    if (p.rank == a.rows()) return QMatrix::zeros(a.rows(), a.rows());
    return QMatrix::identity(a.rows()) - mat_mul(a, p.pinv);
}

QTensor projector_L(const QTensor& a, double tol_rel) {
    return dematricize(mat_projector_L(matricize(a), tol_rel),
                       TensorShape(a.shape().col_modes, a.shape().col_modes));
}

QTensor projector_R(const QTensor& a, double tol_rel) {
    return dematricize(mat_projector_R(matricize(a), tol_rel),
                       TensorShape(a.shape().row_modes, a.shape().row_modes));
}

QTensor tensor_inverse(const QTensor& a, double tol_rel) {
    if (a.shape().row_modes != a.shape().col_modes) {
        throw ShapeMismatch("tensor_inverse: shape not square: " + a.shape().to_string());
    }
    const QMatrix m = matricize(a);
    const QMatrix pinv = mat_pinv(m, tol_rel);
    const QMatrix gap = mat_mul(m, pinv) - QMatrix::identity(m.rows());
    if (gap.frobenius_norm() >= 1e-8) {
        throw Singular("tensor_inverse: ||A*A^+ - I||_F = " +
                       std::to_string(gap.frobenius_norm()));
    }
    return dematricize(pinv, TensorShape(a.shape().col_modes, a.shape().row_modes));
}

} // namespace qts
