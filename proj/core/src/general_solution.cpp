#include "qts/general_solution.hpp"

#include <algorithm>

#include "qts/errors.hpp"

namespace qts {

int SlotRegistry::add(std::string name, TensorShape shape) {
    slots_.push_back({std::move(name), std::move(shape)});
    return static_cast<int>(slots_.size()) - 1;
}

int SlotRegistry::find(const std::string& name) const {
    for (std::size_t i = 0; i < slots_.size(); ++i)
        if (slots_[i].name == name) return static_cast<int>(i);
    return -1;
}

AffineForm AffineForm::slot(int id, std::size_t rows, std::size_t cols) {
    AffineForm f(QMatrix::zeros(rows, cols));
    f.terms_.push_back({id, QMatrix::identity(rows), QMatrix::identity(cols)});
    return f;
}

AffineForm& AffineForm::operator+=(const AffineForm& o) {
    part_ += o.part_;
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
}

AffineForm& AffineForm::operator-=(const AffineForm& o) {
    part_ -= o.part_;
    for (const Term& t : o.terms_) terms_.push_back({t.slot, -t.left, t.right});
    return *this;
}

AffineForm lmul(const QMatrix& m, const AffineForm& f) {
    AffineForm out(mat_mul(m, f.part_));
    for (const auto& t : f.terms_) {
        QMatrix left = mat_mul(m, t.left);
        if (left.is_zero()) continue; // dead parameter direction
        out.terms_.push_back({t.slot, std::move(left), t.right});
    }
    return out;
}

AffineForm rmul(const AffineForm& f, const QMatrix& m) {
    AffineForm out(mat_mul(f.part_, m));
    for (const auto& t : f.terms_) {
        QMatrix right = mat_mul(t.right, m);
        if (right.is_zero()) continue;
        out.terms_.push_back({t.slot, t.left, std::move(right)});
    }
    return out;
}

QMatrix AffineForm::evaluate(const std::vector<const QMatrix*>& values) const {
    QMatrix out = part_;
    for (const auto& t : terms_) {
        const std::size_t idx = static_cast<std::size_t>(t.slot);
        if (idx >= values.size() || values[idx] == nullptr) continue;
        const QMatrix& v = *values[idx];
        if (v.is_zero()) continue;
        out += mat_mul(t.left, mat_mul(v, t.right));
    }
    return out;
}

std::vector<int> AffineForm::referenced_slots() const {
    std::vector<int> ids;
    ids.reserve(terms_.size());
    for (const auto& t : terms_) ids.push_back(t.slot);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

GeneralSolution::GeneralSolution(std::shared_ptr<const SlotRegistry> registry, AffineForm form,
                                 TensorShape out_shape)
    : registry_(std::move(registry)),
      form_(std::move(form)),
      out_shape_(std::move(out_shape)),
      particular_(dematricize(form_.particular(), out_shape_)) {}

std::vector<SlotSpec> GeneralSolution::param_slots() const {
    std::vector<SlotSpec> out;
    for (int id : form_.referenced_slots()) out.push_back(registry_->spec(id));
    return out;
}

QTensor GeneralSolution::evaluate(const std::map<std::string, QTensor>& assignment) const {
    std::vector<QMatrix> storage(registry_->size());
    std::vector<const QMatrix*> values(registry_->size(), nullptr);
    for (const auto& [name, tensor] : assignment) {
        const int id = registry_->find(name);
        if (id < 0) {
            throw ShapeMismatch("evaluate: unknown slot name '" + name + "'");
        }
        const SlotSpec& spec = registry_->spec(id);
        if (tensor.shape().flat_rows() != spec.shape.flat_rows() ||
            tensor.shape().flat_cols() != spec.shape.flat_cols()) {
            throw ShapeMismatch("evaluate: slot '" + name + "' expects shape " +
                                spec.shape.to_string() + ", got " + tensor.shape().to_string());
        }
        const std::size_t idx = static_cast<std::size_t>(id);
        storage[idx] = matricize(tensor);
        values[idx] = &storage[idx];
    }
    return dematricize(form_.evaluate(values), out_shape_);
}

} // namespace qts
