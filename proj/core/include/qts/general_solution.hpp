#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qts/tensor.hpp"

namespace qts {

/// One free parameter of a general solution.
struct SlotSpec {
    std::string name;
    TensorShape shape;
};

/// Names and shapes of all free parameters produced by one solve. Shared by
/// every GeneralSolution of the outcome so a single assignment instantiates
/// all unknowns coherently.
class SlotRegistry {
public:
    int add(std::string name, TensorShape shape);
    const SlotSpec& spec(int id) const { return slots_[static_cast<std::size_t>(id)]; }
    std::size_t size() const { return slots_.size(); }
    /// Index of the named slot, or -1.
    int find(const std::string& name) const;
    const std::vector<SlotSpec>& all() const { return slots_; }

private:
    std::vector<SlotSpec> slots_;
};

/// Matrix-valued affine function of the slots:
///   value(assignment) = particular + sum_t left_t * assignment[slot_t] * right_t.
///
/// Every solution formula in the solver hierarchy is affine in its arbitrary
/// tensors, and affine forms compose under the operations below; the nested
/// constructions are built entirely from them.
class AffineForm {
public:
    AffineForm() = default;
    explicit AffineForm(QMatrix particular) : part_(std::move(particular)) {}

    /// The bare slot as a form (zero particular, identity sandwich).
    static AffineForm slot(int id, std::size_t rows, std::size_t cols);

    std::size_t rows() const { return part_.rows(); }
    std::size_t cols() const { return part_.cols(); }
    const QMatrix& particular() const { return part_; }

    AffineForm& operator+=(const AffineForm& o);
    AffineForm& operator-=(const AffineForm& o);
    friend AffineForm operator+(AffineForm a, const AffineForm& b) { return a += b; }
    friend AffineForm operator-(AffineForm a, const AffineForm& b) { return a -= b; }

    /// m * form (composes into every term; drops terms killed by zero factors).
    friend AffineForm lmul(const QMatrix& m, const AffineForm& f);
    /// form * m
    friend AffineForm rmul(const AffineForm& f, const QMatrix& m);

    /// Evaluate with per-slot values indexed by slot id; null entries mean zero.
    QMatrix evaluate(const std::vector<const QMatrix*>& values) const;

    /// Slot ids referenced by this form (sorted, unique).
    std::vector<int> referenced_slots() const;

private:
    struct Term {
        int slot;
        QMatrix left;
        QMatrix right;
    };
    QMatrix part_;
    std::vector<Term> terms_;
};

/// Parameterized solution set of one unknown: a particular value plus the
/// affine dependence on the outcome's free slots.
class GeneralSolution {
public:
    GeneralSolution() = default;
    GeneralSolution(std::shared_ptr<const SlotRegistry> registry, AffineForm form,
                    TensorShape out_shape);

    const QTensor& particular() const { return particular_; }
    const TensorShape& shape() const { return out_shape_; }

    /// Slots appearing in this unknown's formula, in registry order.
    std::vector<SlotSpec> param_slots() const;

    /// Deterministic evaluation. Missing slots default to zero; slot values
    /// must flatten-match the declared slot shape; names unknown to the
    /// outcome's registry are rejected.
    QTensor evaluate(const std::map<std::string, QTensor>& assignment) const;

    const SlotRegistry& registry() const { return *registry_; }

private:
    std::shared_ptr<const SlotRegistry> registry_;
    AffineForm form_;
    TensorShape out_shape_;
    QTensor particular_;
};

} // namespace qts
