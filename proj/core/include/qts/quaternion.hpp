#pragma once

#include <cmath>

#include "qts/errors.hpp"

namespace qts {

/// A real quaternion w + x i + y j + z k. Immutable value type; all
/// operations return new values. Multiplication follows the Hamilton
/// conventions i^2 = j^2 = k^2 = ijk = -1.
struct Quaternion {
    double w = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_)
        : w(w_), x(x_), y(y_), z(z_) {}
    constexpr Quaternion(double real) : w(real) {} // NOLINT: implicit by design

    static constexpr Quaternion zero() { return {}; }
    static constexpr Quaternion one() { return {1.0, 0.0, 0.0, 0.0}; }
    static constexpr Quaternion i() { return {0.0, 1.0, 0.0, 0.0}; }
    static constexpr Quaternion j() { return {0.0, 0.0, 1.0, 0.0}; }
    static constexpr Quaternion k() { return {0.0, 0.0, 0.0, 1.0}; }

    constexpr bool operator==(const Quaternion&) const = default;

    constexpr Quaternion operator-() const { return {-w, -x, -y, -z}; }
    constexpr Quaternion operator+(const Quaternion& o) const {
        return {w + o.w, x + o.x, y + o.y, z + o.z};
    }
    constexpr Quaternion operator-(const Quaternion& o) const {
        return {w - o.w, x - o.x, y - o.y, z - o.z};
    }
    constexpr Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }

    constexpr Quaternion& operator+=(const Quaternion& o) {
        w += o.w; x += o.x; y += o.y; z += o.z;
        return *this;
    }
    constexpr Quaternion& operator-=(const Quaternion& o) {
        w -= o.w; x -= o.x; y -= o.y; z -= o.z;
        return *this;
    }

    constexpr double norm_sq() const { return w * w + x * x + y * y + z * z; }
    double abs() const { return std::sqrt(norm_sq()); }
    constexpr bool is_zero() const { return w == 0.0 && x == 0.0 && y == 0.0 && z == 0.0; }
};

/// Hamilton product a*b (non-commutative).
constexpr Quaternion qmul(const Quaternion& a, const Quaternion& b) {
    return {
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    };
}

constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) { return qmul(a, b); }

/// Conjugate w - x i - y j - z k.
constexpr Quaternion qconj(const Quaternion& a) { return {a.w, -a.x, -a.y, -a.z}; }

/// Multiplicative inverse conj(a)/|a|^2. Throws ZeroDivision for a = 0.
inline Quaternion qinv(const Quaternion& a) {
    const double n2 = a.norm_sq();
    if (n2 == 0.0) {
        throw ZeroDivision("qinv: zero quaternion has no inverse");
    }
    return qconj(a) * (1.0 / n2);
}

} // namespace qts
