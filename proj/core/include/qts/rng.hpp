#pragma once

#include <cstdint>
#include <random>

#include "qts/quaternion.hpp"

namespace qts {

/// Seeded random stream. Uniform deviates come straight from mt19937_64 and
/// normals from Box-Muller, so a seed pins the byte-exact sequence on any
/// platform with IEEE doubles.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in (0, 1).
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(6.283185307179586477 * u2);
        have_spare_ = true;
        return r * std::cos(6.283185307179586477 * u2);
    }

    /// Quaternion with four independent standard-normal coefficients.
    Quaternion quaternion() {
        const double w = normal(), x = normal(), y = normal(), z = normal();
        return {w, x, y, z};
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace qts
