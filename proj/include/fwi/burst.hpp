#pragma once

#include <cmath>
#include <numbers>

#include "fwi/errors.hpp"

namespace fwi {

/// Windowed tone excitation: A0*sin(w*t)*sin^2(w*t/(2*nc)) for nc carrier cycles.
struct SineBurst {
    double A0 = 1.0;   // amplitude (N)
    double kc = 5e5;   // central frequency (Hz)
    double nc = 2.0;   // cycle count

    double omega() const { return 2.0 * std::numbers::pi * kc; }
    double duration() const { return 2.0 * std::numbers::pi * nc / omega(); }

    void validate() const {
        // A0 = 0 is allowed: a silent source is useful for zero-forcing checks.
        if (!(A0 >= 0.0)) throw ConfigError("SineBurst: A0 must be non-negative");
        if (!(kc > 0.0)) throw ConfigError("SineBurst: kc must be positive");
        if (!(nc >= 1.0)) throw ConfigError("SineBurst: nc must be >= 1");
    }
};

inline double burst_force(double t, const SineBurst& b) {
    const double w = b.omega();
    if (t < 0.0 || t > 2.0 * std::numbers::pi * b.nc / w) return 0.0;
    const double s = std::sin(w * t / (2.0 * b.nc));
    return b.A0 * std::sin(w * t) * s * s;
}

}  // namespace fwi
