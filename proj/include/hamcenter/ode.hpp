#pragma once

#include <algorithm>
#include <cmath>

#include "hamcenter/vec2.hpp"

namespace hamcenter {

/// One Dormand–Prince 5(4) step for an autonomous planar field. `k1` is the
/// field at `z`. Returns the 5th-order solution and the embedded error vector.
struct Dp5Step {
    Vec2 z;
    Vec2 err;
};

template <class Field>
Dp5Step dp5_step(Field&& field, Vec2 z, Vec2 k1, double dt) {
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                     a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                     b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                     e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    const Vec2 k2 = field(z + dt * (a21 * k1));
    const Vec2 k3 = field(z + dt * (a31 * k1 + a32 * k2));
    const Vec2 k4 = field(z + dt * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec2 k5 = field(z + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec2 k6 = field(z + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec2 z5 = z + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec2 k7 = field(z5);
    const Vec2 err = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    return {z5, err};
}

/// Mixed absolute/relative error norm (max over components).
inline double dp5_error_norm(const Dp5Step& s, Vec2 z0, double rtol, double atol) {
    const double sx = atol + rtol * std::max(std::abs(z0.x), std::abs(s.z.x));
    const double sy = atol + rtol * std::max(std::abs(z0.y), std::abs(s.z.y));
    return std::max(std::abs(s.err.x) / sx, std::abs(s.err.y) / sy);
}

}  // namespace hamcenter
