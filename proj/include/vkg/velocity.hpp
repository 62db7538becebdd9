#pragma once

#include <array>
#include <cmath>

namespace vkg {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double lorentz_factor(const Vec3& v) {
    return std::sqrt(1.0 + dot(v, v));
}

// Relativistic velocity vhat = v / <v>; always |vhat| < 1.
inline Vec3 relativistic_velocity(const Vec3& v) {
    const double g = lorentz_factor(v);
    return {v[0] / g, v[1] / g, v[2] / g};
}

// Jacobian grad_v vhat = (I - vhat (x) vhat) / <v>.
inline std::array<std::array<double, 3>, 3> grad_relativistic_velocity(const Vec3& v) {
    const double g = lorentz_factor(v);
    const Vec3 vh = relativistic_velocity(v);
    std::array<std::array<double, 3>, 3> j{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            j[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                ((a == b ? 1.0 : 0.0) - vh[static_cast<std::size_t>(a)] * vh[static_cast<std::size_t>(b)]) / g;
    return j;
}

// Inverse of the hat map: v = vhat / sqrt(1 - |vhat|^2), defined for |vhat| < 1.
inline Vec3 velocity_from_hat(const Vec3& vhat) {
    const double s = std::sqrt(1.0 - dot(vhat, vhat));
    return {vhat[0] / s, vhat[1] / s, vhat[2] / s};
}

} // namespace vkg
