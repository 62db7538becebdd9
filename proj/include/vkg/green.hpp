#pragma once

#include "vkg/box_grid.hpp"

#include <complex>

namespace vkg {

// Klein-Gordon mode quantities at wavenumber k.  The dispersion relation for
// (box + 1) has the two branches lambda_pm(k) = +-i<k>; the propagator splits
// as Ghat = Ghat_osc(+) + Ghat_osc(-) with amplitudes a_pm(k) = -+i/(2<k>).

enum class Sign : int { plus = +1, minus = -1 };

inline Sign flip(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }
inline double sign_value(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }

// lambda_pm(k) = +-i <k>
inline std::complex<double> osc_exponent(Sign s, double k_magnitude) {
    return {0.0, sign_value(s) * japanese_bracket(k_magnitude)};
}

// a_pm(k) = -+ i / (2<k>)
inline std::complex<double> osc_amplitude(Sign s, double k_magnitude) {
    return {0.0, -sign_value(s) / (2.0 * japanese_bracket(k_magnitude))};
}

// Ghat(t, k) = sin(t<k>) / <k>
inline double green_hat(double t, double k_magnitude) {
    const double w = japanese_bracket(k_magnitude);
    return std::sin(t * w) / w;
}

// dt Ghat(t, k) = cos(t<k>)
inline double green_dt_hat(double t, double k_magnitude) {
    return std::cos(t * japanese_bracket(k_magnitude));
}

// Ghat_osc_pm(t, k) = e^{lambda_pm(k) t} a_pm(k)
inline std::complex<double> osc_green_hat(Sign s, double t, double k_magnitude) {
    const double w = japanese_bracket(k_magnitude);
    const std::complex<double> phase{std::cos(t * w), sign_value(s) * std::sin(t * w)};
    return phase * osc_amplitude(s, k_magnitude);
}

} // namespace vkg
