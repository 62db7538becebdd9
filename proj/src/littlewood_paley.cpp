#include "vkg/littlewood_paley.hpp"

#include <cmath>

namespace vkg {

namespace {

inline double exp_ramp(double x) {
    return x > 0.0 ? std::exp(-1.0 / x) : 0.0;
}

// C-infinity monotone step from 0 at x=0 to 1 at x=1.
inline double step01(double x) {
    const double a = exp_ramp(x);
    const double b = exp_ramp(1.0 - x);
    return a / (a + b);
}

} // namespace

double lp_smooth_step(double x) {
    if (x <= 0.25)
        return 0.0;
    if (x >= 0.75)
        return 1.0;
    return step01(2.0 * (x - 0.25));
}

double lp_bump_log2(double u) {
    return lp_smooth_step(u + 1.0) - lp_smooth_step(u);
}

double lp_shell_symbol(int shell, double k_magnitude) {
    if (k_magnitude <= 0.0)
        return 0.0;
    return lp_bump_log2(std::log2(k_magnitude) - shell);
}

double lp_low_symbol(double k_magnitude) {
    if (k_magnitude <= 0.0)
        return 1.0;
    return 1.0 - lp_smooth_step(std::log2(k_magnitude));
}

int lp_max_shell(const BoxGrid& grid) {
    return static_cast<int>(std::floor(std::log2(grid.nyquist_wavenumber()))) - 1;
}

int lp_min_shell(const BoxGrid& grid) {
    // Shells below the fundamental wavenumber have no grid support beyond the
    // bump tail; one shell of slack keeps every nonzero chi value covered.
    return static_cast<int>(std::floor(std::log2(grid.fundamental_wavenumber()))) - 1;
}

SpectralField lp_project(const SpectralField& field, int shell) {
    const BoxGrid& grid = field.grid();
    if (std::ldexp(1.0, shell + 1) > grid.nyquist_wavenumber())
        throw ResolutionError("lp_project: shell beyond what the grid resolves");
    return apply_multiplier(field, [shell, &grid](const std::array<double, 3>& k) {
        const double mag = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
        return Complex{lp_shell_symbol(shell, mag), 0.0};
    });
}

SpectralField lp_project_low(const SpectralField& field) {
    return apply_multiplier(field, [](const std::array<double, 3>& k) {
        const double mag = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
        return Complex{lp_low_symbol(mag), 0.0};
    });
}

double lp_partition_defect(const BoxGrid& grid) {
    const int j_hi = static_cast<int>(std::ceil(std::log2(grid.nyquist_wavenumber() * 2.0))) + 2;
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double mag = grid.wavenumber_magnitude(i);
        double total = lp_low_symbol(mag);
        for (int j = 1; j <= j_hi; ++j)
            total += lp_shell_symbol(j, mag);
        worst = std::max(worst, std::abs(total - 1.0));
    }
    return worst;
}

} // namespace vkg
