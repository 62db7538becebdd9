#pragma once

#include "vkg/spectral_field.hpp"

namespace vkg {

// Homogeneous dyadic decomposition h = P_low h + sum_{j} P_j h.
//
// The shell profile is chi(log2 |k| - j) where chi is a C-infinity bump built
// from the exponential transition e^{-1/x}:
//   chi = 1 on [-1/4, 1/4]   (shell plateau [2^{j-1/4}, 2^{j+1/4}])
//   supp chi = [-3/4, 3/4]   (inside the dyadic band [2^{j-1}, 2^{j+1}])
// and the translates {chi(u - j)} sum to one exactly for every u, by
// telescoping of the underlying smooth step.  The low lump P_low carries
// sum_{j <= 0} chi, i.e. the symbol 1 - step(log2 |k|).

// Smooth step: 0 for x <= 1/4, 1 for x >= 3/4, C-infinity in between.
double lp_smooth_step(double x);

// Shell profile chi(u), u on the log2 scale relative to the shell center.
double lp_bump_log2(double u);

// Symbol of P_j at wavenumber magnitude |k| (zero mode belongs to P_low).
double lp_shell_symbol(int shell, double k_magnitude);

// Symbol of P_low = sum_{j <= 0} P_j.
double lp_low_symbol(double k_magnitude);

// Largest shell j whose full dyadic band [2^{j-1}, 2^{j+1}] is resolved.
int lp_max_shell(const BoxGrid& grid);

// Smallest shell with any support on the grid (just below the fundamental).
int lp_min_shell(const BoxGrid& grid);

// Hard-localized projection P_j.  Throws ResolutionError if the grid does not
// resolve 2^{j+1}.
SpectralField lp_project(const SpectralField& field, int shell);

// Low-frequency lump P_low.
SpectralField lp_project_low(const SpectralField& field);

// max_k | sum_j chi(log2|k| - j) + low(|k|) - 1 | over the grid wavenumbers.
double lp_partition_defect(const BoxGrid& grid);

} // namespace vkg
