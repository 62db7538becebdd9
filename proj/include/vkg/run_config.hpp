#pragma once

#include "vkg/distribution.hpp"
#include "vkg/field_state.hpp"

#include <cstdint>
#include <string>

namespace vkg {

// Run configuration, parsed from flat "key = value" text (one per line, '#'
// comments, unknown keys rejected).  See configs/reference_1d.cfg for the
// documented key set.
struct RunConfig {
    int dimension = 1;
    double half_length = 40.0;
    int grid_n = 256;
    int velocity_n = 256;
    double v_max = 2.0;
    double dt = 0.02;
    double horizon = 30.0;
    std::string mode = "grid"; // grid | particle
    int particles_per_axis_x = 64;
    int particles_per_axis_v = 64;
    bool monte_carlo = false;
    std::uint64_t particle_count = 100000;
    std::uint64_t seed = 1;

    double eps0 = 1e-3;
    double f0_amp = 1.0; // relative factor on the kinetic data
    double f0_sigma_x = 1.0;
    double f0_v_radius = 1.0;
    double phi0_amp = 1.0;
    double phi1_amp = 0.0;
    double phi_sigma = 1.0;

    double support_radius = 8.0;
    int series_order = 20;
    int alpha0 = 8;
    int ledger_depth = 3;
    double output_cadence = 0.5;
    double kinetic_cadence = 0.0; // 0 disables kinetic snapshots
    std::string quadrature = "trapezoid";
    bool coupling = true; // off: drop the Duhamel source (decoupled limits)

    double t_wrap() const { return half_length - support_radius; }

    QuadratureRule quadrature_rule() const;

    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::string& path);

    // Canonical text form (sorted keys, %.17g floats): the input to the hash
    // and the config snapshot written into archives.
    std::string canonical() const;
    std::uint64_t hash() const; // FNV-1a over the canonical text

    // Throws ConfigError when a constraint fails (sizes, CFL bookkeeping
    // bound dt <= 0.5 dx, horizon < t_wrap, velocity margin).
    void validate() const;

    // The initial-data family: Gaussian-in-x times a smooth velocity bump of
    // radius f0_v_radius, amplitude eps0; Gaussian phi0/phi1 profiles.
    PhaseProfile make_f0() const;
    SpectralField make_phi0_hat(const BoxGrid& grid) const;
    SpectralField make_phi1_hat(const BoxGrid& grid) const;

    BoxGrid make_grid() const { return BoxGrid(dimension, half_length, grid_n); }
    VelocityLattice make_vlattice() const { return {dimension, velocity_n, v_max}; }
};

} // namespace vkg
