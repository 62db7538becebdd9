#pragma once

#include "vkg/characteristics.hpp"
#include "vkg/spectral_field.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace vkg {

// Uniform midpoint velocity lattice on [-vmax, vmax]^d.
struct VelocityLattice {
    int dim = 1;
    int count = 32;     // points per axis
    double vmax = 4.0;

    double spacing() const { return 2.0 * vmax / count; }
    double cell_volume() const { return std::pow(spacing(), dim); }
    std::size_t size() const {
        std::size_t n = 1;
        for (int c = 0; c < dim; ++c)
            n *= static_cast<std::size_t>(count);
        return n;
    }
    double node_1d(int j) const { return -vmax + (j + 0.5) * spacing(); }
    std::array<int, 3> unravel(std::size_t flat) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int c = dim - 1; c >= 0; --c) {
            idx[static_cast<std::size_t>(c)] = static_cast<int>(flat % count);
            flat /= static_cast<std::size_t>(count);
        }
        return idx;
    }
    Vec3 node(std::size_t flat) const {
        auto idx = unravel(flat);
        Vec3 v{0, 0, 0};
        for (int c = 0; c < dim; ++c)
            v[static_cast<std::size_t>(c)] = node_1d(idx[static_cast<std::size_t>(c)]);
        return v;
    }
};

using PhaseProfile = std::function<double(const Vec3& x, const Vec3& v)>;

// The kinetic unknown f.  Grid mode tracks, per phase-space node, the foot of
// the backward characteristic (X_{0,t}, V_{0,t}) relative to free streaming,
// and reads f as f0 at the foot; the foot arrays are advanced by one-step
// composition with tensor cubic-spline interpolation.  Particle mode pushes
// weighted samples forward and deposits with a triangular (CIC) kernel plus
// a 2/3-Nyquist spectral cutoff.
class Distribution {
public:
    enum class Mode { grid, particle };

    struct ParticleLoading {
        int per_axis_x = 32;
        int per_axis_v = 32;
        bool monte_carlo = false;
        std::size_t mc_count = 0;  // used when monte_carlo
        std::uint64_t seed = 1;
    };

    static Distribution grid_mode(const BoxGrid& grid, const VelocityLattice& vlat,
                                  PhaseProfile f0, double v_support_radius);

    static Distribution particle_mode(const BoxGrid& grid, const VelocityLattice& vlat,
                                      PhaseProfile f0, double v_support_radius,
                                      const ParticleLoading& loading);

    Mode mode() const { return mode_; }
    double time() const { return time_; }
    const BoxGrid& space_grid() const { return grid_; }
    const VelocityLattice& vlattice() const { return vlat_; }
    double v_support_radius() const { return v_support_; }
    std::size_t particle_count() const { return particles_.size(); }

    // Transport sub-step of the Strang loop: advance by dt in a frozen field.
    void advance(const FrozenField& field, double dt);

    // f0 at a phase point, with the support contract: outside the velocity
    // lattice it returns 0 when |v| exceeds the declared support and throws
    // SupportViolationError otherwise.
    double initial_value(const Vec3& x, const Vec3& v) const;

    // Grid mode accessors (throw UsageError in particle mode).
    double value_at_node(std::size_t xi, std::size_t vi) const;
    PhasePoint foot_at_node(std::size_t xi, std::size_t vi) const;

    // Charge density rhohat (weight == nullptr) or the weighted density
    //   Shat = FT int f(t,x,v) w(v) dv.
    // Throws SupportViolationError when f touches the velocity boundary.
    SpectralField deposit(const std::function<double(const Vec3&)>* vweight = nullptr) const;

    double total_mass() const;

    // Particle accessors (empty in grid mode).
    std::span<const PhasePoint> particles() const { return particles_; }
    std::span<const double> weights() const { return weights_; }

private:
    Distribution(const BoxGrid& grid, const VelocityLattice& vlat, PhaseProfile f0,
                 double v_support_radius, Mode mode);

    double raw_f0(const Vec3& x, const Vec3& v) const;

    BoxGrid grid_;
    VelocityLattice vlat_;
    PhaseProfile f0_;
    double v_support_ = 0.0;
    Mode mode_;
    double time_ = 0.0;

    // grid mode: foot displacement arrays, channel-major [DX_c..., DV_c...],
    // each over the (x-grid x v-lattice) nodes, row-major x slowest.
    std::vector<double> feet_;
    std::size_t nodes() const { return grid_.size() * vlat_.size(); }

    // particle mode
    std::vector<PhasePoint> particles_;
    std::vector<double> weights_;
};

// f(t, x, v) at the foot of a characteristic (Eq.-of-characteristics form):
// the caller supplies the foot (X_{0,t}, V_{0,t}) of the probe, typically
// from a CharacteristicBundle sampled at s = 0.
double evaluate_f(const Distribution& dist, const PhasePoint& foot);

} // namespace vkg
