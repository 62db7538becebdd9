#pragma once

#include "vkg/spectral_field.hpp"
#include "vkg/spline.hpp"
#include "vkg/velocity.hpp"

#include <memory>
#include <vector>

namespace vkg {

struct PhasePoint {
    Vec3 x{0.0, 0.0, 0.0};
    Vec3 v{0.0, 0.0, 0.0};
};

// Static-in-time spatial evaluator of a d-component real field.  The spline
// mode (periodic tensor cubic on the grid samples) is used by the bulk
// transport loop; the spectral mode (exact Fourier sum) by the diagnostic
// characteristic integrator.
class FrozenField {
public:
    enum class Eval { spline, spectral };

    FrozenField(const SpectralField& field_hat, Eval mode);

    // Zero field on a grid (free streaming).
    explicit FrozenField(const BoxGrid& grid);

    Vec3 operator()(const Vec3& x) const;

    const BoxGrid& grid() const { return grid_; }

private:
    BoxGrid grid_;
    Eval mode_;
    std::shared_ptr<const SpectralField> hat_;
    std::shared_ptr<const TensorSpline> spline_;
};

// Stored electric-field history: E(t_i, .) at increasing times.  Evaluation
// interpolates linearly in t between stored steps and exactly (spectral sum)
// in x.  Time queries outside the stored range throw MissingHistoryError.
class FieldHistory {
public:
    explicit FieldHistory(const BoxGrid& grid) : grid_(grid) {}

    void append(double t, SpectralField e_hat);

    const BoxGrid& grid() const { return grid_; }
    const std::vector<double>& times() const { return times_; }
    const SpectralField& field_at(std::size_t i) const { return e_hats_[i]; }

    Vec3 electric(double t, const Vec3& x) const;

    // Bracket a query time: index i with times[i] <= t <= times[i+1].
    std::size_t locate(double t) const;

private:
    BoxGrid grid_;
    std::vector<double> times_;
    std::vector<SpectralField> e_hats_;
};

// One RK4 trajectory of dx/dtau = vhat(v), dv/dtau = E(tau, x) between two
// times (either direction).  The step count is ceil(|t1 - t0| / dtau).
PhasePoint integrate_characteristic(const FieldHistory& history, PhasePoint start,
                                    double t_from, double t_to, double dtau);

// Same integrator against an arbitrary field sampler (analytic test fields).
using FieldSampler = std::function<Vec3(double t, const Vec3& x)>;
PhasePoint integrate_characteristic(const FieldSampler& field, PhasePoint start,
                                    double t_from, double t_to, double dtau);

// Sampled backward/forward characteristics (X_{s,t}, V_{s,t}) over a probe
// set anchored at time t.  samples[i][p] is the state at sample_times[i] of
// the trajectory through probes[p] at the anchor time.
struct CharacteristicBundle {
    double anchor_time = 0.0;
    std::vector<PhasePoint> probes;
    std::vector<double> sample_times;
    std::vector<std::vector<PhasePoint>> samples;
    std::size_t wrap_events = 0; // probes that left the box (wrapped by periodicity)

    std::size_t time_index(double s) const;
    const std::vector<PhasePoint>& at_time(double s) const { return samples[time_index(s)]; }
};

CharacteristicBundle integrate_bundle(const FieldHistory& history,
                                      std::vector<PhasePoint> probes, double anchor_time,
                                      std::vector<double> sample_times, double dtau);

// Probe lattices for finite-difference Jacobians: a product of d position
// axes (spacing hx) and d velocity axes (spacing hv), row-major with x axes
// slowest.
struct ProbeLattice {
    int dim = 1;
    int nx = 1, nv = 1; // points per axis
    Vec3 x0{}, v0{};
    double hx = 0.0, hv = 0.0;

    std::size_t size() const;
    std::vector<PhasePoint> points() const;
    std::size_t index(const std::array<int, 3>& ix, const std::array<int, 3>& iv) const;
};

struct JacobianSample {
    PhasePoint probe;
    std::array<std::array<double, 3>, 3> dXdx{}, dXdv{}, dVdx{}, dVdv{};
    double det_dXdx = 0.0;
    double det_dXdv = 0.0;
    double det_flow = 0.0; // full 2d x 2d phase-space flow matrix
};

struct JacobianReport {
    std::vector<JacobianSample> interior;
    double max_abs_det_dXdx_minus_1 = 0.0;
    double max_abs_det_flow_minus_1 = 0.0;
    double error_estimate = 0.0; // O(h^2) Richardson estimate on det(dX/dx)
};

// Central-difference Jacobians of (X,V) with respect to the probe (x,v) at
// one stored sample time.  Throws StencilError when the lattice is too small
// for the stencil.
JacobianReport jacobians(const CharacteristicBundle& bundle, std::size_t time_index,
                         const ProbeLattice& lattice);

} // namespace vkg
