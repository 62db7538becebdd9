#pragma once

#include "vkg/distribution.hpp"
#include "vkg/norms.hpp"
#include "vkg/oscillation.hpp"
#include "vkg/run_record.hpp"

#include <string>
#include <vector>

namespace vkg {

// --- power-law fitting --------------------------------------------------------

enum class FitEnvelope {
    none,        // fit the raw samples
    period_mean, // average over consecutive oscillation periods first
};

struct DecayReport {
    std::string quantity;
    std::string norm;
    double t0 = 0.0, t1 = 0.0;
    std::vector<double> times;  // samples used by the fit
    std::vector<double> values;
    double gamma = 0.0;    // least-squares slope on log-log
    double residual = 0.0; // rms of the log-log fit residuals
};

// Least-squares power-law exponent on the window [t0, t1].  Values must be
// positive on the window (DomainError otherwise); fewer than three usable
// samples is an InsufficientDataError.  With period_mean the samples are
// first averaged over consecutive buckets of the given period (the k = 0
// Klein-Gordon period 2*pi by default).
DecayReport fit_decay_exponent(const std::vector<double>& times,
                               const std::vector<double>& values, double t0, double t1,
                               FitEnvelope envelope = FitEnvelope::none,
                               double period = 2.0 * M_PI);

// --- scattering ---------------------------------------------------------------

struct ScatteringReport {
    std::vector<PhasePoint> probes; // states at t = 0
    std::vector<double> times;      // geometric sequence t_m
    std::vector<std::vector<Vec3>> velocities; // [time][probe]
    std::vector<Vec3> v_infinity;              // per probe
    std::vector<double> error_bar;             // per probe, from the last two levels
    std::vector<double> convergence;           // per time: sup_p |V(t_m) - Vinf|
    std::vector<double> position_defect;       // per time: sup_p |X - x - t hat(Vinf)|
    double assumed_tail = 0.5;
};

// Forward trajectories from the t = 0 probes through the stored field
// history, with V_inf by Richardson extrapolation along the geometric time
// sequence under an assumed t^{-q} tail (q = d/2 unless stated).  Fewer than
// three time levels is an InsufficientDataError.
ScatteringReport scattering_limits(const FieldHistory& history, std::vector<PhasePoint> probes,
                                   std::vector<double> times, double dtau,
                                   double tail_exponent);

// Cauchy defect of f along straightened trajectories:
//   sup_p | f(t, x + t hat(Vinf), Vinf) - f(t', x + t' hat(Vinf), Vinf) |
// for t < t'.  Throws WrapError when a shifted probe leaves the box.
double f_infinity_check(const Distribution& dist, const FieldHistory& history,
                        const ScatteringReport& scattering, double t, double t_prime,
                        double dtau);

// --- bootstrap-norm monitor -----------------------------------------------------

struct BootstrapRow {
    std::string quantity;
    std::string norm;
    double exponent = 0.0; // the monitored rate <t>^exponent
    double eps_min = 0.0;  // smallest eps validating the inequality on the run
    bool skipped = false;
    std::string note;
};

struct BootstrapLedger {
    int alpha0 = 8;
    int max_derivative = 4;
    std::vector<BootstrapRow> rows;
};

// Evaluates the decay/boundedness inequality family with d-adjusted
// exponents on the stored run and reports, per row, the smallest eps that
// validates it over the whole window.  Orders above max_derivative are
// emitted as skipped rows.
BootstrapLedger bootstrap_monitor(const StateHistory& history, const OscillatorySplit& split,
                                  int alpha0, int max_derivative);

} // namespace vkg
