#pragma once

#include "vkg/distribution.hpp"
#include "vkg/run_record.hpp"

namespace vkg {

// --- field splitting ---------------------------------------------------------

// E = E_osc(+) + E_osc(-) + E_r at every stored time.  The oscillatory parts
// are e^{lambda_pm t} Bhat_pm (complex conjugate pair, real sum); E_r is the
// exact difference and vanishes to roundoff for a run whose profile and
// Duhamel bookkeepings share quadrature samples.
struct OscillatorySplit {
    std::vector<double> times;
    std::vector<SpectralField> e_osc_plus;
    std::vector<SpectralField> e_osc_minus;
    std::vector<SpectralField> e_r;

    std::size_t index_of(double t) const;
    const SpectralField& osc(Sign s, std::size_t i) const {
        return s == Sign::plus ? e_osc_plus[i] : e_osc_minus[i];
    }
};

OscillatorySplit split_field(const StateHistory& history);

// --- resolvent kernels -------------------------------------------------------

// Fourier multiplier (lambda_pm(k) + i k.vhat)^{-order} at a fixed velocity.
// The denominator never vanishes: |lambda + i k.vhat| >= <k>(1 - |vhat|) > 0.
struct ResolventKernel {
    Sign sign = Sign::plus;
    int order = 1;
    Vec3 v{0, 0, 0};

    Complex denominator(const Vec3& k) const;
    Complex symbol(const Vec3& k) const;

    // Truncated geometric series of the order-1 symbol:
    //   -+ i <k>^{-1} sum_{n<=nmax} (-+ k.vhat/<k>)^n
    // with pointwise relative tail <= A0^{nmax+1}/(1-A0), A0 = |vhat|.
    Complex series_symbol(const Vec3& k, int nmax) const;

    double min_denominator(const BoxGrid& grid) const;
};

SpectralField resolvent_apply(const ResolventKernel& kernel, const SpectralField& field);
SpectralField resolvent_apply_series(const ResolventKernel& kernel, const SpectralField& field,
                                     int nmax);

// --- the oscillatory time-integral identity ----------------------------------

// Residual of
//   int_0^t E_osc(tau, x + vhat tau) dtau
//     = (E_osc(t, x + vhat t) - E_osc(0, x)) / omega,
// for the single mode E_osc = e^{i k.x + lambda_pm t}, omega = lambda_pm + i k.vhat.
// The left side is evaluated by adaptive quadrature.
double keyint_check(Sign sign, const Vec3& k, const Vec3& v, double t);

// --- pointwise analysis evaluators --------------------------------------------

// sum_pm E^{osc,j}_pm(t_i, x, v): the resolvent-smoothed oscillatory field
// along both branches (real for conjugate splits).
Vec3 collective_field(const OscillatorySplit& split, std::size_t time_index, int order,
                      const Vec3& x, const Vec3& v);

// sum_pm (w . grad_x) E^{osc,j}_pm(t_i, x, v)
Vec3 collective_field_gradient_contract(const OscillatorySplit& split, std::size_t time_index,
                                        int order, const Vec3& x, const Vec3& v, const Vec3& w);

// Q^tr and Q^{tr,1} with their three (two) summands.  Note the sign: the
// printed form of the first transport source has the first two terms negated
// relative to what the integration by parts produces; this implementation
// keeps the identity of Prop-3.2 type exact (see tests).
struct TransportSourceTerms {
    Vec3 resolvent{0, 0, 0}; // -+ sum_pm a_pm (phi_{pm,j} * F) contribution
    Vec3 gradient{0, 0, 0};  // the (grad_v vhat E) . grad_x E^{osc,j+1} contribution
    Vec3 remainder{0, 0, 0}; // E^r (order 1 only)
    Vec3 total{0, 0, 0};
};

TransportSourceTerms qtr_terms(const StateHistory& history, const OscillatorySplit& split,
                               std::size_t time_index, const Vec3& x, const Vec3& v);
TransportSourceTerms qtr1_terms(const StateHistory& history, const OscillatorySplit& split,
                                std::size_t time_index, const Vec3& x, const Vec3& v);

Vec3 qtr_at(const StateHistory& history, const OscillatorySplit& split, std::size_t time_index,
            const Vec3& x, const Vec3& v);
Vec3 qtr1_at(const StateHistory& history, const OscillatorySplit& split, std::size_t time_index,
             const Vec3& x, const Vec3& v);

// --- trajectory decompositions -------------------------------------------------

// V_{s,t} = v - V^osc_{t,t} + V^osc_{s,t} + V^tr_{s,t} per probe, with the
// residual of the identity.  The bundle must be anchored at t and carry
// samples at every stored history time in [s, t].
struct VelocityDecomposition {
    double s = 0.0, t = 0.0;
    std::vector<Vec3> v_osc_tt, v_osc_st, v_tr, residual;
    double residual_sup = 0.0;
    double v_osc_st_sup = 0.0;
    double v_tr_sup = 0.0;
};

VelocityDecomposition velocity_decomposition(const StateHistory& history,
                                             const OscillatorySplit& split,
                                             const CharacteristicBundle& bundle, double s,
                                             double t);

// Psi-hat decomposition of Prop-3.3 type.  For s == t all parts are zero by
// continuous extension; s > t is an ordering error.
struct StraighteningDecomposition {
    double s = 0.0, t = 0.0;
    std::vector<Vec3> psi_hat;       // quadrature of Vhat along the trajectory
    std::vector<Vec3> psi_hat_pos;   // (x - X_{s,t}) / (t - s)
    std::vector<Vec3> vhat_osc_tt, psi_osc, psi_tr, psi_q;
    std::vector<Vec3> residual;
    double residual_sup = 0.0;
    double straightening_defect = 0.0; // sup |psi_hat - psi_hat_pos|
    double max_psi_speed = 0.0;        // sup |psi_hat|
};

StraighteningDecomposition straightening_decomposition(const StateHistory& history,
                                                       const OscillatorySplit& split,
                                                       const CharacteristicBundle& bundle,
                                                       double s, double t);

// --- the Duhamel decoupling identity -------------------------------------------

// Checks, on the grid and at the stored kinetic-snapshot times,
//   G^osc_pm *_{t,x} S = G^osc_pm(t) *_x S_0 - a_pm(i dx) S_1(t)
//                        + G^osc_pm *_{t,x} S_2(t)
// with S_0, S_1, S_2 built from f0, f(t), and E f(t) through the resolvent
// kernels.  Returns the relative sup-norm residual per output time.
struct DuhamelDecouplingReport {
    std::vector<double> output_times;
    std::vector<double> relative_residual;
    double worst = 0.0;
};

DuhamelDecouplingReport duhamel_decoupling_check(const StateHistory& history,
                                                 const VelocityLattice& vlat,
                                                 const VelocityWeight& weight, Sign sign,
                                                 std::vector<double> output_times);

} // namespace vkg
