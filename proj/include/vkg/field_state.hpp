#pragma once

#include "vkg/green.hpp"
#include "vkg/spectral_field.hpp"

#include <span>
#include <vector>

namespace vkg {

// Quadrature rule for the in-step time integrals (Duhamel source and the
// oscillatory profiles).  Trapezoid is the default; Simpson needs an odd
// number of uniformly spaced samples.
enum class QuadratureRule { trapezoid, simpson };

const char* quadrature_rule_name(QuadratureRule rule);

// Quadrature weights for samples at the given (increasing) times.
std::vector<double> quadrature_weights(std::span<const double> times, QuadratureRule rule);

// Klein-Gordon field state: (phihat, dtphihat) plus the two oscillatory
// profiles Bhat_pm(t,k) satisfying Ehat_osc_pm = e^{lambda_pm t} Bhat_pm.
//
// phihat, dtphihat are Hermitian-symmetric (real fields).  The profiles are
// individually complex; realness of the field shows up as the pair conjugacy
//   Bhat_minus(k) = conj(Bhat_plus(-k)),
// so the sum of the two oscillatory fields is real.
struct FieldState {
    BoxGrid grid;
    double time = 0.0;
    SpectralField phi_hat;    // scalar
    SpectralField dtphi_hat;  // scalar
    SpectralField bplus_hat;  // d components
    SpectralField bminus_hat; // d components

    explicit FieldState(const BoxGrid& g)
        : grid(g), phi_hat(g, 1), dtphi_hat(g, 1), bplus_hat(g, g.dimension()),
          bminus_hat(g, g.dimension()) {}

    const SpectralField& profile(Sign s) const {
        return s == Sign::plus ? bplus_hat : bminus_hat;
    }
    SpectralField& profile(Sign s) { return s == Sign::plus ? bplus_hat : bminus_hat; }

    // Max deviation from the pair conjugacy above.
    double profile_conjugacy_defect() const;
};

// Initial-data oscillatory source Shat0_pm = -phihat1 - lambda_pm(k) phihat0.
SpectralField initial_oscillatory_source(const SpectralField& phi0_hat,
                                         const SpectralField& phi1_hat, Sign sign);

// State at t = 0 with Bhat_pm(0) = a_pm(k) grad_x Shat0_pm.
FieldState make_field_state(const BoxGrid& grid, const SpectralField& phi0_hat,
                            const SpectralField& phi1_hat);

// Exact homogeneous Klein-Gordon propagation by dt >= 0:
//   phihat(t+dt)   = Ghat(dt) dtphihat(t) + dtGhat(dt) phihat(t)
//   dtphihat(t+dt) = dtGhat(dt) dtphihat(t) - <k>^2 Ghat(dt) phihat(t)
// The profiles and the time stamp move along unchanged.
FieldState propagate_homogeneous(const FieldState& state, double dt);

// Full step over [state.time, times.back()]: homogeneous propagation plus the
// Duhamel source term
//   phihat += - int Ghat(t_end - s) rhohat(s) ds
// by the stated quadrature, with Bhat_pm accumulated from F = grad rho over
// the same samples so the two bookkeepings stay synchronized.
FieldState duhamel_step(const FieldState& state, std::span<const double> times,
                        std::span<const SpectralField> rho_hats, QuadratureRule rule);

// Bhat_pm += int e^{-lambda_pm s} a_pm(k) Fhat(s,k) ds over the samples.
// F must be a d-component (gradient) field.
void accumulate_profiles(FieldState& state, std::span<const double> times,
                         std::span<const SpectralField> f_hats, QuadratureRule rule);

// E = -grad_x phi as a d-component spectral field.
SpectralField electric_field(const FieldState& state);

// Oscillatory part Ehat_osc_pm(t,k) = e^{lambda_pm(k) t} Bhat_pm(t,k).
SpectralField oscillatory_field(const FieldState& state, Sign sign);

// Homogeneous Klein-Gordon energy 1/2 int |dtphi|^2 + |grad phi|^2 + |phi|^2.
double kg_energy(const FieldState& state);

} // namespace vkg
