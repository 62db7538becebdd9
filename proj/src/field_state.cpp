#include "vkg/field_state.hpp"

#include "vkg/reduce.hpp"

#include <cmath>

namespace vkg {

const char* quadrature_rule_name(QuadratureRule rule) {
    switch (rule) {
    case QuadratureRule::trapezoid:
        return "trapezoid";
    case QuadratureRule::simpson:
        return "simpson";
    }
    return "?";
}

std::vector<double> quadrature_weights(std::span<const double> times, QuadratureRule rule) {
    if (times.size() < 2)
        throw DomainError("quadrature_weights: need at least two samples");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw OrderingError("quadrature_weights: times must increase");
    std::vector<double> w(times.size(), 0.0);
    if (rule == QuadratureRule::trapezoid) {
        for (std::size_t i = 0; i + 1 < times.size(); ++i) {
            const double h = times[i + 1] - times[i];
            w[i] += 0.5 * h;
            w[i + 1] += 0.5 * h;
        }
        return w;
    }
    // Simpson: odd uniform sample count
    const std::size_t n = times.size();
    if (n % 2 == 0)
        throw DomainError("quadrature_weights: simpson needs an odd sample count");
    const double h = times[1] - times[0];
    for (std::size_t i = 2; i < n; ++i)
        if (std::abs((times[i] - times[i - 1]) - h) > 1e-12 * std::abs(h))
            throw DomainError("quadrature_weights: simpson needs uniform samples");
    for (std::size_t i = 0; i + 2 < n; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    return w;
}

double FieldState::profile_conjugacy_defect() const {
    double worst = 0.0;
    for (int c = 0; c < grid.dimension(); ++c) {
        auto plus = bplus_hat.component(c);
        auto minus = bminus_hat.component(c);
        for (std::size_t i = 0; i < plus.size(); ++i) {
            const std::size_t j = grid.conjugate_index(i);
            worst = std::max(worst, std::abs(minus[i] - std::conj(plus[j])));
        }
    }
    return worst;
}

SpectralField initial_oscillatory_source(const SpectralField& phi0_hat,
                                         const SpectralField& phi1_hat, Sign sign) {
    if (phi0_hat.grid() != phi1_hat.grid())
        throw DimensionError("initial_oscillatory_source: mismatched grids");
    const BoxGrid& grid = phi0_hat.grid();
    SpectralField out(grid, 1);
    auto p0 = phi0_hat.component(0);
    auto p1 = phi1_hat.component(0);
    auto dst = out.component(0);
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const double mag = grid.wavenumber_magnitude(i);
        dst[i] = -p1[i] - osc_exponent(sign, mag) * p0[i];
    }
    return out;
}

FieldState make_field_state(const BoxGrid& grid, const SpectralField& phi0_hat,
                            const SpectralField& phi1_hat) {
    FieldState state(grid);
    state.phi_hat = phi0_hat;
    state.dtphi_hat = phi1_hat;
    for (Sign s : {Sign::plus, Sign::minus}) {
        auto source = spectral_gradient(initial_oscillatory_source(phi0_hat, phi1_hat, s));
        auto& b = state.profile(s);
        for (int c = 0; c < grid.dimension(); ++c) {
            auto src = source.component(c);
            auto dst = b.component(c);
            for (std::size_t i = 0; i < dst.size(); ++i)
                dst[i] = osc_amplitude(s, grid.wavenumber_magnitude(i)) * src[i];
        }
    }
    return state;
}

FieldState propagate_homogeneous(const FieldState& state, double dt) {
    if (dt < 0.0)
        throw DomainError("propagate_homogeneous: dt must be >= 0");
    FieldState out = state;
    out.time = state.time + dt;
    const BoxGrid& grid = state.grid;
    auto phi = state.phi_hat.component(0);
    auto dtphi = state.dtphi_hat.component(0);
    auto phi_out = out.phi_hat.component(0);
    auto dtphi_out = out.dtphi_hat.component(0);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double mag = grid.wavenumber_magnitude(i);
        const double g = green_hat(dt, mag);
        const double dg = green_dt_hat(dt, mag);
        const double w2 = 1.0 + mag * mag;
        phi_out[i] = dg * phi[i] + g * dtphi[i];
        dtphi_out[i] = -w2 * g * phi[i] + dg * dtphi[i];
    }
    return out;
}

void accumulate_profiles(FieldState& state, std::span<const double> times,
                         std::span<const SpectralField> f_hats, QuadratureRule rule) {
    if (times.size() != f_hats.size())
        throw DimensionError("accumulate_profiles: times and samples mismatch");
    const BoxGrid& grid = state.grid;
    for (const auto& f : f_hats)
        if (f.grid() != grid || f.components() != grid.dimension())
            throw DimensionError("accumulate_profiles: sample has wrong grid or components");
    const auto w = quadrature_weights(times, rule);
    for (Sign s : {Sign::plus, Sign::minus}) {
        auto& b = state.profile(s);
        for (std::size_t q = 0; q < times.size(); ++q) {
            for (int c = 0; c < grid.dimension(); ++c) {
                auto dst = b.component(c);
                auto src = f_hats[q].component(c);
                for (std::size_t i = 0; i < dst.size(); ++i) {
                    const double mag = grid.wavenumber_magnitude(i);
                    const Complex lam = osc_exponent(s, mag);
                    const Complex damp = std::exp(-lam * times[q]);
                    dst[i] += w[q] * damp * osc_amplitude(s, mag) * src[i];
                }
            }
        }
    }
}

FieldState duhamel_step(const FieldState& state, std::span<const double> times,
                        std::span<const SpectralField> rho_hats, QuadratureRule rule) {
    if (times.size() < 2)
        throw DomainError("duhamel_step: need at least the two endpoint samples");
    if (times.size() != rho_hats.size())
        throw DimensionError("duhamel_step: times and samples mismatch");
    const BoxGrid& grid = state.grid;
    for (const auto& r : rho_hats)
        if (r.grid() != grid || r.components() != 1)
            throw DimensionError("duhamel_step: rho sample has wrong grid or components");
    if (std::abs(times.front() - state.time) > 1e-12)
        throw OrderingError("duhamel_step: first sample must sit at the state time");

    const double t_end = times.back();
    FieldState out = propagate_homogeneous(state, t_end - state.time);

    const auto w = quadrature_weights(times, rule);
    auto phi_out = out.phi_hat.component(0);
    auto dtphi_out = out.dtphi_hat.component(0);
    for (std::size_t q = 0; q < times.size(); ++q) {
        auto rho = rho_hats[q].component(0);
        const double lag = t_end - times[q];
        for (std::size_t i = 0; i < rho.size(); ++i) {
            const double mag = grid.wavenumber_magnitude(i);
            phi_out[i] -= w[q] * green_hat(lag, mag) * rho[i];
            dtphi_out[i] -= w[q] * green_dt_hat(lag, mag) * rho[i];
        }
    }

    std::vector<SpectralField> f_hats;
    f_hats.reserve(rho_hats.size());
    for (const auto& rho : rho_hats)
        f_hats.push_back(spectral_gradient(rho));
    accumulate_profiles(out, times, f_hats, rule);
    return out;
}

SpectralField electric_field(const FieldState& state) {
    auto grad = spectral_gradient(state.phi_hat);
    return -1.0 * grad;
}

SpectralField oscillatory_field(const FieldState& state, Sign sign) {
    const BoxGrid& grid = state.grid;
    SpectralField out = state.profile(sign);
    for (int c = 0; c < grid.dimension(); ++c) {
        auto dst = out.component(c);
        for (std::size_t i = 0; i < dst.size(); ++i) {
            const double mag = grid.wavenumber_magnitude(i);
            dst[i] *= std::exp(osc_exponent(sign, mag) * state.time);
        }
    }
    return out;
}

double kg_energy(const FieldState& state) {
    const BoxGrid& grid = state.grid;
    auto phi = state.phi_hat.component(0);
    auto dtphi = state.dtphi_hat.component(0);
    CompensatedSum acc;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double mag = grid.wavenumber_magnitude(i);
        acc.add(std::norm(dtphi[i]) + (1.0 + mag * mag) * std::norm(phi[i]));
    }
    return 0.5 * grid.volume() * acc.value();
}

} // namespace vkg
