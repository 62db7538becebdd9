#include "vkg/simulation.hpp"

#include <cmath>

namespace vkg {

std::vector<PhasePoint> default_probes(const RunConfig& config) {
    std::vector<PhasePoint> probes;
    const double rx = config.f0_sigma_x;
    const double rv = 0.8 * config.f0_v_radius;
    const int d = config.dimension;
    for (double fx : {-1.0, 0.0, 1.0})
        for (double fv : {-1.0, -0.5, 0.25, 0.75}) {
            PhasePoint p;
            for (int c = 0; c < d; ++c) {
                p.x[static_cast<std::size_t>(c)] = fx * rx;
                p.v[static_cast<std::size_t>(c)] = fv * rv;
            }
            probes.push_back(p);
        }
    return probes;
}

RunResult run_simulation(const RunConfig& config) {
    config.validate();
    const BoxGrid grid = config.make_grid();
    const VelocityLattice vlat = config.make_vlattice();
    const QuadratureRule rule = config.quadrature_rule();

    auto dist = std::make_shared<Distribution>([&] {
        if (config.mode == "grid")
            return Distribution::grid_mode(grid, vlat, config.make_f0(), config.f0_v_radius);
        Distribution::ParticleLoading loading;
        loading.per_axis_x = config.particles_per_axis_x;
        loading.per_axis_v = config.particles_per_axis_v;
        loading.monte_carlo = config.monte_carlo;
        loading.mc_count = config.particle_count;
        loading.seed = config.seed;
        return Distribution::particle_mode(grid, vlat, config.make_f0(), config.f0_v_radius,
                                           loading);
    }());

    RunResult result{config, StateHistory(grid), {}, {}, {}, {}, dist, {}};

    auto state = make_field_state(grid, config.make_phi0_hat(grid), config.make_phi1_hat(grid));
    auto rho = dist->deposit();
    result.history.append(state, rho);

    const int steps = static_cast<int>(std::round(config.horizon / config.dt));
    const double dt = config.dt;

    const bool kinetic_on = config.kinetic_cadence > 0.0 && config.mode == "grid";
    const auto kinetic_stride =
        kinetic_on ? std::max<std::size_t>(1, static_cast<std::size_t>(
                                                  std::round(config.kinetic_cadence / dt)))
                   : 0;
    auto take_kinetic = [&](double t, std::size_t step_index) {
        if (!kinetic_on || step_index % kinetic_stride != 0)
            return;
        KineticSnapshot snap;
        snap.time = t;
        snap.f_values.resize(grid.size() * vlat.size());
        for (std::size_t xi = 0; xi < grid.size(); ++xi)
            for (std::size_t vi = 0; vi < vlat.size(); ++vi)
                snap.f_values[xi * vlat.size() + vi] = dist->value_at_node(xi, vi);
        result.history.kinetic.push_back(std::move(snap));
    };
    take_kinetic(0.0, 0);

    const auto norm_stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::round(config.output_cadence / dt)));
    auto record_norms = [&](double t, const FieldState& s, const SpectralField& rho_hat) {
        auto dx_rho = spectral_gradient(rho_hat);
        auto e_plus = oscillatory_field(s, Sign::plus);
        auto e_minus = oscillatory_field(s, Sign::minus);
        auto e = electric_field(s);
        SpectralField e_r = e;
        e_r -= e_plus;
        e_r -= e_minus;
        auto push = [&](const std::string& q, const NormSpec& spec, double v) {
            result.norms.push_back({t, q, spec.str(), v});
        };
        for (double p : {1.0, 2.0, kInfinity})
            push("S", NormSpec::lp(p), field_norm(rho_hat, NormSpec::lp(p)));
        push("dx S", NormSpec::lp(kInfinity), field_norm(dx_rho, NormSpec::lp(kInfinity)));
        for (double p : {2.0, kInfinity}) {
            const double v = std::max(field_norm(e_plus, NormSpec::lp(p)),
                                      field_norm(e_minus, NormSpec::lp(p)));
            push("E_osc", NormSpec::lp(p), v);
        }
        for (double p : {1.0, 2.0, kInfinity})
            push("E_r", NormSpec::lp(p), field_norm(e_r, NormSpec::lp(p)));
        push("E", NormSpec::lp(kInfinity), field_norm(e, NormSpec::lp(kInfinity)));
        result.snapshot_times.push_back(t);
    };
    record_norms(0.0, state, rho);

    for (int n = 0; n < steps; ++n) {
        const double t_n = n * dt;
        const double t_next = (n + 1) * dt;

        FrozenField field_n(electric_field(state), FrozenField::Eval::spline);
        dist->advance(field_n, 0.5 * dt);

        const std::vector<double> times{t_n, t_next};
        if (config.coupling) {
            auto rho_mid = dist->deposit();
            const std::vector<SpectralField> rhos{rho_mid, rho_mid};
            state = duhamel_step(state, times, rhos, rule);
        } else {
            state = propagate_homogeneous(state, dt);
        }

        FrozenField field_next(electric_field(state), FrozenField::Eval::spline);
        dist->advance(field_next, 0.5 * dt);

        rho = dist->deposit();
        result.history.append(state, rho);
        const std::size_t step_index = static_cast<std::size_t>(n + 1);
        take_kinetic(t_next, step_index);
        if (step_index % norm_stride == 0)
            record_norms(t_next, state, rho);
    }

    // forward probe trajectories at the output cadence
    result.probes = default_probes(config);
    std::vector<double> sample_times;
    for (std::size_t i = 0; i <= static_cast<std::size_t>(steps); i += norm_stride)
        sample_times.push_back(i * dt);
    auto ehist = result.history.electric_history();
    result.probe_trajectories =
        integrate_bundle(ehist, result.probes, 0.0, sample_times, dt);

    auto split = split_field(result.history);
    result.ledger = bootstrap_monitor(result.history, split, config.alpha0, config.ledger_depth);
    return result;
}

} // namespace vkg
