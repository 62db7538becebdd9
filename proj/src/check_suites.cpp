#include "vkg/check_suites.hpp"

#include "vkg/littlewood_paley.hpp"

#include <cmath>
#include <random>

namespace vkg {

std::vector<std::string> check_suite_names() {
    return {"green", "bernstein", "keyint", "decomp", "duhamel", "scatter"};
}

CheckReport run_check_suite(const std::string& name) {
    if (name == "green")
        return check_green();
    if (name == "bernstein")
        return check_bernstein();
    if (name == "keyint")
        return check_keyint();
    if (name == "decomp")
        return check_decomp();
    if (name == "duhamel")
        return check_duhamel();
    if (name == "scatter")
        return check_scatter();
    throw UsageError("unknown check suite '" + name + "'");
}

namespace {

SpectralField gaussian_hat(const BoxGrid& grid, double sigma, double amp) {
    std::vector<double> samples(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto x = grid.point(i);
        double r2 = 0.0;
        for (int c = 0; c < grid.dimension(); ++c)
            r2 += x[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
        samples[i] = amp * std::exp(-r2 / (2.0 * sigma * sigma));
    }
    return to_spectral(grid, samples);
}

SpectralField random_smooth_field(const BoxGrid& grid, unsigned seed, double decay) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    SpectralField f(grid, 1);
    auto block = f.component(0);
    for (std::size_t i = 0; i < block.size(); ++i)
        block[i] = std::pow(japanese_bracket(grid.wavenumber_magnitude(i)), -decay) *
                   Complex{unif(rng), unif(rng)};
    f.symmetrize();
    return f;
}

} // namespace

CheckReport check_green() {
    CheckReport report;
    report.suite = "green";

    double g0 = 0.0, dg0 = 0.0, split = 0.0;
    for (double k : {0.0, 0.13, 1.0, 2.5, 8.0, 33.0, 120.0}) {
        g0 = std::max(g0, std::abs(green_hat(0.0, k)));
        dg0 = std::max(dg0, std::abs(green_dt_hat(0.0, k) - 1.0));
        for (double t : {0.0, 0.4, 1.9, 11.0, 30.0})
            split = std::max(split, std::abs(osc_green_hat(Sign::plus, t, k) +
                                             osc_green_hat(Sign::minus, t, k) -
                                             Complex{green_hat(t, k), 0.0}));
    }
    report.add_max("Ghat(0,k)", g0, 1e-14);
    report.add_max("dtGhat(0,k)-1", dg0, 1e-14);
    report.add_max("kernel split defect", split, 1e-15);

    BoxGrid grid(1, 10.0, 128);
    auto state = make_field_state(grid, gaussian_hat(grid, 1.0, 1.0),
                                  gaussian_hat(grid, 1.3, 0.5));
    const double e0 = kg_energy(state);
    for (int n = 0; n < 1000; ++n)
        state = propagate_homogeneous(state, 0.01);
    report.add_max("energy drift over 1000 steps", std::abs(kg_energy(state) - e0) / e0, 1e-10);
    return report;
}

CheckReport check_bernstein() {
    CheckReport report;
    report.suite = "bernstein";

    BoxGrid grid(1, M_PI, 256);
    report.add_max("partition of unity defect", lp_partition_defect(grid), 1e-12);
    BoxGrid grid2(2, 4.0, 32);
    report.add_max("partition of unity defect (d=2)", lp_partition_defect(grid2), 1e-12);

    // L2 Bernstein per shell, constant normalized by 2^{j+1}
    double l2_const = 0.0;
    double linf_const = 0.0;
    double mult_ratio = 0.0;
    for (unsigned seed = 0; seed < 100; ++seed) {
        auto h = random_smooth_field(grid, 3000 + seed, 1.0);
        for (int j = 1; j <= 4; ++j) {
            auto pj = lp_project(h, j);
            auto dpj = apply_derivative(pj, {1, 0, 0});
            const double denom2 = field_norm(pj, NormSpec::lp(2));
            if (denom2 > 0.0)
                l2_const = std::max(l2_const, field_norm(dpj, NormSpec::lp(2)) /
                                                  (std::ldexp(1.0, j + 1) * denom2));
            const double denomi = field_norm(h, NormSpec::lp(kInfinity));
            if (denomi > 0.0)
                linf_const = std::max(linf_const, field_norm(dpj, NormSpec::lp(kInfinity)) /
                                                      (std::ldexp(1.0, j) * denomi));
        }
        auto g = apply_multiplier(h, [](const std::array<double, 3>& k) {
            return Complex{1.0 / japanese_bracket(k[0]), 0.0};
        });
        for (double p : {1.0, 2.0, kInfinity}) {
            const double denom = field_norm(h, NormSpec::lp(p));
            if (denom > 0.0)
                mult_ratio = std::max(mult_ratio, field_norm(g, NormSpec::lp(p)) / denom);
        }
    }
    report.add_max("Bernstein L2 shell constant", l2_const, 1.0 + 1e-12);
    report.add_max("Bernstein Linf corpus constant", linf_const, 4.0);
    report.add_max("multiplier <k>^-1 Lp ratio", mult_ratio, 2.0);

    // interpolation-ratio stability under N doubling
    BoxGrid coarse(1, 8.0, 64), fine(1, 8.0, 128);
    const double rc = interpolation_check(gaussian_hat(coarse, 1.0, 1.0), {1, 0, 0}, {2, 0, 0});
    const double rf = interpolation_check(gaussian_hat(fine, 1.0, 1.0), {1, 0, 0}, {2, 0, 0});
    report.add_max("interpolation ratio drift under N doubling", std::abs(rc - rf) / rc, 0.05);
    return report;
}

CheckReport check_keyint() {
    CheckReport report;
    report.suite = "keyint";
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uk(-8.0, 8.0);
    std::uniform_real_distribution<double> uv(-3.0, 3.0);
    std::uniform_real_distribution<double> ut(0.1, 12.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Vec3 k{uk(rng), 0, 0};
        const Vec3 v{uv(rng), 0, 0};
        worst = std::max(worst, keyint_check(i % 2 == 0 ? Sign::plus : Sign::minus, k, v,
                                             ut(rng)));
    }
    report.add_max("max residual over 100 draws", worst, 1e-10);
    return report;
}

RunConfig small_run_config(int grid_n, int velocity_n, double half_length, double dt,
                           double horizon, double eps0, bool kinetic_snapshots) {
    RunConfig cfg;
    cfg.dimension = 1;
    cfg.half_length = half_length;
    cfg.grid_n = grid_n;
    cfg.velocity_n = velocity_n;
    cfg.v_max = 2.0;
    cfg.dt = dt;
    cfg.horizon = horizon;
    cfg.eps0 = eps0;
    cfg.f0_sigma_x = 1.0;
    cfg.f0_v_radius = 1.0;
    cfg.phi0_amp = 1.0;
    cfg.phi1_amp = 0.0;
    cfg.phi_sigma = 1.0;
    cfg.support_radius = half_length - horizon - 1.0;
    cfg.output_cadence = std::max(dt, 0.25);
    cfg.kinetic_cadence = kinetic_snapshots ? dt : 0.0;
    cfg.validate();
    return cfg;
}

DecompositionResiduals decomposition_residuals(const RunResult& run) {
    const auto& hist = run.history;
    auto split = split_field(hist);
    auto ehist = hist.electric_history();
    std::vector<PhasePoint> probes;
    for (double x : {-1.0, 0.0, 1.2})
        for (double v : {-0.7, 0.2, 0.8}) {
            PhasePoint p;
            p.x = {x, 0, 0};
            p.v = {v, 0, 0};
            probes.push_back(p);
        }
    const double t = hist.times.back();
    auto bundle = integrate_bundle(ehist, probes, t, hist.times, run.config.dt);
    DecompositionResiduals out;
    out.velocity = velocity_decomposition(hist, split, bundle, 0.0, t).residual_sup;
    out.straightening = straightening_decomposition(hist, split, bundle, 0.0, t).residual_sup;
    return out;
}

double duhamel_residual(const RunResult& run, Sign sign) {
    const auto& hist = run.history;
    if (hist.kinetic.empty())
        throw DependencyError("duhamel_residual: run stored no kinetic snapshots");
    auto report = duhamel_decoupling_check(hist, run.config.make_vlattice(), VelocityWeight{},
                                           sign, {hist.kinetic.back().time});
    return report.worst;
}

CheckReport check_decomp() {
    CheckReport report;
    report.suite = "decomp";
    auto coarse = run_simulation(small_run_config(64, 64, 16.0, 0.05, 3.0, 1e-2, false));
    auto fine = run_simulation(small_run_config(64, 64, 16.0, 0.025, 3.0, 1e-2, false));
    auto rc = decomposition_residuals(coarse);
    auto rf = decomposition_residuals(fine);
    report.add("velocity residual ratio under dt halving", rc.velocity / rf.velocity, 3.5, 4.5);
    report.add("straightening residual ratio under dt halving",
               rc.straightening / rf.straightening, 3.5, 4.5);
    return report;
}

CheckReport check_duhamel() {
    CheckReport report;
    report.suite = "duhamel";
    auto base = run_simulation(small_run_config(64, 64, 16.0, 0.05, 5.0, 1e-2, true));
    auto refined = run_simulation(small_run_config(64, 128, 16.0, 0.025, 5.0, 1e-2, true));
    const double r0 = duhamel_residual(base, Sign::plus);
    const double r1 = duhamel_residual(refined, Sign::plus);
    report.add_max("relative residual at base resolution", r0, 0.05);
    report.add("residual shrink under 2x refinement", r0 / r1, 1.8, kInfinity);
    return report;
}

CheckReport check_scatter() {
    CheckReport report;
    report.suite = "scatter";

    // frozen field: exact limits, zero f-infinity defect
    BoxGrid grid(1, 20.0, 64);
    FieldHistory frozen(grid);
    frozen.append(0.0, SpectralField(grid, 1));
    frozen.append(20.0, SpectralField(grid, 1));
    std::vector<PhasePoint> probes(2);
    probes[0].x = {0.5, 0, 0};
    probes[0].v = {0.4, 0, 0};
    probes[1].x = {-0.3, 0, 0};
    probes[1].v = {-0.6, 0, 0};
    auto scat = scattering_limits(frozen, probes, {2.0, 4.0, 8.0, 16.0}, 0.05, 0.5);
    double verr = 0.0;
    for (std::size_t p = 0; p < probes.size(); ++p)
        verr = std::max(verr, std::abs(scat.v_infinity[p][0] - probes[p].v[0]));
    report.add_max("frozen-field V_inf error", verr, 1e-12);

    VelocityLattice vlat{1, 64, 2.0};
    RunConfig cfg = small_run_config(64, 64, 20.0, 0.05, 16.0, 1e-3, false);
    auto dist = Distribution::grid_mode(grid, vlat, cfg.make_f0(), cfg.f0_v_radius);
    report.add_max("frozen-field f_inf defect",
                   f_infinity_check(dist, frozen, scat, 4.0, 8.0, 0.05), 1e-12);

    // small-data run: fit the velocity convergence exponent
    auto run = run_simulation(small_run_config(128, 128, 40.0, 0.05, 30.0, 1e-3, false));
    auto ehist = run.history.electric_history();
    auto live = scattering_limits(ehist, default_probes(run.config), {3.0, 6.0, 12.0, 24.0},
                                  0.05, 0.5);
    std::vector<double> conv_t, conv_v;
    bool monotone = true;
    for (std::size_t m = 0; m < live.times.size(); ++m) {
        conv_t.push_back(live.times[m]);
        conv_v.push_back(live.convergence[m]);
        if (m > 0 && conv_v[m] > conv_v[m - 1])
            monotone = false;
    }
    report.add("V(t) convergence monotone", monotone ? 1.0 : 0.0, 1.0, 1.0);
    auto fit = fit_decay_exponent(conv_t, conv_v, 2.9, 24.1);
    report.add("V convergence exponent", fit.gamma, -0.65, -0.35);
    return report;
}

} // namespace vkg
