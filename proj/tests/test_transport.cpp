#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vkg/distribution.hpp"
#include "vkg/norms.hpp"

#include <cmath>

using namespace vkg;

namespace {

double bump(double r2) { // C-infinity bump of unit radius in r^2 = |v|^2
    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) * std::exp(1.0) : 0.0;
}

PhaseProfile gaussian_bump_profile(double amp, double sigma_x, double v_radius) {
    return [=](const Vec3& x, const Vec3& v) {
        const double r2x = dot(x, x);
        const double r2v = dot(v, v) / (v_radius * v_radius);
        return amp * std::exp(-r2x / (2.0 * sigma_x * sigma_x)) * bump(r2v);
    };
}

FieldHistory zero_history(const BoxGrid& grid, double t0, double t1) {
    FieldHistory h(grid);
    h.append(t0, SpectralField(grid, grid.dimension()));
    h.append(t1, SpectralField(grid, grid.dimension()));
    return h;
}

} // namespace

TEST_CASE("relativistic velocity formula and speed bound") {
    CHECK(relativistic_velocity({0, 0, 0})[0] == 0.0);
    const Vec3 vh = relativistic_velocity({3, 0, 0});
    CHECK(vh[0] == doctest::Approx(3.0 / std::sqrt(10.0)).epsilon(1e-15));
    CHECK(vh[1] == 0.0);
    for (double big : {10.0, 1e3, 1e6}) {
        const Vec3 w = relativistic_velocity({big, big, big});
        CHECK(std::sqrt(dot(w, w)) < 1.0);
    }
}

TEST_CASE("grad_v vhat matches central finite differences to 1e-6") {
    const Vec3 v{0.7, -1.2, 0.4};
    auto j = grad_relativistic_velocity(v);
    const double h = 1e-5;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            Vec3 vp = v, vm = v;
            vp[static_cast<std::size_t>(b)] += h;
            vm[static_cast<std::size_t>(b)] -= h;
            const double fd = (relativistic_velocity(vp)[static_cast<std::size_t>(a)] -
                               relativistic_velocity(vm)[static_cast<std::size_t>(a)]) /
                              (2.0 * h);
            CHECK(std::abs(j[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] - fd) <= 1e-6);
        }
}

TEST_CASE("hat map inverts") {
    const Vec3 v{0.9, -0.4, 1.7};
    const Vec3 back = velocity_from_hat(relativistic_velocity(v));
    for (int c = 0; c < 3; ++c)
        CHECK(back[static_cast<std::size_t>(c)] == doctest::Approx(v[static_cast<std::size_t>(c)]).epsilon(1e-13));
}

TEST_CASE("free streaming characteristics are exact") {
    BoxGrid grid(1, 10.0, 32);
    auto hist = zero_history(grid, 0.0, 5.0);
    PhasePoint p;
    p.x = {1.3, 0, 0};
    p.v = {0.8, 0, 0};
    const double t = 4.0, s = 1.0;
    auto out = integrate_characteristic(hist, p, t, s, 0.05);
    const double vh = 0.8 / std::sqrt(1.0 + 0.64);
    CHECK(std::abs(out.x[0] - (1.3 - (t - s) * vh)) <= 1e-14);
    CHECK(std::abs(out.v[0] - 0.8) <= 1e-14);
}

TEST_CASE("manufactured field: RK4 converges at fourth order to a refined reference") {
    BoxGrid grid(1, 10.0, 32);
    const double eps = 0.4;
    FieldSampler field = [&](double t, const Vec3& x) -> Vec3 {
        return {eps * std::cos(t) * std::sin(M_PI * x[0] / 10.0), 0, 0};
    };
    PhasePoint p;
    p.x = {0.7, 0, 0};
    p.v = {0.5, 0, 0};
    const double t = 3.0, s = 0.0;
    auto ref = integrate_characteristic(field, p, t, s, 0.3 / 10.0);
    auto coarse = integrate_characteristic(field, p, t, s, 0.3);
    auto fine = integrate_characteristic(field, p, t, s, 0.15);
    const double e1 = std::abs(coarse.x[0] - ref.x[0]) + std::abs(coarse.v[0] - ref.v[0]);
    const double e2 = std::abs(fine.x[0] - ref.x[0]) + std::abs(fine.v[0] - ref.v[0]);
    CHECK(e1 / e2 >= 11.0); // fourth order, with slack for the reference
    CHECK(e1 / e2 <= 24.0);
}

TEST_CASE("backward then forward integration returns the start point") {
    BoxGrid grid(1, 10.0, 64);
    // moderately strong stored field so the round trip is nontrivial
    std::vector<double> samples(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        samples[i] = 0.3 * std::sin(M_PI * grid.point(i)[0] / 10.0);
    auto e_hat = to_spectral(grid, samples);
    SpectralField e_vec(grid, 1);
    e_vec = e_hat;
    FieldHistory hist(grid);
    hist.append(0.0, e_vec);
    hist.append(6.0, 0.5 * e_vec);

    PhasePoint p;
    p.x = {-2.0, 0, 0};
    p.v = {0.6, 0, 0};
    auto back = integrate_characteristic(hist, p, 5.0, 1.0, 0.01);
    auto fwd = integrate_characteristic(hist, back, 1.0, 5.0, 0.01);
    CHECK(std::abs(fwd.x[0] - p.x[0]) <= 1e-10);
    CHECK(std::abs(fwd.v[0] - p.v[0]) <= 1e-10);
}

TEST_CASE("bundle anchors exactly: X_tt = x, V_tt = v") {
    BoxGrid grid(1, 8.0, 32);
    auto hist = zero_history(grid, 0.0, 3.0);
    std::vector<PhasePoint> probes;
    PhasePoint p;
    p.x = {0.5, 0, 0};
    p.v = {-0.7, 0, 0};
    probes.push_back(p);
    auto bundle = integrate_bundle(hist, probes, 2.0, {0.0, 1.0, 2.0}, 0.05);
    const auto& anchor = bundle.at_time(2.0);
    CHECK(anchor[0].x[0] == p.x[0]);
    CHECK(anchor[0].v[0] == p.v[0]);
    // speed bound at every sample
    for (const auto& row : bundle.samples)
        for (const auto& q : row) {
            auto vh = relativistic_velocity(q.v);
            CHECK(std::sqrt(dot(vh, vh)) < 1.0);
        }
}

TEST_CASE("missing history raises") {
    BoxGrid grid(1, 8.0, 32);
    auto hist = zero_history(grid, 0.0, 1.0);
    PhasePoint p;
    CHECK_THROWS_AS(integrate_characteristic(hist, p, 0.0, 2.0, 0.1), MissingHistoryError);
}

TEST_CASE("grid-mode free streaming: f and feet stay exact") {
    BoxGrid grid(1, 10.0, 64);
    VelocityLattice vlat{1, 64, 2.0};
    auto dist = Distribution::grid_mode(grid, vlat, gaussian_bump_profile(1.0, 1.5, 1.0), 1.0);
    FrozenField none(grid);
    for (int step = 0; step < 40; ++step)
        dist.advance(none, 0.05);
    const double t = dist.time();
    CHECK(t == doctest::Approx(2.0));
    // feet equal the free-streaming feet exactly
    for (std::size_t xi : {std::size_t{0}, std::size_t{11}, std::size_t{40}}) {
        for (std::size_t vi : {std::size_t{3}, std::size_t{31}, std::size_t{60}}) {
            auto foot = dist.foot_at_node(xi, vi);
            const double x = grid.point(xi)[0];
            const double v = vlat.node(vi)[0];
            const double vh = v / std::sqrt(1.0 + v * v);
            CHECK(std::abs(foot.x[0] - (x - t * vh)) <= 1e-13);
            CHECK(std::abs(foot.v[0] - v) <= 1e-13);
        }
    }
}

TEST_CASE("evaluate_f returns f0 at the foot; free transport matches closed form") {
    BoxGrid grid(1, 10.0, 64);
    VelocityLattice vlat{1, 64, 2.0};
    auto profile = gaussian_bump_profile(1.0, 1.5, 1.0);
    auto dist = Distribution::grid_mode(grid, vlat, profile, 1.0);

    // t = 0: foot is the probe itself
    PhasePoint probe;
    probe.x = {0.4, 0, 0};
    probe.v = {0.3, 0, 0};
    CHECK(evaluate_f(dist, probe) == doctest::Approx(profile(probe.x, probe.v)).epsilon(1e-14));

    // foot beyond the lattice but outside the declared support -> 0
    PhasePoint far;
    far.v = {3.5, 0, 0};
    CHECK(evaluate_f(dist, far) == 0.0);
}

TEST_CASE("separable data deposit: rho = g(x) * int h dv at t = 0") {
    BoxGrid grid(1, 10.0, 64);
    VelocityLattice vlat{1, 256, 2.0};
    const double sigma = 1.5;
    auto dist = Distribution::grid_mode(grid, vlat, gaussian_bump_profile(1.0, sigma, 1.0), 1.0);
    auto rho_hat = dist.deposit();
    auto rho = from_spectral(rho_hat);

    // independent quadrature of the bump over v
    double hint = 0.0;
    const int nq = 40000;
    const double dv = 2.0 / nq;
    for (int i = 0; i < nq; ++i) {
        const double v = -1.0 + (i + 0.5) * dv;
        hint += bump(v * v) * dv;
    }
    for (std::size_t i = 0; i < grid.size(); i += 7) {
        const double x = grid.point(i)[0];
        const double want = std::exp(-x * x / (2.0 * sigma * sigma)) * hint;
        CHECK(std::abs(rho[i] - want) <= 1e-8);
    }
}

TEST_CASE("free-streaming density matches a direct quadrature oracle to 1e-8") {
    BoxGrid grid(1, 10.0, 128);
    VelocityLattice vlat{1, 256, 2.0};
    const double sigma = 1.0;
    auto profile = gaussian_bump_profile(1.0, sigma, 1.0);
    auto dist = Distribution::grid_mode(grid, vlat, profile, 1.0);
    FrozenField none(grid);
    const double t = 3.0;
    for (int step = 0; step < 60; ++step)
        dist.advance(none, 0.05);
    auto rho = from_spectral(dist.deposit());

    for (std::size_t i = 0; i < grid.size(); i += 13) {
        const double x = grid.point(i)[0];
        // oracle: rho(t,x) = int f0(x - t vhat, v) dv by fine midpoint quadrature
        double want = 0.0;
        const int nq = 20000;
        const double dv = 2.0 / nq;
        for (int q = 0; q < nq; ++q) {
            const double v = -1.0 + (q + 0.5) * dv;
            const double vh = v / std::sqrt(1.0 + v * v);
            want += profile({x - t * vh, 0, 0}, {v, 0, 0}) * dv;
        }
        CHECK(std::abs(rho[i] - want) <= 1e-8);
    }
}

TEST_CASE("grid-mode mass conservation under a frozen field") {
    BoxGrid grid(1, 10.0, 256);
    VelocityLattice vlat{1, 256, 2.0};
    auto dist = Distribution::grid_mode(grid, vlat, gaussian_bump_profile(1.0, 1.0, 1.0), 1.0);
    std::vector<double> samples(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        samples[i] = 1e-3 * std::sin(M_PI * grid.point(i)[0] / 10.0);
    FrozenField field(to_spectral(grid, samples), FrozenField::Eval::spline);
    const double m0 = dist.total_mass();
    for (int step = 0; step < 50; ++step)
        dist.advance(field, 0.02); // one unit of time
    const double m1 = dist.total_mass();
    CHECK(std::abs(m1 - m0) <= 1e-8 * m0);
}

TEST_CASE("particle mode: mass is exact and the deposit is mass-consistent") {
    BoxGrid grid(1, 10.0, 64);
    VelocityLattice vlat{1, 64, 2.0};
    Distribution::ParticleLoading loading;
    loading.per_axis_x = 64;
    loading.per_axis_v = 64;
    auto dist = Distribution::particle_mode(grid, vlat, gaussian_bump_profile(1.0, 1.0, 1.0),
                                            1.0, loading);
    const double m0 = dist.total_mass();
    std::vector<double> samples(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        samples[i] = 0.05 * std::sin(M_PI * grid.point(i)[0] / 10.0);
    FrozenField field(to_spectral(grid, samples), FrozenField::Eval::spline);
    for (int step = 0; step < 20; ++step)
        dist.advance(field, 0.05);
    CHECK(dist.total_mass() == m0); // weights never change
    auto rho_hat = dist.deposit();
    const double mass_from_rho = rho_hat.coeff(0, 0).real() * grid.volume();
    CHECK(mass_from_rho == doctest::Approx(m0).epsilon(1e-12));
}

TEST_CASE("deposit cutoff removes high wavenumbers in particle mode") {
    BoxGrid grid(1, 5.0, 64);
    VelocityLattice vlat{1, 32, 2.0};
    Distribution::ParticleLoading loading;
    loading.per_axis_x = 16;
    loading.per_axis_v = 16;
    auto dist = Distribution::particle_mode(grid, vlat, gaussian_bump_profile(1.0, 1.0, 1.0),
                                            1.0, loading);
    auto rho_hat = dist.deposit();
    const double cutoff = (2.0 / 3.0) * grid.nyquist_wavenumber();
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid.wavenumber_1d(static_cast<int>(i))) > cutoff)
            CHECK(std::abs(rho_hat.coeff(0, i)) == 0.0);
}

TEST_CASE("support touching the lattice boundary raises on deposit") {
    BoxGrid grid(1, 5.0, 32);
    VelocityLattice vlat{1, 8, 1.02}; // support 1.0 leaves a fraction of a cell
    auto dist = Distribution::grid_mode(grid, vlat, gaussian_bump_profile(1.0, 1.0, 1.0), 1.0);
    CHECK_THROWS_AS(dist.deposit(), SupportViolationError);
}

TEST_CASE("support must sit inside the lattice") {
    BoxGrid grid(1, 5.0, 32);
    VelocityLattice vlat{1, 32, 1.0};
    CHECK_THROWS_AS(Distribution::grid_mode(grid, vlat, gaussian_bump_profile(1, 1, 1), 1.5),
                    SupportViolationError);
}

TEST_CASE("free-streaming Jacobians: det(dX/dx) = 1 and |dX/dv| = (t-s) <v>^-3") {
    BoxGrid grid(1, 10.0, 32);
    auto hist = zero_history(grid, 0.0, 4.0);
    ProbeLattice lat;
    lat.dim = 1;
    lat.nx = 5;
    lat.nv = 5;
    lat.x0 = {-1.0, 0, 0};
    lat.v0 = {0.2, 0, 0};
    lat.hx = 1e-3;
    lat.hv = 1e-3;
    auto bundle = integrate_bundle(hist, lat.points(), 3.5, {0.5, 3.5}, 0.05);
    auto rep = jacobians(bundle, 0, lat);
    CHECK(rep.max_abs_det_dXdx_minus_1 <= 1e-12);
    const double span = 3.0;
    for (const auto& s : rep.interior) {
        const double v = s.probe.v[0];
        const double want = span / std::pow(1.0 + v * v, 1.5);
        CHECK(std::abs(std::abs(s.det_dXdv) - want) <= 1e-5 * want);
    }
}

TEST_CASE("phase-space volume: flow det error drops at RK4 order under dtau halving") {
    BoxGrid grid(1, 10.0, 64);
    std::vector<double> samples(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        samples[i] = 0.8 * std::sin(M_PI * grid.point(i)[0] / 10.0);
    auto e_hat = to_spectral(grid, samples);
    FieldHistory hist(grid);
    for (int i = 0; i <= 200; ++i)
        hist.append(i * 0.02, std::cos(i * 0.02) * e_hat);

    ProbeLattice lat;
    lat.dim = 1;
    lat.nx = 5;
    lat.nv = 5;
    lat.x0 = {0.3, 0, 0};
    lat.v0 = {-0.4, 0, 0};
    lat.hx = 1e-3;
    lat.hv = 1e-3;

    auto det_defect = [&](double dtau) {
        auto bundle = integrate_bundle(hist, lat.points(), 4.0, {0.0, 4.0}, dtau);
        auto rep = jacobians(bundle, 0, lat);
        return rep.max_abs_det_flow_minus_1;
    };
    const double coarse = det_defect(0.4);
    const double fine = det_defect(0.2);
    CHECK(coarse / fine >= 3.5);
}

TEST_CASE("degenerate stencil raises") {
    BoxGrid grid(1, 10.0, 32);
    auto hist = zero_history(grid, 0.0, 1.0);
    ProbeLattice lat;
    lat.dim = 1;
    lat.nx = 2;
    lat.nv = 2;
    lat.hx = 0.1;
    lat.hv = 0.1;
    auto bundle = integrate_bundle(hist, lat.points(), 1.0, {0.0, 1.0}, 0.1);
    CHECK_THROWS_AS(jacobians(bundle, 0, lat), StencilError);
}
