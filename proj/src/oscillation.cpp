#include "vkg/oscillation.hpp"

#include "vkg/reduce.hpp"

#include <algorithm>
#include <cmath>

namespace vkg {

namespace {

Complex resolvent_denominator(Sign sign, const Vec3& k, const Vec3& vhat) {
    const double mag = std::sqrt(dot(k, k));
    return osc_exponent(sign, mag) + Complex{0.0, dot(k, vhat)};
}

// phase tables for e^{i k.x} over one stored spectral field
struct PhaseTables {
    const BoxGrid* grid;
    std::array<std::vector<Complex>, 3> axis;

    PhaseTables(const BoxGrid& g, const Vec3& x) : grid(&g) {
        for (int c = 0; c < g.dimension(); ++c) {
            auto& t = axis[static_cast<std::size_t>(c)];
            t.resize(static_cast<std::size_t>(g.points_per_axis()));
            for (int i = 0; i < g.points_per_axis(); ++i) {
                const double kx = g.wavenumber_1d(i) * x[static_cast<std::size_t>(c)];
                t[static_cast<std::size_t>(i)] = Complex{std::cos(kx), std::sin(kx)};
            }
        }
    }

    Complex phase(std::size_t flat) const {
        auto idx = grid->unravel(flat);
        Complex p = axis[0][static_cast<std::size_t>(idx[0])];
        for (int c = 1; c < grid->dimension(); ++c)
            p *= axis[static_cast<std::size_t>(c)][static_cast<std::size_t>(idx[static_cast<std::size_t>(c)])];
        return p;
    }
};

} // namespace

std::size_t OscillatorySplit::index_of(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-10 * (1.0 + std::abs(t)))
            return i;
    throw MissingHistoryError("OscillatorySplit: no entry at requested time");
}

OscillatorySplit split_field(const StateHistory& history) {
    OscillatorySplit split;
    split.times = history.times;
    split.e_osc_plus.reserve(history.size());
    split.e_osc_minus.reserve(history.size());
    split.e_r.reserve(history.size());
    for (std::size_t i = 0; i < history.size(); ++i) {
        auto plus = oscillatory_field(history.states[i], Sign::plus);
        auto minus = oscillatory_field(history.states[i], Sign::minus);
        auto rem = electric_field(history.states[i]);
        rem -= plus;
        rem -= minus;
        split.e_osc_plus.push_back(std::move(plus));
        split.e_osc_minus.push_back(std::move(minus));
        split.e_r.push_back(std::move(rem));
    }
    return split;
}

Complex ResolventKernel::denominator(const Vec3& k) const {
    return resolvent_denominator(sign, k, relativistic_velocity(v));
}

Complex ResolventKernel::symbol(const Vec3& k) const {
    return std::pow(denominator(k), -order);
}

Complex ResolventKernel::series_symbol(const Vec3& k, int nmax) const {
    if (order != 1)
        throw DomainError("ResolventKernel: the series form is defined for order 1");
    const double mag = std::sqrt(dot(k, k));
    const double w = japanese_bracket(mag);
    const Vec3 vhat = relativistic_velocity(v);
    const double ratio = -sign_value(sign) * dot(k, vhat) / w;
    Complex geom{0.0, 0.0};
    double term = 1.0;
    for (int n = 0; n <= nmax; ++n) {
        geom += term;
        term *= ratio;
    }
    return Complex{0.0, -sign_value(sign) / w} * geom;
}

double ResolventKernel::min_denominator(const BoxGrid& grid) const {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::min(worst, std::abs(denominator(grid.wavevector(i))));
    return worst;
}

SpectralField resolvent_apply(const ResolventKernel& kernel, const SpectralField& field) {
    return apply_multiplier(field, [&kernel](const Vec3& k) { return kernel.symbol(k); });
}

SpectralField resolvent_apply_series(const ResolventKernel& kernel, const SpectralField& field,
                                     int nmax) {
    return apply_multiplier(field,
                            [&kernel, nmax](const Vec3& k) { return kernel.series_symbol(k, nmax); });
}

namespace {

Complex adaptive_simpson_rec(const std::function<Complex(double)>& f, double a, double b,
                             Complex fa, Complex fm, Complex fb, Complex whole, double tol,
                             int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const Complex flm = f(lm), frm = f(rm);
    const Complex left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const Complex right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const Complex delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

Complex adaptive_simpson(const std::function<Complex(double)>& f, double a, double b,
                         double tol) {
    const Complex fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const Complex whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

} // namespace

double keyint_check(Sign sign, const Vec3& k, const Vec3& v, double t) {
    const Vec3 vhat = relativistic_velocity(v);
    const Complex omega = resolvent_denominator(sign, k, vhat);
    auto integrand = [&](double tau) { return std::exp(omega * tau); };
    const Complex lhs = adaptive_simpson(integrand, 0.0, t, 1e-13);
    const Complex rhs = (std::exp(omega * t) - 1.0) / omega;
    return std::abs(lhs - rhs);
}

namespace {

// sum over k of field-hat(k) * denom(k)^{-order} * (contract ? i k.w : 1) * e^{i k.x}
void resolvent_smoothed_sum(const SpectralField& field_hat, Sign sign, int order, const Vec3& x,
                            const Vec3& vhat, const Vec3* contract, Complex out[3]) {
    const BoxGrid& grid = field_hat.grid();
    PhaseTables tables(grid, x);
    for (int c = 0; c < field_hat.components(); ++c)
        out[c] = Complex{0.0, 0.0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vec3 k = grid.wavevector(i);
        Complex factor = std::pow(resolvent_denominator(sign, k, vhat), -order) * tables.phase(i);
        if (contract)
            factor *= Complex{0.0, dot(k, *contract)};
        for (int c = 0; c < field_hat.components(); ++c)
            out[c] += field_hat.coeff(c, i) * factor;
    }
}

Vec3 eval_real_vec(const SpectralField& field, const Vec3& x) {
    auto z = evaluate_all_at(field, x);
    Vec3 out{0, 0, 0};
    for (int c = 0; c < field.components() && c < 3; ++c)
        out[static_cast<std::size_t>(c)] = z[static_cast<std::size_t>(c)].real();
    return out;
}

} // namespace

Vec3 collective_field(const OscillatorySplit& split, std::size_t time_index, int order,
                      const Vec3& x, const Vec3& v) {
    const Vec3 vhat = relativistic_velocity(v);
    Complex acc[3] = {{0, 0}, {0, 0}, {0, 0}};
    for (Sign s : {Sign::plus, Sign::minus}) {
        Complex part[3];
        resolvent_smoothed_sum(split.osc(s, time_index), s, order, x, vhat, nullptr, part);
        for (int c = 0; c < 3; ++c)
            acc[c] += part[c];
    }
    return {acc[0].real(), acc[1].real(), acc[2].real()};
}

Vec3 collective_field_gradient_contract(const OscillatorySplit& split, std::size_t time_index,
                                        int order, const Vec3& x, const Vec3& v, const Vec3& w) {
    const Vec3 vhat = relativistic_velocity(v);
    Complex acc[3] = {{0, 0}, {0, 0}, {0, 0}};
    for (Sign s : {Sign::plus, Sign::minus}) {
        Complex part[3];
        resolvent_smoothed_sum(split.osc(s, time_index), s, order, x, vhat, &w, part);
        for (int c = 0; c < 3; ++c)
            acc[c] += part[c];
    }
    return {acc[0].real(), acc[1].real(), acc[2].real()};
}

namespace {

// shared assembly of the order-j transport source terms at (t_i, x, v):
//   resolvent = sum_pm a_pm(i dx)(phi_{pm,j} * F), F = grad_x rho
//   gradient  = j * sum_pm (grad_v vhat E).grad_x E^{osc,j+1}_pm
TransportSourceTerms ibp_terms(const StateHistory& history, const OscillatorySplit& split,
                               std::size_t ti, const Vec3& x, const Vec3& v, int order) {
    TransportSourceTerms out;
    const Vec3 vhat = relativistic_velocity(v);
    const auto f_hat = spectral_gradient(history.rho_hats[ti]);
    const BoxGrid& grid = history.grid;

    // resolvent term: multiplier a_pm(k) (lambda_pm + i k.vhat)^{-order} on F
    {
        PhaseTables tables(grid, x);
        Complex acc[3] = {{0, 0}, {0, 0}, {0, 0}};
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Vec3 k = grid.wavevector(i);
            const double mag = std::sqrt(dot(k, k));
            const Complex phase = tables.phase(i);
            for (Sign s : {Sign::plus, Sign::minus}) {
                const Complex factor = osc_amplitude(s, mag) *
                                       std::pow(resolvent_denominator(s, k, vhat), -order) * phase;
                for (int c = 0; c < grid.dimension(); ++c)
                    acc[c] += f_hat.coeff(c, i) * factor;
            }
        }
        for (int c = 0; c < 3; ++c)
            out.resolvent[static_cast<std::size_t>(c)] = acc[c].real();
    }

    // gradient term
    Vec3 e_total{0, 0, 0};
    {
        const Vec3 a = eval_real_vec(split.e_osc_plus[ti], x);
        const Vec3 b = eval_real_vec(split.e_osc_minus[ti], x);
        const Vec3 r = eval_real_vec(split.e_r[ti], x);
        for (int c = 0; c < 3; ++c)
            e_total[static_cast<std::size_t>(c)] =
                a[static_cast<std::size_t>(c)] + b[static_cast<std::size_t>(c)] + r[static_cast<std::size_t>(c)];
    }
    const auto jac = grad_relativistic_velocity(v);
    Vec3 w{0, 0, 0};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            w[static_cast<std::size_t>(a)] += jac[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] *
                                              e_total[static_cast<std::size_t>(b)];
    const Vec3 grad_part =
        collective_field_gradient_contract(split, ti, order + 1, x, v, w);
    for (int c = 0; c < 3; ++c)
        out.gradient[static_cast<std::size_t>(c)] = order * grad_part[static_cast<std::size_t>(c)];

    out.remainder = eval_real_vec(split.e_r[ti], x);
    return out;
}

} // namespace

TransportSourceTerms qtr_terms(const StateHistory& history, const OscillatorySplit& split,
                               std::size_t time_index, const Vec3& x, const Vec3& v) {
    // Q^tr = -(resolvent) + (gradient) + E^r; the integration by parts fixes
    // the signs (the printed definition negates the first two terms).
    TransportSourceTerms t = ibp_terms(history, split, time_index, x, v, 1);
    TransportSourceTerms out;
    for (int c = 0; c < 3; ++c) {
        const auto sc = static_cast<std::size_t>(c);
        out.resolvent[sc] = -t.resolvent[sc];
        out.gradient[sc] = t.gradient[sc];
        out.remainder[sc] = t.remainder[sc];
        out.total[sc] = out.resolvent[sc] + out.gradient[sc] + out.remainder[sc];
    }
    return out;
}

TransportSourceTerms qtr1_terms(const StateHistory& history, const OscillatorySplit& split,
                                std::size_t time_index, const Vec3& x, const Vec3& v) {
    // Q^{tr,1} = +(resolvent, order 2) - 2 (gradient with E^{osc,3}); no E^r.
    TransportSourceTerms t = ibp_terms(history, split, time_index, x, v, 2);
    TransportSourceTerms out;
    for (int c = 0; c < 3; ++c) {
        const auto sc = static_cast<std::size_t>(c);
        out.resolvent[sc] = t.resolvent[sc];
        out.gradient[sc] = -t.gradient[sc];
        out.remainder[sc] = 0.0;
        out.total[sc] = out.resolvent[sc] + out.gradient[sc];
    }
    return out;
}

Vec3 qtr_at(const StateHistory& history, const OscillatorySplit& split, std::size_t time_index,
            const Vec3& x, const Vec3& v) {
    return qtr_terms(history, split, time_index, x, v).total;
}

Vec3 qtr1_at(const StateHistory& history, const OscillatorySplit& split, std::size_t time_index,
             const Vec3& x, const Vec3& v) {
    return qtr1_terms(history, split, time_index, x, v).total;
}

namespace {

// stored-history times inside [s, t] with their bundle sample indices
struct TrajectoryTimes {
    std::vector<std::size_t> history_index;
    std::vector<std::size_t> bundle_index;
    std::vector<double> tau;
};

TrajectoryTimes align_times(const StateHistory& history, const CharacteristicBundle& bundle,
                            double s, double t) {
    TrajectoryTimes out;
    for (std::size_t i = 0; i < history.times.size(); ++i) {
        const double tau = history.times[i];
        if (tau < s - 1e-10 || tau > t + 1e-10)
            continue;
        out.history_index.push_back(i);
        out.bundle_index.push_back(bundle.time_index(tau));
        out.tau.push_back(tau);
    }
    if (out.tau.size() < 2)
        throw MissingHistoryError("decomposition: need at least two stored times in [s, t]");
    return out;
}

} // namespace

VelocityDecomposition velocity_decomposition(const StateHistory& history,
                                             const OscillatorySplit& split,
                                             const CharacteristicBundle& bundle, double s,
                                             double t) {
    if (s > t)
        throw OrderingError("velocity_decomposition: requires s <= t");
    VelocityDecomposition out;
    out.s = s;
    out.t = t;
    const std::size_t ti = history.index_of(t);
    const std::size_t si = history.index_of(s);
    const auto& probes = bundle.probes;
    const auto& at_s = bundle.at_time(s);

    const auto traj = align_times(history, bundle, s, t);
    const auto weights = quadrature_weights(traj.tau, QuadratureRule::trapezoid);

    out.v_osc_tt.resize(probes.size());
    out.v_osc_st.resize(probes.size());
    out.v_tr.resize(probes.size());
    out.residual.resize(probes.size());

    for (std::size_t p = 0; p < probes.size(); ++p) {
        const Vec3 x = probes[p].x;
        const Vec3 v = probes[p].v;
        out.v_osc_tt[p] = collective_field(split, ti, 1, x, v);
        out.v_osc_st[p] = collective_field(split, si, 1, at_s[p].x, at_s[p].v);

        Vec3 vtr{0, 0, 0};
        for (std::size_t q = 0; q < traj.tau.size(); ++q) {
            const auto& state = bundle.samples[traj.bundle_index[q]][p];
            const Vec3 qtr = qtr_at(history, split, traj.history_index[q], state.x, state.v);
            for (int c = 0; c < 3; ++c)
                vtr[static_cast<std::size_t>(c)] -= weights[q] * qtr[static_cast<std::size_t>(c)];
        }
        out.v_tr[p] = vtr;

        for (int c = 0; c < 3; ++c) {
            const auto sc = static_cast<std::size_t>(c);
            out.residual[p][sc] = at_s[p].v[sc] - v[sc] + out.v_osc_tt[p][sc] -
                                  out.v_osc_st[p][sc] - vtr[sc];
        }
        for (int c = 0; c < 3; ++c) {
            out.residual_sup = std::max(out.residual_sup, std::abs(out.residual[p][static_cast<std::size_t>(c)]));
            out.v_osc_st_sup = std::max(out.v_osc_st_sup, std::abs(out.v_osc_st[p][static_cast<std::size_t>(c)]));
            out.v_tr_sup = std::max(out.v_tr_sup, std::abs(vtr[static_cast<std::size_t>(c)]));
        }
    }
    return out;
}

StraighteningDecomposition straightening_decomposition(const StateHistory& history,
                                                       const OscillatorySplit& split,
                                                       const CharacteristicBundle& bundle,
                                                       double s, double t) {
    if (s > t)
        throw OrderingError("straightening_decomposition: requires s <= t");
    StraighteningDecomposition out;
    out.s = s;
    out.t = t;
    const auto& probes = bundle.probes;
    const std::size_t n = probes.size();
    out.psi_hat.assign(n, Vec3{0, 0, 0});
    out.psi_hat_pos.assign(n, Vec3{0, 0, 0});
    out.vhat_osc_tt.assign(n, Vec3{0, 0, 0});
    out.psi_osc.assign(n, Vec3{0, 0, 0});
    out.psi_tr.assign(n, Vec3{0, 0, 0});
    out.psi_q.assign(n, Vec3{0, 0, 0});
    out.residual.assign(n, Vec3{0, 0, 0});

    if (s == t) { // continuous extension: psi-hat = vhat, all parts zero
        for (std::size_t p = 0; p < n; ++p) {
            out.psi_hat[p] = relativistic_velocity(probes[p].v);
            out.psi_hat_pos[p] = out.psi_hat[p];
            const double speed = std::sqrt(dot(out.psi_hat[p], out.psi_hat[p]));
            out.max_psi_speed = std::max(out.max_psi_speed, speed);
        }
        return out;
    }

    const std::size_t ti = history.index_of(t);
    const std::size_t si = history.index_of(s);
    const auto& at_s = bundle.at_time(s);
    const auto traj = align_times(history, bundle, s, t);
    const auto weights = quadrature_weights(traj.tau, QuadratureRule::trapezoid);
    const double span = t - s;

    for (std::size_t p = 0; p < n; ++p) {
        const Vec3 x = probes[p].x;
        const Vec3 v = probes[p].v;
        const Vec3 vhat = relativistic_velocity(v);
        const auto jac = grad_relativistic_velocity(v);

        // quadrature route for psi-hat, the V^Q average, and the transport part
        Vec3 quad{0, 0, 0}, psi_q{0, 0, 0}, psi_tr{0, 0, 0};
        for (std::size_t q = 0; q < traj.tau.size(); ++q) {
            const auto& state = bundle.samples[traj.bundle_index[q]][p];
            const Vec3 vh_tau = relativistic_velocity(state.v);
            const Vec3 qtr = qtr_at(history, split, traj.history_index[q], state.x, state.v);
            const Vec3 qtr1 = qtr1_at(history, split, traj.history_index[q], state.x, state.v);
            for (int c = 0; c < 3; ++c) {
                const auto sc = static_cast<std::size_t>(c);
                quad[sc] += weights[q] * vh_tau[sc];
                // V^Q_{tau,t} = Vhat - vhat - grad vhat (V - v)
                double lin = 0.0;
                for (int b = 0; b < 3; ++b)
                    lin += jac[sc][static_cast<std::size_t>(b)] *
                           (state.v[static_cast<std::size_t>(b)] - v[static_cast<std::size_t>(b)]);
                psi_q[sc] += weights[q] * (vh_tau[sc] - vhat[sc] - lin);
                psi_tr[sc] -= weights[q] * ((traj.tau[q] - s) * qtr[sc] + qtr1[sc]);
            }
        }
        for (int c = 0; c < 3; ++c) {
            const auto sc = static_cast<std::size_t>(c);
            out.psi_hat[p][sc] = quad[sc] / span;
            out.psi_q[p][sc] = psi_q[sc] / span;
            out.psi_tr[p][sc] = psi_tr[sc] / span;
            out.psi_hat_pos[p][sc] = (x[sc] - at_s[p].x[sc]) / span;
        }

        const Vec3 vosc_tt = collective_field(split, ti, 1, x, v);
        for (int a = 0; a < 3; ++a) {
            double acc = 0.0;
            for (int b = 0; b < 3; ++b)
                acc += jac[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] *
                       vosc_tt[static_cast<std::size_t>(b)];
            out.vhat_osc_tt[p][static_cast<std::size_t>(a)] = acc;
        }

        const Vec3 e2_t = collective_field(split, ti, 2, x, v);
        const Vec3 e2_s = collective_field(split, si, 2, at_s[p].x, at_s[p].v);
        for (int c = 0; c < 3; ++c)
            out.psi_osc[p][static_cast<std::size_t>(c)] =
                (e2_t[static_cast<std::size_t>(c)] - e2_s[static_cast<std::size_t>(c)]) / span;

        // residual of psi-hat = vhat - Vhat^osc_tt + grad vhat (psi_osc + psi_tr) + psi_q
        for (int a = 0; a < 3; ++a) {
            double hat_parts = 0.0;
            for (int b = 0; b < 3; ++b)
                hat_parts += jac[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] *
                             (out.psi_osc[p][static_cast<std::size_t>(b)] +
                              out.psi_tr[p][static_cast<std::size_t>(b)]);
            const auto sa = static_cast<std::size_t>(a);
            out.residual[p][sa] = out.psi_hat[p][sa] -
                                  (vhat[sa] - out.vhat_osc_tt[p][sa] + hat_parts +
                                   out.psi_q[p][sa]);
        }

        const double speed = std::sqrt(dot(out.psi_hat[p], out.psi_hat[p]));
        out.max_psi_speed = std::max(out.max_psi_speed, speed);
        for (int c = 0; c < 3; ++c) {
            const auto sc = static_cast<std::size_t>(c);
            out.residual_sup = std::max(out.residual_sup, std::abs(out.residual[p][sc]));
            out.straightening_defect =
                std::max(out.straightening_defect,
                         std::abs(out.psi_hat[p][sc] - out.psi_hat_pos[p][sc]));
        }
    }
    return out;
}

namespace {

// FT over x of one velocity column of a kinetic snapshot
SpectralField column_hat(const BoxGrid& grid, const std::vector<double>& f_values,
                         std::size_t nv, std::size_t vi) {
    std::vector<double> col(grid.size());
    for (std::size_t xi = 0; xi < grid.size(); ++xi)
        col[xi] = f_values[xi * nv + vi];
    return to_spectral(grid, col);
}

} // namespace

DuhamelDecouplingReport duhamel_decoupling_check(const StateHistory& history,
                                                 const VelocityLattice& vlat,
                                                 const VelocityWeight& weight, Sign sign,
                                                 std::vector<double> output_times) {
    if (history.kinetic.empty())
        throw DependencyError("duhamel_decoupling_check: run stored no kinetic snapshots");
    const BoxGrid& grid = history.grid;
    const std::size_t nv = vlat.size();
    const std::size_t nk = history.kinetic.size();
    const double dvol = vlat.cell_volume();

    // per-snapshot spectral ingredients:
    //   s_plain: the weighted density S_w itself (left side source)
    //   s_res:   resolvent-weighted density (S_0 at m = 0, S_1 at time t)
    //   s_two:   the quadratic source S_2
    std::vector<SpectralField> s_plain, s_res, s_two;
    std::vector<double> snap_times(nk);
    s_plain.reserve(nk);
    s_res.reserve(nk);
    s_two.reserve(nk);

    for (std::size_t m = 0; m < nk; ++m) {
        const auto& snap = history.kinetic[m];
        snap_times[m] = snap.time;
        const std::size_t hist_i = history.index_of(snap.time);
        auto e_samples = from_spectral(electric_field(history.states[hist_i]));

        SpectralField sp(grid, 1), sr(grid, 1), s2(grid, 1);
        for (std::size_t vi = 0; vi < nv; ++vi) {
            const Vec3 vnode = vlat.node(vi);
            const double wv = weight.value(vnode);
            const Vec3 gw = weight.gradient(vnode);
            const Vec3 vhat = relativistic_velocity(vnode);
            const auto jac = grad_relativistic_velocity(vnode);

            auto f_hat = column_hat(grid, snap.f_values, nv, vi);

            // E_c(x) f(x, v) transforms, one per spatial component
            std::array<SpectralField, 3> ef_hat{SpectralField(grid, 1), SpectralField(grid, 1),
                                                SpectralField(grid, 1)};
            for (int c = 0; c < grid.dimension(); ++c) {
                std::vector<double> prod(grid.size());
                for (std::size_t xi = 0; xi < grid.size(); ++xi)
                    prod[xi] = e_samples[static_cast<std::size_t>(c) * grid.size() + xi] *
                               snap.f_values[xi * nv + vi];
                ef_hat[static_cast<std::size_t>(c)] = to_spectral(grid, prod);
            }

            for (std::size_t i = 0; i < grid.size(); ++i) {
                const Vec3 k = grid.wavevector(i);
                const Complex kern = 1.0 / resolvent_denominator(sign, k, vhat);
                sp.coeff(0, i) += dvol * wv * f_hat.coeff(0, i);
                sr.coeff(0, i) += dvol * wv * kern * f_hat.coeff(0, i);

                // grad_v [kern w] . (E f)-hat, with
                // grad_v kern = -kern^2 i (grad_v vhat)^T k
                Complex acc{0.0, 0.0};
                for (int c = 0; c < grid.dimension(); ++c) {
                    double jk = 0.0;
                    for (int b = 0; b < grid.dimension(); ++b)
                        jk += jac[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)] *
                              k[static_cast<std::size_t>(b)];
                    const Complex dweight =
                        -kern * kern * Complex{0.0, jk} * wv + kern * gw[static_cast<std::size_t>(c)];
                    acc += dweight * ef_hat[static_cast<std::size_t>(c)].coeff(0, i);
                }
                s2.coeff(0, i) += dvol * acc;
            }
        }
        s_plain.push_back(std::move(sp));
        s_res.push_back(std::move(sr));
        s_two.push_back(std::move(s2));
    }

    // spacetime convolution against the oscillatory kernel up to time t
    auto convolve_to = [&](const std::vector<SpectralField>& sources, double t) {
        std::vector<double> taus;
        std::vector<std::size_t> idx;
        for (std::size_t m = 0; m < nk; ++m)
            if (snap_times[m] <= t + 1e-10) {
                taus.push_back(snap_times[m]);
                idx.push_back(m);
            }
        SpectralField acc(grid, 1);
        if (taus.size() < 2)
            return acc;
        auto w = quadrature_weights(taus, QuadratureRule::trapezoid);
        for (std::size_t q = 0; q < taus.size(); ++q) {
            const auto& src = sources[idx[q]];
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double mag = grid.wavenumber_magnitude(i);
                acc.coeff(0, i) += w[q] * osc_green_hat(sign, t - taus[q], mag) * src.coeff(0, i);
            }
        }
        return acc;
    };

    if (std::abs(history.kinetic.front().time) > 1e-12)
        throw DependencyError("duhamel_decoupling_check: first kinetic snapshot must sit at t=0");

    auto sup_of = [&](const SpectralField& hat) {
        auto z = from_spectral_complex(hat);
        double m = 0.0;
        for (const auto& v : z)
            m = std::max(m, std::abs(v));
        return m;
    };

    DuhamelDecouplingReport report;
    for (double t : output_times) {
        const std::size_t mt = [&] {
            for (std::size_t m = 0; m < nk; ++m)
                if (std::abs(snap_times[m] - t) <= 1e-10 * (1.0 + std::abs(t)))
                    return m;
            throw MissingHistoryError("duhamel_decoupling_check: output time not snapshotted");
        }();

        SpectralField lhs_hat = convolve_to(s_plain, t);
        SpectralField rhs_hat = convolve_to(s_two, t);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double mag = grid.wavenumber_magnitude(i);
            rhs_hat.coeff(0, i) += osc_green_hat(sign, t, mag) * s_res[0].coeff(0, i) -
                                   osc_amplitude(sign, mag) * s_res[mt].coeff(0, i);
        }

        SpectralField diff = lhs_hat;
        diff -= rhs_hat;
        const double scale = sup_of(lhs_hat);
        const double resid = sup_of(diff);
        report.output_times.push_back(t);
        report.relative_residual.push_back(scale > 0.0 ? resid / scale : resid);
        report.worst = std::max(report.worst, report.relative_residual.back());
    }
    return report;
}

} // namespace vkg
