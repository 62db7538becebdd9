#include "vkg/characteristics.hpp"

#include <algorithm>
#include <cmath>

namespace vkg {

namespace {

TensorSpline build_field_spline(const SpectralField& field_hat) {
    const BoxGrid& grid = field_hat.grid();
    auto samples = from_spectral(field_hat); // component-major real samples
    std::vector<TensorSpline::Axis> axes;
    for (int c = 0; c < grid.dimension(); ++c)
        axes.push_back({grid.points_per_axis(), -grid.half_length(), grid.spacing(), true});
    return TensorSpline(axes, field_hat.components(), samples);
}

} // namespace

FrozenField::FrozenField(const SpectralField& field_hat, Eval mode)
    : grid_(field_hat.grid()), mode_(mode) {
    if (field_hat.components() != grid_.dimension())
        throw DimensionError("FrozenField: expects a d-component field");
    if (mode_ == Eval::spectral)
        hat_ = std::make_shared<SpectralField>(field_hat);
    else
        spline_ = std::make_shared<TensorSpline>(build_field_spline(field_hat));
}

FrozenField::FrozenField(const BoxGrid& grid) : grid_(grid), mode_(Eval::spectral) {}

Vec3 FrozenField::operator()(const Vec3& x) const {
    Vec3 out{0.0, 0.0, 0.0};
    if (!hat_ && !spline_)
        return out;
    if (mode_ == Eval::spectral) {
        auto z = evaluate_all_at(*hat_, x);
        for (int c = 0; c < grid_.dimension(); ++c)
            out[static_cast<std::size_t>(c)] = z[static_cast<std::size_t>(c)].real();
        return out;
    }
    spline_->eval({x.data(), static_cast<std::size_t>(grid_.dimension())},
                  {out.data(), static_cast<std::size_t>(grid_.dimension())});
    return out;
}

void FieldHistory::append(double t, SpectralField e_hat) {
    if (e_hat.grid() != grid_ || e_hat.components() != grid_.dimension())
        throw DimensionError("FieldHistory::append: wrong grid or component count");
    if (!times_.empty() && t <= times_.back())
        throw OrderingError("FieldHistory::append: times must increase");
    times_.push_back(t);
    e_hats_.push_back(std::move(e_hat));
}

std::size_t FieldHistory::locate(double t) const {
    if (times_.empty())
        throw MissingHistoryError("FieldHistory: empty history");
    const double slack = 1e-9 * (1.0 + std::abs(times_.back()));
    if (t < times_.front() - slack || t > times_.back() + slack)
        throw MissingHistoryError("FieldHistory: query time outside stored range");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times_.begin());
    if (i > 0)
        --i;
    if (i + 1 >= times_.size())
        i = times_.size() - 2 + (times_.size() == 1 ? 1 : 0);
    if (times_.size() == 1)
        return 0;
    return std::min(i, times_.size() - 2);
}

Vec3 FieldHistory::electric(double t, const Vec3& x) const {
    if (times_.size() == 1) {
        auto z = evaluate_all_at(e_hats_[0], x);
        Vec3 out{0, 0, 0};
        for (int c = 0; c < grid_.dimension(); ++c)
            out[static_cast<std::size_t>(c)] = z[static_cast<std::size_t>(c)].real();
        return out;
    }
    const std::size_t i = locate(t);
    const double t0 = times_[i], t1 = times_[i + 1];
    const double w = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
    auto a = evaluate_all_at(e_hats_[i], x);
    auto b = evaluate_all_at(e_hats_[i + 1], x);
    Vec3 out{0, 0, 0};
    for (int c = 0; c < grid_.dimension(); ++c)
        out[static_cast<std::size_t>(c)] =
            (1.0 - w) * a[static_cast<std::size_t>(c)].real() +
            w * b[static_cast<std::size_t>(c)].real();
    return out;
}

namespace {

template <typename Field>
inline void rk4_step(const Field& field, PhasePoint& p, double tau, double h) {
    auto rhs = [&field](double t, const PhasePoint& q, Vec3& dx, Vec3& dv) {
        dx = relativistic_velocity(q.v);
        dv = field(t, q.x);
    };
    Vec3 k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
    rhs(tau, p, k1x, k1v);
    PhasePoint q;
    for (int c = 0; c < 3; ++c) {
        q.x[static_cast<std::size_t>(c)] = p.x[static_cast<std::size_t>(c)] + 0.5 * h * k1x[static_cast<std::size_t>(c)];
        q.v[static_cast<std::size_t>(c)] = p.v[static_cast<std::size_t>(c)] + 0.5 * h * k1v[static_cast<std::size_t>(c)];
    }
    rhs(tau + 0.5 * h, q, k2x, k2v);
    for (int c = 0; c < 3; ++c) {
        q.x[static_cast<std::size_t>(c)] = p.x[static_cast<std::size_t>(c)] + 0.5 * h * k2x[static_cast<std::size_t>(c)];
        q.v[static_cast<std::size_t>(c)] = p.v[static_cast<std::size_t>(c)] + 0.5 * h * k2v[static_cast<std::size_t>(c)];
    }
    rhs(tau + 0.5 * h, q, k3x, k3v);
    for (int c = 0; c < 3; ++c) {
        q.x[static_cast<std::size_t>(c)] = p.x[static_cast<std::size_t>(c)] + h * k3x[static_cast<std::size_t>(c)];
        q.v[static_cast<std::size_t>(c)] = p.v[static_cast<std::size_t>(c)] + h * k3v[static_cast<std::size_t>(c)];
    }
    rhs(tau + h, q, k4x, k4v);
    for (int c = 0; c < 3; ++c) {
        p.x[static_cast<std::size_t>(c)] +=
            h / 6.0 * (k1x[static_cast<std::size_t>(c)] + 2.0 * k2x[static_cast<std::size_t>(c)] +
                       2.0 * k3x[static_cast<std::size_t>(c)] + k4x[static_cast<std::size_t>(c)]);
        p.v[static_cast<std::size_t>(c)] +=
            h / 6.0 * (k1v[static_cast<std::size_t>(c)] + 2.0 * k2v[static_cast<std::size_t>(c)] +
                       2.0 * k3v[static_cast<std::size_t>(c)] + k4v[static_cast<std::size_t>(c)]);
    }
}

} // namespace

namespace {

template <typename Field>
PhasePoint integrate_impl(const Field& field, PhasePoint start, double t_from, double t_to,
                          double dtau) {
    if (dtau <= 0.0)
        throw DomainError("integrate_characteristic: dtau must be positive");
    const double span = t_to - t_from;
    if (span == 0.0)
        return start;
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / dtau - 1e-12)));
    const double h = span / n;
    PhasePoint p = start;
    for (int i = 0; i < n; ++i)
        rk4_step(field, p, t_from + i * h, h);
    return p;
}

} // namespace

PhasePoint integrate_characteristic(const FieldHistory& history, PhasePoint start,
                                    double t_from, double t_to, double dtau) {
    auto field = [&history](double t, const Vec3& x) { return history.electric(t, x); };
    return integrate_impl(field, start, t_from, t_to, dtau);
}

PhasePoint integrate_characteristic(const FieldSampler& field, PhasePoint start,
                                    double t_from, double t_to, double dtau) {
    auto wrap = [&field](double t, const Vec3& x) { return field(t, x); };
    return integrate_impl(wrap, start, t_from, t_to, dtau);
}

std::size_t CharacteristicBundle::time_index(double s) const {
    for (std::size_t i = 0; i < sample_times.size(); ++i)
        if (std::abs(sample_times[i] - s) <= 1e-12 * (1.0 + std::abs(s)))
            return i;
    throw MissingHistoryError("CharacteristicBundle: no sample stored at requested time");
}

CharacteristicBundle integrate_bundle(const FieldHistory& history,
                                      std::vector<PhasePoint> probes, double anchor_time,
                                      std::vector<double> sample_times, double dtau) {
    CharacteristicBundle bundle;
    bundle.anchor_time = anchor_time;
    bundle.probes = std::move(probes);
    std::sort(sample_times.begin(), sample_times.end());
    bundle.sample_times = sample_times;
    bundle.samples.assign(sample_times.size(), bundle.probes);

    const double L = history.grid().half_length();

    // walk backward through samples <= anchor, forward through samples > anchor
    std::vector<std::size_t> below, above;
    for (std::size_t i = 0; i < sample_times.size(); ++i)
        (sample_times[i] <= anchor_time ? below : above).push_back(i);
    std::sort(below.begin(), below.end(),
              [&](std::size_t a, std::size_t b) { return sample_times[a] > sample_times[b]; });

    for (std::size_t p = 0; p < bundle.probes.size(); ++p) {
        PhasePoint cur = bundle.probes[p];
        double tcur = anchor_time;
        for (std::size_t i : below) {
            cur = integrate_characteristic(history, cur, tcur, sample_times[i], dtau);
            tcur = sample_times[i];
            bundle.samples[i][p] = cur;
            for (int c = 0; c < history.grid().dimension(); ++c)
                if (std::abs(cur.x[static_cast<std::size_t>(c)]) > L)
                    ++bundle.wrap_events;
        }
        cur = bundle.probes[p];
        tcur = anchor_time;
        for (std::size_t i : above) {
            cur = integrate_characteristic(history, cur, tcur, sample_times[i], dtau);
            tcur = sample_times[i];
            bundle.samples[i][p] = cur;
            for (int c = 0; c < history.grid().dimension(); ++c)
                if (std::abs(cur.x[static_cast<std::size_t>(c)]) > L)
                    ++bundle.wrap_events;
        }
    }
    return bundle;
}

std::size_t ProbeLattice::size() const {
    std::size_t n = 1;
    for (int c = 0; c < dim; ++c)
        n *= static_cast<std::size_t>(nx) * static_cast<std::size_t>(nv);
    return n;
}

std::vector<PhasePoint> ProbeLattice::points() const {
    std::vector<PhasePoint> out;
    out.reserve(size());
    // row-major: x axes slowest, then v axes
    std::array<int, 6> idx{};
    const int total_axes = 2 * dim;
    while (true) {
        PhasePoint p;
        for (int c = 0; c < dim; ++c) {
            p.x[static_cast<std::size_t>(c)] = x0[static_cast<std::size_t>(c)] + idx[static_cast<std::size_t>(c)] * hx;
            p.v[static_cast<std::size_t>(c)] =
                v0[static_cast<std::size_t>(c)] + idx[static_cast<std::size_t>(dim + c)] * hv;
        }
        out.push_back(p);
        int axis = total_axes - 1;
        while (axis >= 0) {
            const int limit = axis < dim ? nx : nv;
            if (++idx[static_cast<std::size_t>(axis)] < limit)
                break;
            idx[static_cast<std::size_t>(axis)] = 0;
            --axis;
        }
        if (axis < 0)
            break;
    }
    return out;
}

std::size_t ProbeLattice::index(const std::array<int, 3>& ix, const std::array<int, 3>& iv) const {
    std::size_t flat = 0;
    for (int c = 0; c < dim; ++c)
        flat = flat * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix[static_cast<std::size_t>(c)]);
    for (int c = 0; c < dim; ++c)
        flat = flat * static_cast<std::size_t>(nv) + static_cast<std::size_t>(iv[static_cast<std::size_t>(c)]);
    return flat;
}

namespace {

double det_small(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    std::vector<std::vector<double>> a = m;
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col]))
                piv = r;
        if (a[piv][col] == 0.0)
            return 0.0;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c)
                a[r][c] -= f * a[col][c];
        }
    }
    return det;
}

} // namespace

JacobianReport jacobians(const CharacteristicBundle& bundle, std::size_t time_index,
                         const ProbeLattice& lattice) {
    if (lattice.nx < 3 || lattice.nv < 3 || lattice.hx <= 0.0 || lattice.hv <= 0.0)
        throw StencilError("jacobians: lattice too small or degenerate for a central stencil");
    if (bundle.probes.size() != lattice.size())
        throw StencilError("jacobians: bundle probes do not match the lattice");
    const auto& states = bundle.samples.at(time_index);
    const int d = lattice.dim;

    JacobianReport report;

    auto state_at = [&](std::array<int, 3> ix, std::array<int, 3> iv) -> const PhasePoint& {
        return states[lattice.index(ix, iv)];
    };

    // iterate interior nodes
    std::array<int, 3> ix{}, iv{};
    auto loop_axis = [&](auto&& self, int axis) -> void {
        if (axis == 2 * d) {
            JacobianSample s;
            s.probe = bundle.probes[lattice.index(ix, iv)];
            for (int a = 0; a < d; ++a) {
                auto ixp = ix, ixm = ix, ivp = iv, ivm = iv;
                ixp[static_cast<std::size_t>(a)] += 1;
                ixm[static_cast<std::size_t>(a)] -= 1;
                ivp[static_cast<std::size_t>(a)] += 1;
                ivm[static_cast<std::size_t>(a)] -= 1;
                const auto& xp = state_at(ixp, iv);
                const auto& xm = state_at(ixm, iv);
                const auto& vp = state_at(ix, ivp);
                const auto& vm = state_at(ix, ivm);
                for (int b = 0; b < d; ++b) {
                    s.dXdx[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] =
                        (xp.x[static_cast<std::size_t>(b)] - xm.x[static_cast<std::size_t>(b)]) / (2.0 * lattice.hx);
                    s.dVdx[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] =
                        (xp.v[static_cast<std::size_t>(b)] - xm.v[static_cast<std::size_t>(b)]) / (2.0 * lattice.hx);
                    s.dXdv[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] =
                        (vp.x[static_cast<std::size_t>(b)] - vm.x[static_cast<std::size_t>(b)]) / (2.0 * lattice.hv);
                    s.dVdv[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] =
                        (vp.v[static_cast<std::size_t>(b)] - vm.v[static_cast<std::size_t>(b)]) / (2.0 * lattice.hv);
                }
            }
            std::vector<std::vector<double>> mx(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d)));
            std::vector<std::vector<double>> mv = mx;
            std::vector<std::vector<double>> flow(static_cast<std::size_t>(2 * d), std::vector<double>(static_cast<std::size_t>(2 * d)));
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) {
                    mx[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = s.dXdx[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                    mv[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = s.dXdv[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                    flow[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = s.dXdx[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                    flow[static_cast<std::size_t>(a)][static_cast<std::size_t>(d + b)] = s.dXdv[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                    flow[static_cast<std::size_t>(d + a)][static_cast<std::size_t>(b)] = s.dVdx[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                    flow[static_cast<std::size_t>(d + a)][static_cast<std::size_t>(d + b)] = s.dVdv[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                }
            s.det_dXdx = det_small(mx);
            s.det_dXdv = det_small(mv);
            s.det_flow = det_small(flow);
            report.interior.push_back(s);
            return;
        }
        const bool is_x = axis < d;
        const int limit = is_x ? lattice.nx : lattice.nv;
        auto& slot = is_x ? ix[static_cast<std::size_t>(axis)] : iv[static_cast<std::size_t>(axis - d)];
        for (slot = 1; slot < limit - 1; ++slot)
            self(self, axis + 1);
        slot = 0;
    };
    loop_axis(loop_axis, 0);

    for (const auto& s : report.interior) {
        report.max_abs_det_dXdx_minus_1 =
            std::max(report.max_abs_det_dXdx_minus_1, std::abs(s.det_dXdx - 1.0));
        report.max_abs_det_flow_minus_1 =
            std::max(report.max_abs_det_flow_minus_1, std::abs(s.det_flow - 1.0));
    }

    // Richardson error estimate on det(dX/dx) using a 2h stencil where it fits
    if (lattice.nx >= 5 && lattice.nv >= 5 && d == 1) {
        double worst = 0.0;
        for (int i = 2; i < lattice.nx - 2; ++i)
            for (int j = 2; j < lattice.nv - 2; ++j) {
                const auto& xp = states[lattice.index({i + 1, 0, 0}, {j, 0, 0})];
                const auto& xm = states[lattice.index({i - 1, 0, 0}, {j, 0, 0})];
                const auto& xp2 = states[lattice.index({i + 2, 0, 0}, {j, 0, 0})];
                const auto& xm2 = states[lattice.index({i - 2, 0, 0}, {j, 0, 0})];
                const double dh = (xp.x[0] - xm.x[0]) / (2.0 * lattice.hx);
                const double d2h = (xp2.x[0] - xm2.x[0]) / (4.0 * lattice.hx);
                worst = std::max(worst, std::abs(dh - d2h) / 3.0);
            }
        report.error_estimate = worst;
    }
    return report;
}

} // namespace vkg
