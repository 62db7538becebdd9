#include "vkg/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace vkg {

DecayReport fit_decay_exponent(const std::vector<double>& times,
                               const std::vector<double>& values, double t0, double t1,
                               FitEnvelope envelope, double period) {
    if (times.size() != values.size())
        throw DimensionError("fit_decay_exponent: times and values mismatch");
    if (!(t0 > 0.0) || !(t1 > t0))
        throw DomainError("fit_decay_exponent: window must satisfy 0 < t0 < t1");

    std::vector<double> ts, vs;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t0 - 1e-12 || times[i] > t1 + 1e-12)
            continue;
        if (!(values[i] > 0.0))
            throw DomainError("fit_decay_exponent: nonpositive value inside the window");
        ts.push_back(times[i]);
        vs.push_back(values[i]);
    }

    DecayReport report;
    report.t0 = t0;
    report.t1 = t1;

    if (envelope == FitEnvelope::period_mean) {
        std::vector<double> bt, bv;
        std::size_t i = 0;
        double bucket_start = t0;
        while (i < ts.size()) {
            double sum_t = 0.0, sum_v = 0.0;
            std::size_t n = 0;
            while (i < ts.size() && ts[i] < bucket_start + period) {
                sum_t += ts[i];
                sum_v += vs[i];
                ++n;
                ++i;
            }
            if (n > 0) {
                bt.push_back(sum_t / n);
                bv.push_back(sum_v / n);
            }
            bucket_start += period;
        }
        ts.swap(bt);
        vs.swap(bv);
    }

    if (ts.size() < 3)
        throw InsufficientDataError("fit_decay_exponent: need at least three samples in window");

    // least squares on (log t, log v)
    const std::size_t n = ts.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(ts[i]);
        const double y = std::log(vs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0)
        throw DegenerateInputError("fit_decay_exponent: degenerate time samples");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;

    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = intercept + slope * std::log(ts[i]);
        const double r = std::log(vs[i]) - pred;
        rss += r * r;
    }

    report.times = std::move(ts);
    report.values = std::move(vs);
    report.gamma = slope;
    report.residual = std::sqrt(rss / n);
    return report;
}

ScatteringReport scattering_limits(const FieldHistory& history, std::vector<PhasePoint> probes,
                                   std::vector<double> times, double dtau,
                                   double tail_exponent) {
    if (times.size() < 3)
        throw InsufficientDataError("scattering_limits: need at least three time levels");
    std::sort(times.begin(), times.end());

    ScatteringReport report;
    report.probes = probes;
    report.times = times;
    report.assumed_tail = tail_exponent;

    auto bundle = integrate_bundle(history, probes, 0.0, times, dtau);
    report.velocities.resize(times.size());
    for (std::size_t m = 0; m < times.size(); ++m) {
        report.velocities[m].resize(probes.size());
        for (std::size_t p = 0; p < probes.size(); ++p)
            report.velocities[m][p] = bundle.samples[m][p].v;
    }

    // two Richardson levels under the assumed tail t^{-q}; along the sequence
    // t_m the ratio r = t_{m+1}/t_m sets the weights
    const double q = tail_exponent;
    report.v_infinity.resize(probes.size());
    report.error_bar.resize(probes.size());
    for (std::size_t p = 0; p < probes.size(); ++p) {
        std::vector<Vec3> level0;
        for (std::size_t m = 0; m < times.size(); ++m)
            level0.push_back(report.velocities[m][p]);
        auto extrapolate = [&](const std::vector<Vec3>& in, double qq) {
            std::vector<Vec3> out;
            for (std::size_t m = 0; m + 1 < in.size(); ++m) {
                const double r = times[m + 1] / times[m];
                const double w = std::pow(r, qq);
                Vec3 v;
                for (int c = 0; c < 3; ++c)
                    v[static_cast<std::size_t>(c)] =
                        (w * in[m + 1][static_cast<std::size_t>(c)] -
                         in[m][static_cast<std::size_t>(c)]) /
                        (w - 1.0);
                out.push_back(v);
            }
            return out;
        };
        auto level1 = extrapolate(level0, q);
        auto level2 = level1.size() >= 2 ? extrapolate(level1, q + 1.0) : level1;
        const Vec3 best = level2.back();
        const Vec3 prev = level1.back();
        report.v_infinity[p] = best;
        double err = 0.0;
        for (int c = 0; c < 3; ++c)
            err = std::max(err, std::abs(best[static_cast<std::size_t>(c)] -
                                         prev[static_cast<std::size_t>(c)]));
        report.error_bar[p] = err;
    }

    report.convergence.resize(times.size());
    report.position_defect.resize(times.size());
    for (std::size_t m = 0; m < times.size(); ++m) {
        double conv = 0.0, defect = 0.0;
        for (std::size_t p = 0; p < probes.size(); ++p) {
            const Vec3 vinf_hat = relativistic_velocity(report.v_infinity[p]);
            for (int c = 0; c < 3; ++c) {
                const auto sc = static_cast<std::size_t>(c);
                conv = std::max(conv, std::abs(report.velocities[m][p][sc] -
                                               report.v_infinity[p][sc]));
                defect = std::max(defect,
                                  std::abs(bundle.samples[m][p].x[sc] - probes[p].x[sc] -
                                           times[m] * vinf_hat[sc]));
            }
        }
        report.convergence[m] = conv;
        report.position_defect[m] = defect;
    }
    return report;
}

double f_infinity_check(const Distribution& dist, const FieldHistory& history,
                        const ScatteringReport& scattering, double t, double t_prime,
                        double dtau) {
    if (!(t < t_prime))
        throw OrderingError("f_infinity_check: needs t < t'");
    const double L = history.grid().half_length();
    double defect = 0.0;
    for (std::size_t p = 0; p < scattering.probes.size(); ++p) {
        const Vec3 vinf = scattering.v_infinity[p];
        const Vec3 vinf_hat = relativistic_velocity(vinf);
        auto value_at = [&](double when) {
            PhasePoint probe;
            for (int c = 0; c < 3; ++c) {
                const auto sc = static_cast<std::size_t>(c);
                probe.x[sc] = scattering.probes[p].x[sc] + when * vinf_hat[sc];
                probe.v[sc] = vinf[sc];
            }
            for (int c = 0; c < history.grid().dimension(); ++c)
                if (std::abs(probe.x[static_cast<std::size_t>(c)]) > L)
                    throw WrapError("f_infinity_check: shifted probe left the box");
            auto foot = integrate_characteristic(history, probe, when, 0.0, dtau);
            return evaluate_f(dist, foot);
        };
        defect = std::max(defect, std::abs(value_at(t) - value_at(t_prime)));
    }
    return defect;
}

namespace {

double bracket_rate(double t, double exponent) {
    return std::pow(std::sqrt(1.0 + t * t), exponent);
}

// max over multi-indices of a fixed total order of the norm of d^alpha f
double derivative_norm_max(const SpectralField& field, int order, const NormSpec& spec) {
    const int d = field.grid().dimension();
    double worst = 0.0;
    if (d == 1)
        return field_norm(apply_derivative(field, {order, 0, 0}), spec);
    for (int a = 0; a <= order; ++a) {
        if (d == 2) {
            worst = std::max(worst,
                             field_norm(apply_derivative(field, {a, order - a, 0}), spec));
        } else {
            for (int b = 0; a + b <= order; ++b)
                worst = std::max(
                    worst, field_norm(apply_derivative(field, {a, b, order - a - b}), spec));
        }
    }
    return worst;
}

} // namespace

BootstrapLedger bootstrap_monitor(const StateHistory& history, const OscillatorySplit& split,
                                  int alpha0, int max_derivative) {
    BootstrapLedger ledger;
    ledger.alpha0 = alpha0;
    ledger.max_derivative = max_derivative;
    const int d = history.grid.dimension();
    const double delta1 = 1.0 / (alpha0 - 1);

    struct Series {
        std::string quantity;
        NormSpec spec;
        double exponent;
        std::vector<double> values; // per stored time
    };

    auto rate_transport = [&](double p) { return -d * (1.0 - 1.0 / p); };
    auto rate_kg = [&](double p) { return -d * (0.5 - 1.0 / p); };
    auto lp = [](double p) { return NormSpec::lp(p); };

    std::vector<Series> series;
    for (double p : {1.0, 2.0, kInfinity}) {
        series.push_back({"S", lp(p), rate_transport(p), {}});
        series.push_back({"dx S", lp(p), rate_transport(p), {}});
        series.push_back({"E_r", lp(p), rate_transport(p), {}});
    }
    for (double p : {2.0, kInfinity})
        series.push_back({"E_osc", lp(p), rate_kg(p), {}});
    for (int a = 2; a <= std::min(alpha0 - 1, max_derivative); ++a) {
        const double da = static_cast<double>(a) / (alpha0 - 1);
        for (double p : {1.0, 2.0, kInfinity}) {
            series.push_back({"dx^" + std::to_string(a) + " S", lp(p),
                              rate_transport(p) + da, {}});
            series.push_back({"dx^" + std::to_string(a) + " E_r", lp(p),
                              rate_transport(p) + da, {}});
        }
    }
    series.push_back({"S", NormSpec::hs(alpha0), delta1, {}});
    series.push_back({"E_osc", NormSpec::hs(alpha0), 0.0, {}});
    series.push_back({"E_osc", NormSpec::hs(alpha0 + 1), delta1, {}});
    series.push_back({"E_r", NormSpec::hs(alpha0 + 1), delta1, {}});

    for (std::size_t i = 0; i < history.size(); ++i) {
        auto dx_rho = spectral_gradient(history.rho_hats[i]);
        for (auto& row : series) {
            double value = 0.0;
            if (row.quantity == "S")
                value = field_norm(history.rho_hats[i], row.spec);
            else if (row.quantity == "dx S")
                value = field_norm(dx_rho, row.spec);
            else if (row.quantity == "E_r")
                value = field_norm(split.e_r[i], row.spec);
            else if (row.quantity == "E_osc")
                value = std::max(field_norm(split.e_osc_plus[i], row.spec),
                                 field_norm(split.e_osc_minus[i], row.spec));
            else if (row.quantity.rfind("dx^", 0) == 0) {
                const int order = std::stoi(row.quantity.substr(3));
                const bool is_s = row.quantity.back() == 'S';
                value = is_s ? derivative_norm_max(history.rho_hats[i], order, row.spec)
                             : derivative_norm_max(split.e_r[i], order, row.spec);
            }
            row.values.push_back(value);
        }
    }

    for (const auto& row : series) {
        BootstrapRow out;
        out.quantity = row.quantity;
        out.norm = row.spec.str();
        out.exponent = row.exponent;
        double eps = 0.0;
        for (std::size_t i = 0; i < history.size(); ++i)
            eps = std::max(eps, row.values[i] / bracket_rate(history.times[i], row.exponent));
        out.eps_min = eps;
        ledger.rows.push_back(out);
    }
    for (int a = max_derivative + 1; a <= alpha0 - 1; ++a) {
        BootstrapRow out;
        out.quantity = "dx^" + std::to_string(a) + " S";
        out.norm = "-";
        out.skipped = true;
        out.note = "beyond the configured derivative depth";
        ledger.rows.push_back(out);
    }
    return ledger;
}

} // namespace vkg
