#include "vkg/distribution.hpp"

#include "vkg/reduce.hpp"

#include <cmath>
#include <random>

namespace vkg {

Distribution::Distribution(const BoxGrid& grid, const VelocityLattice& vlat, PhaseProfile f0,
                           double v_support_radius, Mode mode)
    : grid_(grid), vlat_(vlat), f0_(std::move(f0)), v_support_(v_support_radius), mode_(mode) {
    if (vlat_.dim != grid_.dimension())
        throw DimensionError("Distribution: velocity lattice dimension mismatch");
    if (v_support_ <= 0.0 || v_support_ >= vlat_.vmax)
        throw SupportViolationError("Distribution: v support must sit inside the lattice");
}

Distribution Distribution::grid_mode(const BoxGrid& grid, const VelocityLattice& vlat,
                                     PhaseProfile f0, double v_support_radius) {
    Distribution d(grid, vlat, std::move(f0), v_support_radius, Mode::grid);
    d.feet_.assign(static_cast<std::size_t>(2 * grid.dimension()) * d.nodes(), 0.0);
    return d;
}

Distribution Distribution::particle_mode(const BoxGrid& grid, const VelocityLattice& vlat,
                                         PhaseProfile f0, double v_support_radius,
                                         const ParticleLoading& loading) {
    Distribution d(grid, vlat, std::move(f0), v_support_radius, Mode::particle);
    const int dim = grid.dimension();
    if (loading.monte_carlo) {
        std::mt19937_64 rng(loading.seed);
        std::uniform_real_distribution<double> ux(-grid.half_length(), grid.half_length());
        std::uniform_real_distribution<double> uv(-v_support_radius, v_support_radius);
        double phase_volume = std::pow(2.0 * grid.half_length(), dim) *
                              std::pow(2.0 * v_support_radius, dim);
        for (std::size_t i = 0; i < loading.mc_count; ++i) {
            PhasePoint p;
            for (int c = 0; c < dim; ++c) {
                p.x[static_cast<std::size_t>(c)] = ux(rng);
                p.v[static_cast<std::size_t>(c)] = uv(rng);
            }
            const double w = d.raw_f0(p.x, p.v) * phase_volume /
                             static_cast<double>(loading.mc_count);
            if (w != 0.0) {
                d.particles_.push_back(p);
                d.weights_.push_back(w);
            }
        }
        return d;
    }
    // deterministic lattice loading ("quiet start")
    const double hx = 2.0 * grid.half_length() / loading.per_axis_x;
    const double hv = 2.0 * v_support_radius / loading.per_axis_v;
    std::size_t nx_total = 1, nv_total = 1;
    for (int c = 0; c < dim; ++c) {
        nx_total *= static_cast<std::size_t>(loading.per_axis_x);
        nv_total *= static_cast<std::size_t>(loading.per_axis_v);
    }
    const double cellvol = std::pow(hx, dim) * std::pow(hv, dim);
    for (std::size_t ix = 0; ix < nx_total; ++ix) {
        std::array<int, 3> xi{0, 0, 0};
        std::size_t rx = ix;
        for (int c = dim - 1; c >= 0; --c) {
            xi[static_cast<std::size_t>(c)] = static_cast<int>(rx % loading.per_axis_x);
            rx /= static_cast<std::size_t>(loading.per_axis_x);
        }
        for (std::size_t iv = 0; iv < nv_total; ++iv) {
            std::array<int, 3> vi{0, 0, 0};
            std::size_t rv = iv;
            for (int c = dim - 1; c >= 0; --c) {
                vi[static_cast<std::size_t>(c)] = static_cast<int>(rv % loading.per_axis_v);
                rv /= static_cast<std::size_t>(loading.per_axis_v);
            }
            PhasePoint p;
            for (int c = 0; c < dim; ++c) {
                p.x[static_cast<std::size_t>(c)] =
                    -grid.half_length() + (xi[static_cast<std::size_t>(c)] + 0.5) * hx;
                p.v[static_cast<std::size_t>(c)] =
                    -v_support_radius + (vi[static_cast<std::size_t>(c)] + 0.5) * hv;
            }
            const double w = d.raw_f0(p.x, p.v) * cellvol;
            if (w != 0.0) {
                d.particles_.push_back(p);
                d.weights_.push_back(w);
            }
        }
    }
    return d;
}

double Distribution::raw_f0(const Vec3& x, const Vec3& v) const {
    Vec3 xw = x;
    for (int c = 0; c < grid_.dimension(); ++c)
        xw[static_cast<std::size_t>(c)] = grid_.wrap(xw[static_cast<std::size_t>(c)]);
    return f0_(xw, v);
}

double Distribution::initial_value(const Vec3& x, const Vec3& v) const {
    double vmag = 0.0, vinf = 0.0;
    for (int c = 0; c < grid_.dimension(); ++c) {
        vmag += v[static_cast<std::size_t>(c)] * v[static_cast<std::size_t>(c)];
        vinf = std::max(vinf, std::abs(v[static_cast<std::size_t>(c)]));
    }
    vmag = std::sqrt(vmag);
    if (vinf > vlat_.vmax) {
        if (vmag > v_support_)
            return 0.0;
        throw SupportViolationError("Distribution: foot outside the lattice but inside support");
    }
    if (vmag > v_support_)
        return 0.0;
    return raw_f0(x, v);
}

double Distribution::value_at_node(std::size_t xi, std::size_t vi) const {
    auto foot = foot_at_node(xi, vi);
    return initial_value(foot.x, foot.v);
}

PhasePoint Distribution::foot_at_node(std::size_t xi, std::size_t vi) const {
    if (mode_ != Mode::grid)
        throw UsageError("Distribution: node access is grid-mode only");
    const int dim = grid_.dimension();
    const std::size_t node = xi * vlat_.size() + vi;
    PhasePoint foot;
    const Vec3 v = vlat_.node(vi);
    const Vec3 vh = relativistic_velocity(v);
    auto x = grid_.point(xi);
    for (int c = 0; c < dim; ++c) {
        foot.x[static_cast<std::size_t>(c)] =
            x[static_cast<std::size_t>(c)] - time_ * vh[static_cast<std::size_t>(c)] +
            feet_[static_cast<std::size_t>(c) * nodes() + node];
        foot.v[static_cast<std::size_t>(c)] =
            v[static_cast<std::size_t>(c)] +
            feet_[static_cast<std::size_t>(dim + c) * nodes() + node];
    }
    return foot;
}

namespace {

// single RK4 step of the frozen-field characteristic flow
inline PhasePoint rk4_frozen(const FrozenField& field, const PhasePoint& p, double h) {
    auto rhs = [&field](const PhasePoint& q, Vec3& dx, Vec3& dv) {
        dx = relativistic_velocity(q.v);
        dv = field(q.x);
    };
    Vec3 k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
    PhasePoint q = p, out = p;
    rhs(p, k1x, k1v);
    for (int c = 0; c < 3; ++c) {
        q.x[static_cast<std::size_t>(c)] = p.x[static_cast<std::size_t>(c)] + 0.5 * h * k1x[static_cast<std::size_t>(c)];
        q.v[static_cast<std::size_t>(c)] = p.v[static_cast<std::size_t>(c)] + 0.5 * h * k1v[static_cast<std::size_t>(c)];
    }
    rhs(q, k2x, k2v);
    for (int c = 0; c < 3; ++c) {
        q.x[static_cast<std::size_t>(c)] = p.x[static_cast<std::size_t>(c)] + 0.5 * h * k2x[static_cast<std::size_t>(c)];
        q.v[static_cast<std::size_t>(c)] = p.v[static_cast<std::size_t>(c)] + 0.5 * h * k2v[static_cast<std::size_t>(c)];
    }
    rhs(q, k3x, k3v);
    for (int c = 0; c < 3; ++c) {
        q.x[static_cast<std::size_t>(c)] = p.x[static_cast<std::size_t>(c)] + h * k3x[static_cast<std::size_t>(c)];
        q.v[static_cast<std::size_t>(c)] = p.v[static_cast<std::size_t>(c)] + h * k3v[static_cast<std::size_t>(c)];
    }
    rhs(q, k4x, k4v);
    for (int c = 0; c < 3; ++c) {
        out.x[static_cast<std::size_t>(c)] +=
            h / 6.0 * (k1x[static_cast<std::size_t>(c)] + 2.0 * k2x[static_cast<std::size_t>(c)] +
                       2.0 * k3x[static_cast<std::size_t>(c)] + k4x[static_cast<std::size_t>(c)]);
        out.v[static_cast<std::size_t>(c)] +=
            h / 6.0 * (k1v[static_cast<std::size_t>(c)] + 2.0 * k2v[static_cast<std::size_t>(c)] +
                       2.0 * k3v[static_cast<std::size_t>(c)] + k4v[static_cast<std::size_t>(c)]);
    }
    return out;
}

} // namespace

void Distribution::advance(const FrozenField& field, double dt) {
    const int dim = grid_.dimension();
    if (mode_ == Mode::particle) {
        for (std::size_t i = 0; i < particles_.size(); ++i)
            particles_[i] = rk4_frozen(field, particles_[i], dt);
        time_ += dt;
        return;
    }

    // grid mode: compose the foot arrays with the one-step backward flow
    std::vector<TensorSpline::Axis> axes;
    for (int c = 0; c < dim; ++c)
        axes.push_back({grid_.points_per_axis(), -grid_.half_length(), grid_.spacing(), true});
    for (int c = 0; c < dim; ++c)
        axes.push_back({vlat_.count, vlat_.node_1d(0), vlat_.spacing(), false});
    TensorSpline old_feet(axes, 2 * dim, feet_);

    std::vector<double> next(feet_.size());
    const std::size_t nv = vlat_.size();
    const double t_old = time_;

    for (std::size_t xi = 0; xi < grid_.size(); ++xi) {
        const auto xpt = grid_.point(xi);
        for (std::size_t vi = 0; vi < nv; ++vi) {
            PhasePoint p;
            p.x = xpt;
            p.v = vlat_.node(vi);
            const Vec3 vh_node = relativistic_velocity(p.v);
            // one backward RK4 step over [t+dt -> t] in the frozen field
            PhasePoint back = rk4_frozen(field, p, -dt);

            double coords[6];
            for (int c = 0; c < dim; ++c)
                coords[c] = back.x[static_cast<std::size_t>(c)];
            for (int c = 0; c < dim; ++c)
                coords[dim + c] = back.v[static_cast<std::size_t>(c)];
            double interp[6];
            old_feet.eval({coords, static_cast<std::size_t>(2 * dim)},
                          {interp, static_cast<std::size_t>(2 * dim)});

            const Vec3 vh_back = relativistic_velocity(back.v);
            const std::size_t node = xi * nv + vi;
            for (int c = 0; c < dim; ++c) {
                const std::size_t sc = static_cast<std::size_t>(c);
                next[sc * nodes() + node] =
                    interp[c] + (back.x[sc] - p.x[sc]) +
                    t_old * (vh_node[sc] - vh_back[sc]) + dt * vh_node[sc];
                next[static_cast<std::size_t>(dim + c) * nodes() + node] =
                    interp[dim + c] + (back.v[sc] - p.v[sc]);
            }
        }
    }
    feet_.swap(next);
    time_ += dt;
}

SpectralField Distribution::deposit(const std::function<double(const Vec3&)>* vweight) const {
    const int dim = grid_.dimension();
    std::vector<double> rho(grid_.size(), 0.0);

    if (mode_ == Mode::grid) {
        const std::size_t nv = vlat_.size();
        const double dvol = vlat_.cell_volume();
        double fmax = 0.0, fboundary = 0.0;
        for (std::size_t xi = 0; xi < grid_.size(); ++xi) {
            CompensatedSum acc;
            for (std::size_t vi = 0; vi < nv; ++vi) {
                const double f = value_at_node(xi, vi);
                const double fa = std::abs(f);
                fmax = std::max(fmax, fa);
                auto idx = vlat_.unravel(vi);
                for (int c = 0; c < dim; ++c)
                    if (idx[static_cast<std::size_t>(c)] == 0 ||
                        idx[static_cast<std::size_t>(c)] == vlat_.count - 1)
                        fboundary = std::max(fboundary, fa);
                const double w = vweight ? (*vweight)(vlat_.node(vi)) : 1.0;
                acc.add(f * w);
            }
            rho[xi] = acc.value() * dvol;
        }
        if (fboundary > 1e-12 * std::max(fmax, 1e-300))
            throw SupportViolationError("deposit: f touches the velocity lattice boundary");
        return to_spectral(grid_, rho);
    }

    // particle mode: triangular (CIC) deposit, then the 2/3-Nyquist cutoff
    const double dx = grid_.spacing();
    const double inv_cell = 1.0 / grid_.cell_volume();
    const int n = grid_.points_per_axis();
    for (std::size_t i = 0; i < particles_.size(); ++i) {
        const double w = weights_[i] * (vweight ? (*vweight)(particles_[i].v) : 1.0);
        int base[3] = {0, 0, 0};
        double frac[3] = {0.0, 0.0, 0.0};
        for (int c = 0; c < dim; ++c) {
            const double u = (grid_.wrap(particles_[i].x[static_cast<std::size_t>(c)]) +
                              grid_.half_length()) / dx;
            base[c] = static_cast<int>(std::floor(u));
            frac[c] = u - base[c];
        }
        const int corners = 1 << dim;
        for (int corner = 0; corner < corners; ++corner) {
            double weight = 1.0;
            std::array<int, 3> idx{0, 0, 0};
            for (int c = 0; c < dim; ++c) {
                const int hi = (corner >> c) & 1;
                weight *= hi ? frac[c] : 1.0 - frac[c];
                idx[static_cast<std::size_t>(c)] = (base[c] + hi) % n;
                if (idx[static_cast<std::size_t>(c)] < 0)
                    idx[static_cast<std::size_t>(c)] += n;
            }
            rho[grid_.ravel(idx)] += w * weight * inv_cell;
        }
    }
    auto rho_hat = to_spectral(grid_, rho);
    const double cutoff = (2.0 / 3.0) * grid_.nyquist_wavenumber();
    return apply_multiplier(rho_hat, [cutoff](const std::array<double, 3>& k) {
        for (int c = 0; c < 3; ++c)
            if (std::abs(k[static_cast<std::size_t>(c)]) > cutoff)
                return Complex{0.0, 0.0};
        return Complex{1.0, 0.0};
    });
}

double Distribution::total_mass() const {
    if (mode_ == Mode::particle)
        return compensated_total(weights_);
    CompensatedSum acc;
    const std::size_t nv = vlat_.size();
    for (std::size_t xi = 0; xi < grid_.size(); ++xi)
        for (std::size_t vi = 0; vi < nv; ++vi)
            acc.add(value_at_node(xi, vi));
    return acc.value() * vlat_.cell_volume() * grid_.cell_volume();
}

double evaluate_f(const Distribution& dist, const PhasePoint& foot) {
    return dist.initial_value(foot.x, foot.v);
}

} // namespace vkg
