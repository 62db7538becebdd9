#include "vkg/spline.hpp"

#include <cmath>

namespace vkg {

namespace {

// Solve the (1,4,1)/6 tridiagonal interpolation system for one line.
// Natural end condition: zero second difference of the coefficients at the
// ends, which pins c_0 = f_0 and c_{n-1} = f_{n-1}.
void solve_natural(std::vector<double>& f, std::vector<double>& scratch) {
    const std::size_t n = f.size();
    if (n < 4)
        throw DomainError("TensorSpline: natural axis needs at least 4 points");
    std::vector<double>& cp = scratch;
    cp.assign(n, 0.0);
    const double c0 = f[0], cn = f[n - 1];
    const double diag = 4.0 / 6.0, off = 1.0 / 6.0;
    double beta = diag;
    f[1] = (f[1] - off * c0) / beta;
    for (std::size_t i = 2; i <= n - 2; ++i) {
        cp[i] = off / beta;
        beta = diag - off * cp[i];
        const double rhs = (i == n - 2) ? f[i] - off * cn : f[i];
        f[i] = (rhs - off * f[i - 1]) / beta;
    }
    for (std::size_t i = n - 3; i >= 1; --i)
        f[i] -= cp[i + 1] * f[i + 1];
    f[0] = c0;
    f[n - 1] = cn;
}

// Cyclic (1,4,1)/6 system via the Sherman-Morrison correction.
void solve_periodic(std::vector<double>& f, std::vector<double>& scratch) {
    const std::size_t n = f.size();
    if (n < 4)
        throw DomainError("TensorSpline: periodic axis needs at least 4 points");
    const double diag = 4.0 / 6.0, off = 1.0 / 6.0;
    const double gamma = -diag;
    scratch.assign(2 * n, 0.0);
    double* cp = scratch.data();
    double* z = scratch.data() + n;

    auto thomas = [&](double* rhs) {
        double beta = diag - gamma;
        rhs[0] /= beta;
        for (std::size_t i = 1; i < n; ++i) {
            cp[i] = off / beta;
            const double d = (i == n - 1) ? diag - off * off / gamma : diag;
            beta = d - off * cp[i];
            rhs[i] = (rhs[i] - off * rhs[i - 1]) / beta;
        }
        for (std::size_t i = n - 1; i-- > 0;)
            rhs[i] -= cp[i + 1] * rhs[i + 1];
    };

    thomas(f.data());
    z[0] = gamma;
    z[n - 1] = off;
    thomas(z);
    const double factor = (f[0] + f[n - 1] * off / gamma) /
                          (1.0 + z[0] + z[n - 1] * off / gamma);
    for (std::size_t i = 0; i < n; ++i)
        f[i] -= factor * z[i];
}

inline void basis_weights(double u, double w[4]) {
    const double u2 = u * u, u3 = u2 * u;
    w[0] = (1.0 - 3.0 * u + 3.0 * u2 - u3) / 6.0;
    w[1] = (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0;
    w[2] = (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0;
    w[3] = u3 / 6.0;
}

} // namespace

// Natural axes are stored padded by one ghost coefficient on each side,
// c_{-1} = 2c_0 - c_1 and c_n = 2c_{n-1} - c_{n-2}, so evaluation never
// branches on the boundary.
TensorSpline::TensorSpline(std::vector<Axis> axes, int channels,
                           std::span<const double> values)
    : axes_(std::move(axes)), channels_(channels) {
    if (axes_.empty() || axes_.size() > 4)
        throw DimensionError("TensorSpline: supports 1 to 4 axes");
    std::size_t total = 1;
    for (const auto& a : axes_)
        total *= static_cast<std::size_t>(a.count);
    if (values.size() != total * static_cast<std::size_t>(channels_))
        throw DimensionError("TensorSpline: value array shape mismatch");

    // solve the interpolation systems in the unpadded layout
    std::vector<double> work(values.begin(), values.end());
    std::vector<std::size_t> stride(axes_.size(), 1);
    for (std::size_t a = axes_.size(); a-- > 1;)
        stride[a - 1] = stride[a] * static_cast<std::size_t>(axes_[a].count);

    std::vector<double> line, scratch;
    for (int ch = 0; ch < channels_; ++ch) {
        double* block = work.data() + static_cast<std::size_t>(ch) * total;
        for (std::size_t axis = 0; axis < axes_.size(); ++axis) {
            const std::size_t n = static_cast<std::size_t>(axes_[axis].count);
            const std::size_t s = stride[axis];
            const std::size_t lines = total / n;
            line.resize(n);
            for (std::size_t l = 0; l < lines; ++l) {
                const std::size_t inner = l % s;
                const std::size_t outer = l / s;
                double* base = block + outer * s * n + inner;
                for (std::size_t i = 0; i < n; ++i)
                    line[i] = base[i * s];
                if (axes_[axis].periodic)
                    solve_periodic(line, scratch);
                else
                    solve_natural(line, scratch);
                for (std::size_t i = 0; i < n; ++i)
                    base[i * s] = line[i];
            }
        }
    }

    // padded layout
    std::size_t padded_total = 1;
    for (const auto& a : axes_)
        padded_total *= static_cast<std::size_t>(a.periodic ? a.count : a.count + 2);
    stride_.assign(axes_.size(), 1);
    for (std::size_t a = axes_.size(); a-- > 1;) {
        const Axis& ax = axes_[a];
        stride_[a - 1] = stride_[a] * static_cast<std::size_t>(ax.periodic ? ax.count : ax.count + 2);
    }
    coeff_.assign(padded_total * static_cast<std::size_t>(channels_), 0.0);

    // scatter the solved coefficients into the padded array
    for (int ch = 0; ch < channels_; ++ch) {
        const double* src = work.data() + static_cast<std::size_t>(ch) * total;
        double* dst = coeff_.data() + static_cast<std::size_t>(ch) * padded_total;
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t tmp = flat;
            std::size_t out = 0;
            for (std::size_t a = axes_.size(); a-- > 0;) {
                const std::size_t n = static_cast<std::size_t>(axes_[a].count);
                const std::size_t idx = tmp % n;
                tmp /= n;
                const std::size_t shifted = axes_[a].periodic ? idx : idx + 1;
                out += shifted * stride_[a];
            }
            dst[out] = src[flat];
        }
        // fill ghosts axis by axis (each pass extends along one axis using
        // values already valid there, including previously written ghosts)
        for (std::size_t a = 0; a < axes_.size(); ++a) {
            const Axis& ax = axes_[a];
            if (ax.periodic)
                continue;
            const std::size_t n = static_cast<std::size_t>(ax.count);
            const std::size_t s = stride_[a];
            const std::size_t lines = padded_total / (n + 2);
            for (std::size_t l = 0; l < lines; ++l) {
                const std::size_t inner = l % s;
                const std::size_t outer = l / s;
                double* base = dst + outer * s * (n + 2) + inner;
                base[0] = 2.0 * base[s] - base[2 * s];
                base[(n + 1) * s] = 2.0 * base[n * s] - base[(n - 1) * s];
            }
        }
    }
}

void TensorSpline::eval(std::span<const double> point, std::span<double> out) const {
    if (point.size() != axes_.size() || out.size() != static_cast<std::size_t>(channels_))
        throw DimensionError("TensorSpline::eval: shape mismatch");

    int base[4];
    double w[4][4];
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        const Axis& ax = axes_[a];
        double s = (point[a] - ax.origin) / ax.step;
        if (ax.periodic) {
            s = std::fmod(s, static_cast<double>(ax.count));
            if (s < 0)
                s += ax.count;
            if (s >= ax.count)
                s = 0.0;
        } else {
            if (s < 0.0)
                s = 0.0;
            if (s > ax.count - 1.0)
                s = ax.count - 1.0;
        }
        double cell = std::floor(s);
        if (cell > ax.count - 1.0)
            cell = ax.count - 1.0;
        base[a] = static_cast<int>(cell);
        basis_weights(s - cell, w[a]);
    }

    std::size_t padded_total = 1;
    for (const auto& a : axes_)
        padded_total *= static_cast<std::size_t>(a.periodic ? a.count : a.count + 2);

    for (int ch = 0; ch < channels_; ++ch)
        out[static_cast<std::size_t>(ch)] = 0.0;

    const std::size_t naxes = axes_.size();
    const std::size_t combos = static_cast<std::size_t>(1) << (2 * naxes);
    for (std::size_t combo = 0; combo < combos; ++combo) {
        double weight = 1.0;
        std::size_t offset = 0;
        for (std::size_t a = 0; a < naxes; ++a) {
            const int local = static_cast<int>((combo >> (2 * a)) & 3u);
            weight *= w[a][local];
            const Axis& ax = axes_[a];
            int idx = base[a] + local - 1;
            if (ax.periodic) {
                idx %= ax.count;
                if (idx < 0)
                    idx += ax.count;
            } else {
                idx += 1; // padded shift; ghosts live at 0 and count+1
                if (idx > ax.count + 1)
                    idx = ax.count + 1; // reachable only with zero weight
            }
            offset += static_cast<std::size_t>(idx) * stride_[a];
        }
        if (weight == 0.0)
            continue;
        for (int ch = 0; ch < channels_; ++ch)
            out[static_cast<std::size_t>(ch)] +=
                weight * coeff_[static_cast<std::size_t>(ch) * padded_total + offset];
    }
}

} // namespace vkg
