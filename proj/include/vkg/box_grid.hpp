#pragma once

#include "vkg/errors.hpp"

#include <array>
#include <cmath>
#include <cstddef>

namespace vkg {

// Uniform periodic grid on the box [-L, L]^d with N points per axis.
//
// Physical nodes sit at x_i = -L + i * dx with dx = 2L/N; each node is the
// midpoint of its cell for quadrature purposes.  The discrete wavenumbers are
// k_n = pi * n / L for signed integers n in [-N/2, N/2), stored in standard
// FFT order (n >= 0 first, then negative).
class BoxGrid {
public:
    BoxGrid(int dimension, double half_length, int points_per_axis)
        : d_(dimension), L_(half_length), n_(points_per_axis) {
        if (d_ < 1 || d_ > 3)
            throw DimensionError("BoxGrid: dimension must be 1, 2 or 3");
        if (L_ <= 0.0)
            throw DomainError("BoxGrid: half_length must be positive");
        if (n_ < 8 || n_ % 2 != 0)
            throw DomainError("BoxGrid: points_per_axis must be even and >= 8");
        size_ = 1;
        for (int c = 0; c < d_; ++c)
            size_ *= static_cast<std::size_t>(n_);
    }

    int dimension() const { return d_; }
    double half_length() const { return L_; }
    int points_per_axis() const { return n_; }
    std::size_t size() const { return size_; }

    double spacing() const { return 2.0 * L_ / n_; }
    double cell_volume() const { return std::pow(spacing(), d_); }
    double volume() const { return std::pow(2.0 * L_, d_); }

    // Fundamental wavenumber pi/L; largest resolved |k| per axis is pi*N/(2L).
    double fundamental_wavenumber() const { return M_PI / L_; }
    double nyquist_wavenumber() const { return fundamental_wavenumber() * n_ / 2; }

    int signed_index(int i) const { return i < n_ / 2 ? i : i - n_; }
    double wavenumber_1d(int i) const { return signed_index(i) * fundamental_wavenumber(); }
    double coordinate_1d(int i) const { return -L_ + i * spacing(); }

    std::array<int, 3> unravel(std::size_t flat) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int c = d_ - 1; c >= 0; --c) {
            idx[static_cast<std::size_t>(c)] = static_cast<int>(flat % n_);
            flat /= static_cast<std::size_t>(n_);
        }
        return idx;
    }

    std::size_t ravel(const std::array<int, 3>& idx) const {
        std::size_t flat = 0;
        for (int c = 0; c < d_; ++c) {
            int i = idx[static_cast<std::size_t>(c)] % n_;
            if (i < 0)
                i += n_;
            flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
        }
        return flat;
    }

    std::array<double, 3> point(std::size_t flat) const {
        auto idx = unravel(flat);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int c = 0; c < d_; ++c)
            x[static_cast<std::size_t>(c)] = coordinate_1d(idx[static_cast<std::size_t>(c)]);
        return x;
    }

    std::array<double, 3> wavevector(std::size_t flat) const {
        auto idx = unravel(flat);
        std::array<double, 3> k{0.0, 0.0, 0.0};
        for (int c = 0; c < d_; ++c)
            k[static_cast<std::size_t>(c)] = wavenumber_1d(idx[static_cast<std::size_t>(c)]);
        return k;
    }

    double wavenumber_magnitude(std::size_t flat) const {
        auto k = wavevector(flat);
        return std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    }

    // Flat index of -k (wavenumber set is closed under negation).
    std::size_t conjugate_index(std::size_t flat) const {
        auto idx = unravel(flat);
        std::array<int, 3> neg{0, 0, 0};
        for (int c = 0; c < d_; ++c)
            neg[static_cast<std::size_t>(c)] = -idx[static_cast<std::size_t>(c)];
        return ravel(neg);
    }

    bool operator==(const BoxGrid& o) const {
        return d_ == o.d_ && L_ == o.L_ && n_ == o.n_;
    }
    bool operator!=(const BoxGrid& o) const { return !(*this == o); }

    // Wrap a physical coordinate into [-L, L).
    double wrap(double x) const {
        const double period = 2.0 * L_;
        double y = std::fmod(x + L_, period);
        if (y < 0)
            y += period;
        return y - L_;
    }

private:
    int d_;
    double L_;
    int n_;
    std::size_t size_;
};

// Japanese bracket <k> = sqrt(1 + |k|^2), the Klein-Gordon dispersion weight.
inline double japanese_bracket(double k_magnitude) {
    return std::sqrt(1.0 + k_magnitude * k_magnitude);
}

inline double japanese_bracket(const std::array<double, 3>& k) {
    return std::sqrt(1.0 + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
}

} // namespace vkg
