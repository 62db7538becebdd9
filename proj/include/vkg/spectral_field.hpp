#pragma once

#include "vkg/box_grid.hpp"
#include "vkg/errors.hpp"

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace vkg {

using Complex = std::complex<double>;

// Discrete Fourier representation of a (scalar or vector) field on a BoxGrid.
//
// Coefficients follow the Fourier-series convention
//     f(x) = sum_k fhat(k) e^{i k.x},      k = pi n / L,
// so that a single mode cos(pi x / L) has the two coefficients 1/2 at n=+-1
// and Parseval reads  sum_x |f(x)|^2 dx^d = (2L)^d sum_k |fhat(k)|^2.
//
// Fields are immutable values in spirit: every operation returns a new field.
// Mutating access exists for construction and hot loops only.
class SpectralField {
public:
    explicit SpectralField(const BoxGrid& grid, int components = 1);

    const BoxGrid& grid() const { return grid_; }
    int components() const { return m_; }
    std::size_t modes() const { return grid_.size(); }

    Complex& coeff(int component, std::size_t flat) {
        return data_[static_cast<std::size_t>(component) * grid_.size() + flat];
    }
    const Complex& coeff(int component, std::size_t flat) const {
        return data_[static_cast<std::size_t>(component) * grid_.size() + flat];
    }
    std::span<Complex> component(int c) {
        return {data_.data() + static_cast<std::size_t>(c) * grid_.size(), grid_.size()};
    }
    std::span<const Complex> component(int c) const {
        return {data_.data() + static_cast<std::size_t>(c) * grid_.size(), grid_.size()};
    }

    // Max deviation from coeff(-k) == conj(coeff(k)) over all components.
    double hermitian_defect() const;
    bool is_hermitian(double tol = 1e-10) const { return hermitian_defect() <= tol; }

    // Enforce Hermitian symmetry exactly (averages the two half-spectra).
    void symmetrize();

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double scale);
    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField f) { return f *= s; }

private:
    BoxGrid grid_;
    int m_;
    std::vector<Complex> data_;
};

// --- transforms -------------------------------------------------------------

// Forward transform of real samples (row-major over the grid, one block per
// component).  Throws DimensionError on shape mismatch.
SpectralField to_spectral(const BoxGrid& grid, std::span<const double> samples,
                          int components = 1);

// Forward transform of complex samples.
SpectralField to_spectral(const BoxGrid& grid, std::span<const Complex> samples,
                          int components = 1);

// Inverse transform.  The real variant checks Hermitian symmetry first.
std::vector<double> from_spectral(const SpectralField& field);
std::vector<Complex> from_spectral_complex(const SpectralField& field);

// --- multiplier calculus ----------------------------------------------------

using ScalarSymbol = std::function<Complex(const std::array<double, 3>&)>;

// Pointwise action of a Fourier multiplier sigma(k) on every component.
// Throws SingularSymbolError if sigma is non-finite at any grid wavenumber.
SpectralField apply_multiplier(const SpectralField& field, const ScalarSymbol& symbol);

// Derivative d^alpha via the (i k)^alpha multiplier.  The unpaired Nyquist
// mode n = -N/2 is zeroed for odd per-axis orders: the real trigonometric
// interpolant carries that mode as a pure cosine, whose derivative has no
// representation on the grid.  This keeps real fields real.
SpectralField apply_derivative(const SpectralField& field, const std::array<int, 3>& alpha);

// grad: scalar field -> d-component field with coefficients i k_c fhat.
SpectralField spectral_gradient(const SpectralField& field);

// Point evaluation f(x) = sum_k fhat(k) e^{i k.x} of one component.
Complex evaluate_at(const SpectralField& field, int component,
                    const std::array<double, 3>& x);

// Evaluate all components at once (cheaper: shares the phase table).
std::array<Complex, 3> evaluate_all_at(const SpectralField& field,
                                       const std::array<double, 3>& x);

// L2 norm computed from coefficients (Parseval route).
double l2_norm_spectral(const SpectralField& field);

// L2 norm computed as a Riemann sum over physical samples (grid route).
double l2_norm_physical(const SpectralField& field);

} // namespace vkg
