#include "vkg/spectral_field.hpp"

#include "vkg/reduce.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace vkg {

namespace {

// FFTW plan cache keyed by (dimension, N, sign).  Plans are created once with
// FFTW_ESTIMATE (deterministic) and reused; execution on distinct buffers is
// thread safe, creation is serialized.
class FftPlanner {
public:
    static FftPlanner& instance() {
        static FftPlanner p;
        return p;
    }

    void transform(const BoxGrid& grid, Complex* data, int sign) {
        fftw_plan plan = nullptr;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            const Key key{grid.dimension(), grid.points_per_axis(), sign};
            auto it = plans_.find(key);
            if (it == plans_.end()) {
                std::vector<Complex> scratch(grid.size());
                int n[3] = {grid.points_per_axis(), grid.points_per_axis(),
                            grid.points_per_axis()};
                plan = fftw_plan_dft(grid.dimension(), n,
                                     reinterpret_cast<fftw_complex*>(scratch.data()),
                                     reinterpret_cast<fftw_complex*>(scratch.data()), sign,
                                     FFTW_ESTIMATE);
                plans_.emplace(key, plan);
            } else {
                plan = it->second;
            }
        }
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                         reinterpret_cast<fftw_complex*>(data));
    }

private:
    using Key = std::tuple<int, int, int>;
    FftPlanner() = default;
    std::mutex mutex_;
    std::map<Key, fftw_plan> plans_;
};

// The grid origin sits at x = -L, so mode n carries the extra phase (-1)^n
// relative to FFTW's 0-based transform.  Folding it in here keeps the stored
// coefficients equal to the true Fourier-series coefficients.
inline double origin_sign(const BoxGrid& grid, std::size_t flat) {
    auto idx = grid.unravel(flat);
    int s = 0;
    for (int c = 0; c < grid.dimension(); ++c)
        s += idx[static_cast<std::size_t>(c)];
    return (s % 2 == 0) ? 1.0 : -1.0;
}

} // namespace

SpectralField::SpectralField(const BoxGrid& grid, int components)
    : grid_(grid), m_(components) {
    if (m_ < 1)
        throw DimensionError("SpectralField: component count must be positive");
    data_.assign(static_cast<std::size_t>(m_) * grid_.size(), Complex{0.0, 0.0});
}

double SpectralField::hermitian_defect() const {
    double worst = 0.0;
    for (int c = 0; c < m_; ++c) {
        auto block = component(c);
        for (std::size_t i = 0; i < block.size(); ++i) {
            const std::size_t j = grid_.conjugate_index(i);
            worst = std::max(worst, std::abs(block[i] - std::conj(block[j])));
        }
    }
    return worst;
}

void SpectralField::symmetrize() {
    for (int c = 0; c < m_; ++c) {
        auto block = component(c);
        for (std::size_t i = 0; i < block.size(); ++i) {
            const std::size_t j = grid_.conjugate_index(i);
            if (j < i)
                continue;
            const Complex avg = 0.5 * (block[i] + std::conj(block[j]));
            block[i] = avg;
            block[j] = std::conj(avg);
        }
    }
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    if (grid_ != other.grid_ || m_ != other.m_)
        throw DimensionError("SpectralField::operator+=: mismatched fields");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] += other.data_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    if (grid_ != other.grid_ || m_ != other.m_)
        throw DimensionError("SpectralField::operator-=: mismatched fields");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] -= other.data_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
    for (auto& z : data_)
        z *= scale;
    return *this;
}

SpectralField to_spectral(const BoxGrid& grid, std::span<const Complex> samples,
                          int components) {
    if (samples.size() != grid.size() * static_cast<std::size_t>(components))
        throw DimensionError("to_spectral: sample array shape does not match grid");
    SpectralField out(grid, components);
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (int c = 0; c < components; ++c) {
        auto block = out.component(c);
        std::copy_n(samples.data() + static_cast<std::size_t>(c) * grid.size(),
                    grid.size(), block.data());
        FftPlanner::instance().transform(grid, block.data(), FFTW_FORWARD);
        for (std::size_t i = 0; i < block.size(); ++i)
            block[i] *= scale * origin_sign(grid, i);
    }
    return out;
}

SpectralField to_spectral(const BoxGrid& grid, std::span<const double> samples,
                          int components) {
    if (samples.size() != grid.size() * static_cast<std::size_t>(components))
        throw DimensionError("to_spectral: sample array shape does not match grid");
    std::vector<Complex> buf(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        buf[i] = Complex{samples[i], 0.0};
    return to_spectral(grid, std::span<const Complex>(buf), components);
}

std::vector<Complex> from_spectral_complex(const SpectralField& field) {
    const BoxGrid& grid = field.grid();
    std::vector<Complex> out(static_cast<std::size_t>(field.components()) * grid.size());
    for (int c = 0; c < field.components(); ++c) {
        auto block = field.component(c);
        Complex* dst = out.data() + static_cast<std::size_t>(c) * grid.size();
        for (std::size_t i = 0; i < block.size(); ++i)
            dst[i] = block[i] * origin_sign(grid, i);
        FftPlanner::instance().transform(grid, dst, FFTW_BACKWARD);
    }
    return out;
}

std::vector<double> from_spectral(const SpectralField& field) {
    auto z = from_spectral_complex(field);
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        out[i] = z[i].real();
    return out;
}

SpectralField apply_multiplier(const SpectralField& field, const ScalarSymbol& symbol) {
    SpectralField out(field.grid(), field.components());
    const BoxGrid& grid = field.grid();
    std::vector<Complex> sigma(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Complex s = symbol(grid.wavevector(i));
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw SingularSymbolError("apply_multiplier: symbol non-finite at a grid wavenumber");
        sigma[i] = s;
    }
    for (int c = 0; c < field.components(); ++c) {
        auto src = field.component(c);
        auto dst = out.component(c);
        for (std::size_t i = 0; i < src.size(); ++i)
            dst[i] = sigma[i] * src[i];
    }
    return out;
}

SpectralField apply_derivative(const SpectralField& field, const std::array<int, 3>& alpha) {
    const BoxGrid& grid = field.grid();
    SpectralField out(grid, field.components());
    const int half = grid.points_per_axis() / 2;
    for (int c = 0; c < field.components(); ++c) {
        auto src = field.component(c);
        auto dst = out.component(c);
        for (std::size_t i = 0; i < src.size(); ++i) {
            auto idx = grid.unravel(i);
            Complex m{1.0, 0.0};
            for (int a = 0; a < grid.dimension(); ++a) {
                const int q = alpha[static_cast<std::size_t>(a)];
                if (q == 0)
                    continue;
                if (q % 2 == 1 && idx[static_cast<std::size_t>(a)] == half) {
                    m = Complex{0.0, 0.0};
                    break;
                }
                const double k = grid.wavenumber_1d(idx[static_cast<std::size_t>(a)]);
                for (int rep = 0; rep < q; ++rep)
                    m *= Complex{0.0, k};
            }
            dst[i] = m * src[i];
        }
    }
    return out;
}

SpectralField spectral_gradient(const SpectralField& field) {
    if (field.components() != 1)
        throw DimensionError("spectral_gradient: expects a scalar field");
    const BoxGrid& grid = field.grid();
    SpectralField out(grid, grid.dimension());
    const int half = grid.points_per_axis() / 2;
    auto src = field.component(0);
    for (int c = 0; c < grid.dimension(); ++c) {
        auto dst = out.component(c);
        for (std::size_t i = 0; i < src.size(); ++i) {
            auto idx = grid.unravel(i);
            const bool nyq = idx[static_cast<std::size_t>(c)] == half;
            const double k = nyq ? 0.0 : grid.wavenumber_1d(idx[static_cast<std::size_t>(c)]);
            dst[i] = Complex{0.0, k} * src[i];
        }
    }
    return out;
}

namespace {

// Per-axis phase tables e^{i k_n x_c} for point evaluation.
void phase_table(const BoxGrid& grid, double x, std::vector<Complex>& out) {
    out.resize(static_cast<std::size_t>(grid.points_per_axis()));
    for (int i = 0; i < grid.points_per_axis(); ++i) {
        const double kx = grid.wavenumber_1d(i) * x;
        out[static_cast<std::size_t>(i)] = Complex{std::cos(kx), std::sin(kx)};
    }
}

} // namespace

Complex evaluate_at(const SpectralField& field, int component,
                    const std::array<double, 3>& x) {
    const BoxGrid& grid = field.grid();
    std::array<std::vector<Complex>, 3> phases;
    for (int c = 0; c < grid.dimension(); ++c)
        phase_table(grid, x[static_cast<std::size_t>(c)], phases[static_cast<std::size_t>(c)]);
    auto block = field.component(component);
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < block.size(); ++i) {
        auto idx = grid.unravel(i);
        Complex phase = phases[0][static_cast<std::size_t>(idx[0])];
        for (int c = 1; c < grid.dimension(); ++c)
            phase *= phases[static_cast<std::size_t>(c)][static_cast<std::size_t>(idx[static_cast<std::size_t>(c)])];
        acc += block[i] * phase;
    }
    return acc;
}

std::array<Complex, 3> evaluate_all_at(const SpectralField& field,
                                       const std::array<double, 3>& x) {
    const BoxGrid& grid = field.grid();
    std::array<std::vector<Complex>, 3> phases;
    for (int c = 0; c < grid.dimension(); ++c)
        phase_table(grid, x[static_cast<std::size_t>(c)], phases[static_cast<std::size_t>(c)]);
    std::array<Complex, 3> acc{Complex{0, 0}, Complex{0, 0}, Complex{0, 0}};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto idx = grid.unravel(i);
        Complex phase = phases[0][static_cast<std::size_t>(idx[0])];
        for (int c = 1; c < grid.dimension(); ++c)
            phase *= phases[static_cast<std::size_t>(c)][static_cast<std::size_t>(idx[static_cast<std::size_t>(c)])];
        for (int c = 0; c < field.components() && c < 3; ++c)
            acc[static_cast<std::size_t>(c)] += field.coeff(c, i) * phase;
    }
    return acc;
}

double l2_norm_spectral(const SpectralField& field) {
    CompensatedSum acc;
    for (int c = 0; c < field.components(); ++c)
        for (const Complex& z : field.component(c))
            acc.add(std::norm(z));
    return std::sqrt(field.grid().volume() * acc.value());
}

double l2_norm_physical(const SpectralField& field) {
    auto samples = from_spectral_complex(field);
    const std::size_t n = field.grid().size();
    CompensatedSum acc;
    for (std::size_t i = 0; i < n; ++i) {
        double point = 0.0;
        for (int c = 0; c < field.components(); ++c)
            point += std::norm(samples[static_cast<std::size_t>(c) * n + i]);
        acc.add(point);
    }
    return std::sqrt(acc.value() * field.grid().cell_volume());
}

} // namespace vkg
