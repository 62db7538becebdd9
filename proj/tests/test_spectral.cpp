#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vkg/norms.hpp"
#include "vkg/spectral_field.hpp"

#include <cmath>
#include <random>

using namespace vkg;

namespace {

// Seeded random smooth real field: random phases with algebraically decaying
// spectrum, Hermitian-symmetrized.
SpectralField random_smooth_field(const BoxGrid& grid, unsigned seed, double decay = 3.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    SpectralField f(grid, 1);
    auto block = f.component(0);
    for (std::size_t i = 0; i < block.size(); ++i) {
        const double mag = grid.wavenumber_magnitude(i);
        const double amp = std::pow(japanese_bracket(mag), -decay);
        block[i] = amp * Complex{unif(rng), unif(rng)};
    }
    f.symmetrize();
    return f;
}

} // namespace

TEST_CASE("constant field transforms to a pure zero mode") {
    for (int d : {1, 2}) {
        BoxGrid grid(d, 2.0, 16);
        std::vector<double> samples(grid.size(), 3.25);
        auto f = to_spectral(grid, samples);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double expect = (i == 0) ? 3.25 : 0.0;
            CHECK(std::abs(f.coeff(0, i) - Complex{expect, 0.0}) < 1e-13);
        }
    }
}

TEST_CASE("cos(pi x / L) produces the two symmetric n=+-1 coefficients") {
    BoxGrid grid(1, 5.0, 32);
    std::vector<double> samples(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        samples[i] = std::cos(M_PI * grid.point(i)[0] / grid.half_length());
    auto f = to_spectral(grid, samples);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const int n = grid.signed_index(static_cast<int>(i));
        const double expect = (n == 1 || n == -1) ? 0.5 : 0.0;
        CHECK(std::abs(f.coeff(0, i) - Complex{expect, 0.0}) < 1e-13);
    }
}

TEST_CASE("round trip is the identity to 1e-12 relative, all dimensions") {
    for (int d : {1, 2, 3}) {
        BoxGrid grid(d, 3.0, d == 3 ? 8 : 32);
        auto f = random_smooth_field(grid, 7u + static_cast<unsigned>(d));
        auto samples = from_spectral(f);
        auto g = to_spectral(grid, samples);
        double sup = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            sup = std::max(sup, std::abs(f.coeff(0, i) - g.coeff(0, i)));
            scale = std::max(scale, std::abs(f.coeff(0, i)));
        }
        CHECK(sup <= 1e-12 * scale);
    }
}

TEST_CASE("shape mismatch raises a dimension error") {
    BoxGrid grid(1, 1.0, 16);
    std::vector<double> bad(grid.size() + 1, 0.0);
    CHECK_THROWS_AS(to_spectral(grid, bad), DimensionError);
}

TEST_CASE("Parseval holds to 1e-12 relative") {
    BoxGrid grid(2, 2.5, 32);
    auto f = random_smooth_field(grid, 11);
    const double a = l2_norm_spectral(f);
    const double b = l2_norm_physical(f);
    CHECK(std::abs(a - b) <= 1e-12 * a);
}

TEST_CASE("Hermitian symmetry holds after construction from real samples") {
    BoxGrid grid(2, 1.0, 16);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> samples(grid.size());
    for (auto& s : samples)
        s = unif(rng);
    auto f = to_spectral(grid, samples);
    CHECK(f.hermitian_defect() < 1e-14);
}

TEST_CASE("identity multiplier is the identity") {
    BoxGrid grid(1, 2.0, 32);
    auto f = random_smooth_field(grid, 5);
    auto g = apply_multiplier(f, [](const std::array<double, 3>&) { return Complex{1.0, 0.0}; });
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(f.coeff(0, i) == g.coeff(0, i));
}

TEST_CASE("gradient multiplier differentiates a single mode exactly") {
    BoxGrid grid(1, 4.0, 64);
    const double k1 = M_PI / grid.half_length();
    std::vector<double> samples(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        samples[i] = std::sin(k1 * grid.point(i)[0]);
    auto f = to_spectral(grid, samples);
    auto df = apply_multiplier(f, [](const std::array<double, 3>& k) {
        return Complex{0.0, k[0]};
    });
    auto out = from_spectral(df);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(out[i] == doctest::Approx(k1 * std::cos(k1 * grid.point(i)[0])).epsilon(1e-12));
}

TEST_CASE("<k>^{-1} multiplier agrees with a dense-matrix application, N=32") {
    // Dense oracle: build the N x N physical-space matrix of the multiplier by
    // explicit mode sums and apply it directly.
    BoxGrid grid(1, 3.0, 32);
    const int n = grid.points_per_axis();

    // delta-like field: 1 at one node, 0 elsewhere
    std::vector<double> samples(grid.size(), 0.0);
    samples[5] = 1.0;
    auto f = to_spectral(grid, samples);
    auto g = apply_multiplier(f, [](const std::array<double, 3>& k) {
        return Complex{1.0 / japanese_bracket(k[0]), 0.0};
    });
    auto got = from_spectral(g);

    std::vector<double> want(grid.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        Complex acc{0.0, 0.0};
        for (int m = 0; m < n; ++m) {
            const double k = grid.wavenumber_1d(m);
            const double xi = grid.point(static_cast<std::size_t>(i))[0];
            const double xj = grid.point(5)[0];
            acc += (1.0 / japanese_bracket(k)) *
                   std::exp(Complex{0.0, k * (xi - xj)}) / static_cast<double>(n);
        }
        want[static_cast<std::size_t>(i)] = acc.real();
    }
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-11));
}

TEST_CASE("singular symbol raises") {
    BoxGrid grid(1, 1.0, 16);
    auto f = random_smooth_field(grid, 2);
    CHECK_THROWS_AS(apply_multiplier(f,
                                     [](const std::array<double, 3>& k) {
                                         return Complex{1.0 / k[0], 0.0};
                                     }),
                    SingularSymbolError);
}

TEST_CASE("symbol with sigma(-k)=conj(sigma(k)) preserves Hermitian symmetry") {
    BoxGrid grid(1, 2.0, 32);
    auto f = random_smooth_field(grid, 13);
    auto g = apply_multiplier(f, [](const std::array<double, 3>& k) {
        return Complex{std::cos(k[0]), std::sin(k[0])} / japanese_bracket(k[0]);
    });
    CHECK(g.hermitian_defect() < 1e-13);
}

TEST_CASE("derivatives keep real fields real (Nyquist convention)") {
    BoxGrid grid(1, 2.0, 32);
    auto f = random_smooth_field(grid, 13);
    auto g = apply_derivative(f, {1, 0, 0});
    CHECK(g.hermitian_defect() < 1e-13);
    auto grad = spectral_gradient(f);
    CHECK(grad.hermitian_defect() < 1e-13);
}

TEST_CASE("point evaluation matches grid samples") {
    BoxGrid grid(2, 2.0, 16);
    auto f = random_smooth_field(grid, 17);
    auto samples = from_spectral(f);
    for (std::size_t i : {std::size_t{0}, std::size_t{37}, std::size_t{200}}) {
        auto x = grid.point(i);
        CHECK(std::abs(evaluate_at(f, 0, x) - Complex{samples[i], 0.0}) < 1e-12);
    }
}

TEST_CASE("single mode L2 norm is sqrt(2L) times the amplitude") {
    BoxGrid grid(1, 7.0, 64);
    SpectralField f(grid, 1);
    // e^{i k0 x} with k0 the third positive mode, amplitude 0.7
    f.coeff(0, 3) = Complex{0.7, 0.0};
    const double want = std::sqrt(2.0 * grid.half_length()) * 0.7;
    CHECK(field_norm(f, NormSpec::lp(2)) == doctest::Approx(want).epsilon(1e-12));
    CHECK(l2_norm_spectral(f) == doctest::Approx(want).epsilon(1e-12));
}
