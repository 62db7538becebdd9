#include "vkg/norms.hpp"

#include "vkg/littlewood_paley.hpp"
#include "vkg/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace vkg {

namespace {

std::vector<double> pointwise_modulus(const SpectralField& field) {
    auto samples = from_spectral_complex(field);
    const std::size_t n = field.grid().size();
    std::vector<double> mod(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sq = 0.0;
        for (int c = 0; c < field.components(); ++c)
            sq += std::norm(samples[static_cast<std::size_t>(c) * n + i]);
        mod[i] = std::sqrt(sq);
    }
    return mod;
}

double lp_of_modulus(const std::vector<double>& mod, double p, double cell_volume) {
    if (p == kInfinity) {
        double m = 0.0;
        for (double v : mod)
            m = std::max(m, v);
        return m;
    }
    CompensatedSum acc;
    for (double v : mod)
        acc.add(std::pow(v, p));
    return std::pow(acc.value() * cell_volume, 1.0 / p);
}

double lebesgue_norm(const SpectralField& field, double p) {
    return lp_of_modulus(pointwise_modulus(field), p, field.grid().cell_volume());
}

double sobolev_h_norm(const SpectralField& field, double s) {
    CompensatedSum acc;
    const BoxGrid& grid = field.grid();
    for (int c = 0; c < field.components(); ++c) {
        auto block = field.component(c);
        for (std::size_t i = 0; i < block.size(); ++i) {
            const double w = japanese_bracket(grid.wavenumber_magnitude(i));
            acc.add(std::pow(w, 2.0 * s) * std::norm(block[i]));
        }
    }
    return std::sqrt(grid.volume() * acc.value());
}

// Enumerate multi-indices alpha in d dimensions with |alpha| == order.
void enumerate_multi_indices(int d, int order, std::array<int, 3> prefix, int axis,
                             std::vector<std::array<int, 3>>& out) {
    if (axis == d - 1) {
        prefix[static_cast<std::size_t>(axis)] = order;
        out.push_back(prefix);
        return;
    }
    for (int q = 0; q <= order; ++q) {
        prefix[static_cast<std::size_t>(axis)] = q;
        enumerate_multi_indices(d, order - q, prefix, axis + 1, out);
    }
}

double sobolev_w_norm(const SpectralField& field, double s, double p) {
    if (s < 0.0 || s != std::floor(s))
        throw ResolutionError("field_norm: W^{s,p} supports integer s >= 0 only");
    const int smax = static_cast<int>(s);
    const int d = field.grid().dimension();
    if (p == kInfinity) {
        double worst = 0.0;
        for (int order = 0; order <= smax; ++order) {
            std::vector<std::array<int, 3>> alphas;
            enumerate_multi_indices(d, order, {0, 0, 0}, 0, alphas);
            for (const auto& a : alphas)
                worst = std::max(worst, lebesgue_norm(apply_derivative(field, a), kInfinity));
        }
        return worst;
    }
    CompensatedSum acc;
    for (int order = 0; order <= smax; ++order) {
        std::vector<std::array<int, 3>> alphas;
        enumerate_multi_indices(d, order, {0, 0, 0}, 0, alphas);
        for (const auto& a : alphas)
            acc.add(std::pow(lebesgue_norm(apply_derivative(field, a), p), p));
    }
    return std::pow(acc.value(), 1.0 / p);
}

double besov_norm(const SpectralField& field, double s, double p, double r) {
    const BoxGrid& grid = field.grid();
    double total = lebesgue_norm(lp_project_low(field), p);
    const int j_hi = lp_max_shell(grid);
    if (r == kInfinity) {
        double worst = 0.0;
        for (int j = 0; j <= j_hi; ++j)
            worst = std::max(worst,
                             std::pow(2.0, s * j) * lebesgue_norm(lp_project(field, j), p));
        return total + worst;
    }
    CompensatedSum acc;
    for (int j = 0; j <= j_hi; ++j)
        acc.add(std::pow(std::pow(2.0, s * j) * lebesgue_norm(lp_project(field, j), p), r));
    return total + std::pow(acc.value(), 1.0 / r);
}

} // namespace

NormSpec NormSpec::parse(const std::string& text) {
    auto parse_p = [](const std::string& tok) -> double {
        if (tok == "inf" || tok == "Inf" || tok == "INF")
            return kInfinity;
        return std::stod(tok);
    };
    if (text.empty())
        throw DomainError("NormSpec: empty spec");
    const char kind = text[0];
    const std::string rest = text.substr(1);
    std::vector<std::string> toks;
    std::stringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ','))
        toks.push_back(tok);
    try {
        switch (kind) {
        case 'L':
            if (toks.size() != 1)
                throw DomainError("NormSpec: L norm takes one parameter");
            return lp(parse_p(toks[0]));
        case 'H':
            if (toks.size() != 1)
                throw DomainError("NormSpec: H norm takes one parameter");
            return hs(std::stod(toks[0]));
        case 'W':
            if (toks.size() != 2)
                throw DomainError("NormSpec: W norm takes s,p");
            return wsp(std::stoi(toks[0]), parse_p(toks[1]));
        case 'B':
            if (toks.size() != 3)
                throw DomainError("NormSpec: B norm takes s,p,r");
            return besov(std::stod(toks[0]), parse_p(toks[1]), parse_p(toks[2]));
        default:
            break;
        }
    } catch (const std::invalid_argument&) {
        throw DomainError("NormSpec: could not parse '" + text + "'");
    }
    throw DomainError("NormSpec: unknown kind in '" + text + "'");
}

std::string NormSpec::str() const {
    auto fmt = [](double x) -> std::string {
        if (x == kInfinity)
            return "inf";
        std::ostringstream os;
        os << x;
        return os.str();
    };
    std::ostringstream os;
    switch (kind) {
    case Kind::Lebesgue:
        os << "L" << fmt(p);
        break;
    case Kind::SobolevH:
        os << "H" << fmt(s);
        break;
    case Kind::SobolevW:
        os << "W" << fmt(s) << "," << fmt(p);
        break;
    case Kind::Besov:
        os << "B" << fmt(s) << "," << fmt(p) << "," << fmt(r);
        break;
    }
    return os.str();
}

double field_norm(const SpectralField& field, const NormSpec& spec) {
    switch (spec.kind) {
    case NormSpec::Kind::Lebesgue:
        if (spec.p < 1.0)
            throw DomainError("field_norm: p must be in [1, inf]");
        return lebesgue_norm(field, spec.p);
    case NormSpec::Kind::SobolevH:
        if (spec.s < 0.0)
            throw DomainError("field_norm: H^s needs s >= 0");
        return sobolev_h_norm(field, spec.s);
    case NormSpec::Kind::SobolevW:
        if (spec.p < 1.0)
            throw DomainError("field_norm: p must be in [1, inf]");
        return sobolev_w_norm(field, spec.s, spec.p);
    case NormSpec::Kind::Besov:
        if (spec.p < 1.0 || spec.r < 1.0)
            throw DomainError("field_norm: p, r must be in [1, inf]");
        if (spec.s < 0.0)
            throw DomainError("field_norm: Besov s >= 0 only");
        return besov_norm(field, spec.s, spec.p, spec.r);
    }
    throw DomainError("field_norm: unreachable");
}

double sup_norm(const SpectralField& field) {
    return field_norm(field, NormSpec::lp(kInfinity));
}

double interpolation_check(const SpectralField& field, const std::array<int, 3>& beta,
                           const std::array<int, 3>& alpha) {
    const int ob = beta[0] + beta[1] + beta[2];
    const int oa = alpha[0] + alpha[1] + alpha[2];
    if (ob < 0 || oa <= 0 || ob > oa)
        throw DomainError("interpolation_check: need 0 <= |beta| <= |alpha|, |alpha| > 0");
    const double sup_f = sup_norm(field);
    if (sup_f == 0.0)
        throw DegenerateInputError("interpolation_check: field vanishes identically");
    const double q = static_cast<double>(ob) / static_cast<double>(oa);
    const double lhs = sup_norm(apply_derivative(field, beta));
    const double rhs = std::pow(sup_f, 1.0 - q) *
                       std::pow(sobolev_h_norm(field, 2.0 + oa), q);
    return lhs / rhs;
}

} // namespace vkg
