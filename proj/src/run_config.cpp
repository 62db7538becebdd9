#include "vkg/run_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace vkg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    const auto b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

QuadratureRule RunConfig::quadrature_rule() const {
    if (quadrature == "trapezoid")
        return QuadratureRule::trapezoid;
    if (quadrature == "simpson")
        return QuadratureRule::simpson;
    throw ConfigError("RunConfig: unknown quadrature rule '" + quadrature + "'");
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos)
            line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("RunConfig: line " + std::to_string(lineno) + " is not key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "dimension")
                cfg.dimension = std::stoi(value);
            else if (key == "half_length")
                cfg.half_length = std::stod(value);
            else if (key == "grid_n")
                cfg.grid_n = std::stoi(value);
            else if (key == "velocity_n")
                cfg.velocity_n = std::stoi(value);
            else if (key == "v_max")
                cfg.v_max = std::stod(value);
            else if (key == "dt")
                cfg.dt = std::stod(value);
            else if (key == "horizon")
                cfg.horizon = std::stod(value);
            else if (key == "mode")
                cfg.mode = value;
            else if (key == "particles_per_axis_x")
                cfg.particles_per_axis_x = std::stoi(value);
            else if (key == "particles_per_axis_v")
                cfg.particles_per_axis_v = std::stoi(value);
            else if (key == "monte_carlo")
                cfg.monte_carlo = (value == "true" || value == "1");
            else if (key == "particle_count")
                cfg.particle_count = std::stoull(value);
            else if (key == "seed")
                cfg.seed = std::stoull(value);
            else if (key == "eps0")
                cfg.eps0 = std::stod(value);
            else if (key == "f0_amp")
                cfg.f0_amp = std::stod(value);
            else if (key == "f0_sigma_x")
                cfg.f0_sigma_x = std::stod(value);
            else if (key == "f0_v_radius")
                cfg.f0_v_radius = std::stod(value);
            else if (key == "phi0_amp")
                cfg.phi0_amp = std::stod(value);
            else if (key == "phi1_amp")
                cfg.phi1_amp = std::stod(value);
            else if (key == "phi_sigma")
                cfg.phi_sigma = std::stod(value);
            else if (key == "support_radius")
                cfg.support_radius = std::stod(value);
            else if (key == "series_order")
                cfg.series_order = std::stoi(value);
            else if (key == "alpha0")
                cfg.alpha0 = std::stoi(value);
            else if (key == "ledger_depth")
                cfg.ledger_depth = std::stoi(value);
            else if (key == "output_cadence")
                cfg.output_cadence = std::stod(value);
            else if (key == "kinetic_cadence")
                cfg.kinetic_cadence = std::stod(value);
            else if (key == "quadrature")
                cfg.quadrature = value;
            else if (key == "coupling")
                cfg.coupling = (value == "on" || value == "true" || value == "1");
            else
                throw ConfigError("RunConfig: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ConfigError("RunConfig: could not parse value for '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("RunConfig: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string RunConfig::canonical() const {
    std::map<std::string, std::string> kv;
    kv["dimension"] = std::to_string(dimension);
    kv["half_length"] = fmt_double(half_length);
    kv["grid_n"] = std::to_string(grid_n);
    kv["velocity_n"] = std::to_string(velocity_n);
    kv["v_max"] = fmt_double(v_max);
    kv["dt"] = fmt_double(dt);
    kv["horizon"] = fmt_double(horizon);
    kv["mode"] = mode;
    kv["particles_per_axis_x"] = std::to_string(particles_per_axis_x);
    kv["particles_per_axis_v"] = std::to_string(particles_per_axis_v);
    kv["monte_carlo"] = monte_carlo ? "true" : "false";
    kv["particle_count"] = std::to_string(particle_count);
    kv["seed"] = std::to_string(seed);
    kv["eps0"] = fmt_double(eps0);
    kv["f0_amp"] = fmt_double(f0_amp);
    kv["f0_sigma_x"] = fmt_double(f0_sigma_x);
    kv["f0_v_radius"] = fmt_double(f0_v_radius);
    kv["phi0_amp"] = fmt_double(phi0_amp);
    kv["phi1_amp"] = fmt_double(phi1_amp);
    kv["phi_sigma"] = fmt_double(phi_sigma);
    kv["support_radius"] = fmt_double(support_radius);
    kv["series_order"] = std::to_string(series_order);
    kv["alpha0"] = std::to_string(alpha0);
    kv["ledger_depth"] = std::to_string(ledger_depth);
    kv["output_cadence"] = fmt_double(output_cadence);
    kv["kinetic_cadence"] = fmt_double(kinetic_cadence);
    kv["quadrature"] = quadrature;
    kv["coupling"] = coupling ? "on" : "off";
    std::ostringstream out;
    for (const auto& [k, v] : kv)
        out << k << " = " << v << "\n";
    return out.str();
}

std::uint64_t RunConfig::hash() const {
    const std::string text = canonical();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void RunConfig::validate() const {
    if (dimension < 1 || dimension > 3)
        throw ConfigError("RunConfig: dimension must be 1, 2 or 3");
    if (mode != "grid" && mode != "particle")
        throw ConfigError("RunConfig: mode must be grid or particle");
    if (mode == "grid" && dimension > 2)
        throw ConfigError("RunConfig: grid (semi-Lagrangian) mode supports d <= 2 only");
    if (half_length <= 0 || grid_n < 8 || grid_n % 2 != 0)
        throw ConfigError("RunConfig: invalid box parameters");
    if (velocity_n < 4 || v_max <= 0)
        throw ConfigError("RunConfig: invalid velocity lattice");
    if (!(eps0 > 0))
        throw ConfigError("RunConfig: eps0 must be positive");
    if (dt <= 0 || horizon <= 0 || output_cadence <= 0)
        throw ConfigError("RunConfig: time parameters must be positive");
    const double dx = 2.0 * half_length / grid_n;
    if (dt > 0.5 * dx + 1e-12)
        throw ConfigError("RunConfig: dt must satisfy dt <= 0.5 dx (bookkeeping accuracy)");
    if (horizon >= t_wrap())
        throw ConfigError("RunConfig: horizon must end before t_wrap = L - support_radius");
    if (v_max < f0_v_radius + 4.0 * eps0)
        throw ConfigError("RunConfig: v_max must exceed the support radius by the 4 eps0 margin");
    if (alpha0 < 2 || ledger_depth < 0 || series_order < 0)
        throw ConfigError("RunConfig: invalid analysis parameters");
}

PhaseProfile RunConfig::make_f0() const {
    const double amp = eps0 * f0_amp;
    const double sx = f0_sigma_x;
    const double rv = f0_v_radius;
    const int d = dimension;
    return [amp, sx, rv, d](const Vec3& x, const Vec3& v) {
        double r2x = 0.0, r2v = 0.0;
        for (int c = 0; c < d; ++c) {
            r2x += x[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
            r2v += v[static_cast<std::size_t>(c)] * v[static_cast<std::size_t>(c)];
        }
        r2v /= rv * rv;
        if (r2v >= 1.0)
            return 0.0;
        return amp * std::exp(-r2x / (2.0 * sx * sx)) * std::exp(1.0 - 1.0 / (1.0 - r2v));
    };
}

namespace {

SpectralField gaussian_profile(const BoxGrid& grid, double amp, double sigma) {
    std::vector<double> samples(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto x = grid.point(i);
        double r2 = 0.0;
        for (int c = 0; c < grid.dimension(); ++c)
            r2 += x[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
        samples[i] = amp * std::exp(-r2 / (2.0 * sigma * sigma));
    }
    return to_spectral(grid, samples);
}

} // namespace

SpectralField RunConfig::make_phi0_hat(const BoxGrid& grid) const {
    return gaussian_profile(grid, eps0 * phi0_amp, phi_sigma);
}

SpectralField RunConfig::make_phi1_hat(const BoxGrid& grid) const {
    return gaussian_profile(grid, eps0 * phi1_amp, phi_sigma);
}

} // namespace vkg
