#include "vkg/archive.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace vkg {

namespace {

namespace fs = std::filesystem;

void write_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i)
        b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void write_f64(std::ofstream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

std::string csv_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void write_field_snapshot(const std::string& path, const SpectralField& field, double time,
                          bool as_complex) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("write_field_snapshot: cannot open '" + path + "'");
    const BoxGrid& grid = field.grid();
    out.write("VKG1", 4);
    write_u32(out, 1u);
    write_u32(out, static_cast<std::uint32_t>(grid.dimension()));
    for (int c = 0; c < grid.dimension(); ++c)
        write_u32(out, static_cast<std::uint32_t>(grid.points_per_axis()));
    const int blocks = as_complex ? 2 * field.components() : field.components();
    write_u32(out, static_cast<std::uint32_t>(blocks));
    write_f64(out, time);

    if (as_complex) {
        auto z = from_spectral_complex(field);
        for (int c = 0; c < field.components(); ++c) {
            const Complex* block = z.data() + static_cast<std::size_t>(c) * grid.size();
            for (std::size_t i = 0; i < grid.size(); ++i)
                write_f64(out, block[i].real());
            for (std::size_t i = 0; i < grid.size(); ++i)
                write_f64(out, block[i].imag());
        }
    } else {
        auto r = from_spectral(field);
        for (std::size_t i = 0; i < r.size(); ++i)
            write_f64(out, r[i]);
    }
}

SpectralField read_field_snapshot(const std::string& path, double* time_out,
                                  bool* was_complex) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("read_field_snapshot: cannot open '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (std::memcmp(magic, "VKG1", 4) != 0)
        throw IoError("read_field_snapshot: bad magic");
    const std::uint32_t version = read_u32(in);
    if (version != 1u)
        throw IoError("read_field_snapshot: unsupported version");
    const int d = static_cast<int>(read_u32(in));
    int n = 0;
    for (int c = 0; c < d; ++c)
        n = static_cast<int>(read_u32(in));
    const int blocks = static_cast<int>(read_u32(in));
    const double time = read_f64(in);
    if (time_out)
        *time_out = time;
    if (was_complex)
        *was_complex = false; // caller interprets block pairing

    BoxGrid grid(d, 1.0, n); // half-length is not stored; callers carry it via config
    std::vector<double> samples(grid.size() * static_cast<std::size_t>(blocks));
    for (auto& v : samples)
        v = read_f64(in);
    return to_spectral(grid, samples, blocks);
}

namespace {

void write_norms_csv(const std::string& path, const std::vector<NormRow>& rows) {
    std::ofstream out(path);
    out << "time,quantity,norm,value\n";
    for (const auto& r : rows)
        out << csv_double(r.time) << "," << r.quantity << "," << r.norm << ","
            << csv_double(r.value) << "\n";
}

void write_ledger_csv(const std::string& path, const BootstrapLedger& ledger) {
    std::ofstream out(path);
    out << "quantity,norm,exponent,eps_min,skipped,note\n";
    for (const auto& r : ledger.rows)
        out << r.quantity << "," << r.norm << "," << csv_double(r.exponent) << ","
            << csv_double(r.eps_min) << "," << (r.skipped ? "1" : "0") << "," << r.note
            << "\n";
}

void write_bundle_csv(const std::string& path, const RunResult& result) {
    std::ofstream out(path);
    out << "time,probe,x,v,X,V\n";
    const auto& b = result.probe_trajectories;
    for (std::size_t m = 0; m < b.sample_times.size(); ++m)
        for (std::size_t p = 0; p < b.probes.size(); ++p) {
            out << csv_double(b.sample_times[m]) << "," << p << ","
                << csv_double(b.probes[p].x[0]) << "," << csv_double(b.probes[p].v[0]) << ","
                << csv_double(b.samples[m][p].x[0]) << "," << csv_double(b.samples[m][p].v[0])
                << "\n";
        }
}

} // namespace

void write_archive(const RunResult& result, const std::string& directory) {
    fs::create_directories(directory);
    fs::create_directories(directory + "/snapshots");
    fs::create_directories(directory + "/history");

    {
        std::ofstream out(directory + "/config.txt");
        out << result.config.canonical();
    }
    write_norms_csv(directory + "/norms.csv", result.norms);
    write_ledger_csv(directory + "/ledger.csv", result.ledger);
    write_bundle_csv(directory + "/bundle.csv", result);

    // snapshots at the output cadence
    const auto& hist = result.history;
    std::vector<std::string> files;
    for (double t : result.snapshot_times) {
        const std::size_t i = hist.index_of(t);
        char tag[32];
        std::snprintf(tag, sizeof(tag), "%06zu", i);
        const std::string base = directory + "/snapshots/";
        const auto& s = hist.states[i];
        write_field_snapshot(base + "phi_" + tag + ".bin", s.phi_hat, t, false);
        write_field_snapshot(base + "dtphi_" + tag + ".bin", s.dtphi_hat, t, false);
        write_field_snapshot(base + "bplus_" + tag + ".bin", s.bplus_hat, t, true);
        write_field_snapshot(base + "bminus_" + tag + ".bin", s.bminus_hat, t, true);
        write_field_snapshot(base + "e_" + tag + ".bin", electric_field(s), t, false);
        write_field_snapshot(base + "rho_" + tag + ".bin", hist.rho_hats[i], t, false);
        files.push_back(tag);
    }

    // full-step E and rho histories (one VKG1 record per step, concatenated)
    auto append_record = [](std::ofstream& out, const SpectralField& field, double t) {
        const BoxGrid& g = field.grid();
        auto samples = from_spectral(field);
        out.write("VKG1", 4);
        write_u32(out, 1u);
        write_u32(out, static_cast<std::uint32_t>(g.dimension()));
        for (int c = 0; c < g.dimension(); ++c)
            write_u32(out, static_cast<std::uint32_t>(g.points_per_axis()));
        write_u32(out, static_cast<std::uint32_t>(field.components()));
        write_f64(out, t);
        for (double v : samples)
            write_f64(out, v);
    };
    {
        std::ofstream out_e(directory + "/history/e_steps.bin", std::ios::binary);
        std::ofstream out_r(directory + "/history/rho_steps.bin", std::ios::binary);
        for (std::size_t i = 0; i < hist.size(); ++i) {
            append_record(out_e, electric_field(hist.states[i]), hist.times[i]);
            append_record(out_r, hist.rho_hats[i], hist.times[i]);
        }
    }

    {
        std::ofstream out(directory + "/manifest.txt");
        char hash[32];
        std::snprintf(hash, sizeof(hash), "%016" PRIx64,
                      static_cast<std::uint64_t>(result.config.hash()));
        out << "config_hash = " << hash << "\n";
        out << "t_wrap = " << csv_double(result.config.t_wrap()) << "\n";
        out << "snapshots = " << files.size() << "\n";
        out << "steps = " << result.history.size() - 1 << "\n";
    }
}

NormSeries read_norm_series(const std::string& directory, const std::string& quantity,
                            const std::string& norm) {
    std::ifstream in(directory + "/norms.csv");
    if (!in)
        throw IoError("read_norm_series: no norms.csv in '" + directory + "'");
    std::string line;
    std::getline(in, line); // header
    NormSeries series;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string t, q, n, v;
        std::getline(ss, t, ',');
        std::getline(ss, q, ',');
        std::getline(ss, n, ',');
        std::getline(ss, v, ',');
        if (q == quantity && n == norm) {
            series.times.push_back(std::stod(t));
            series.values.push_back(std::stod(v));
        }
    }
    if (series.times.empty())
        throw LookupError("read_norm_series: no rows for quantity '" + quantity + "' norm '" +
                          norm + "'");
    return series;
}

RunConfig read_archive_config(const std::string& directory) {
    return RunConfig::load(directory + "/config.txt");
}

void write_decay_report_csv(const std::string& path, const DecayReport& report) {
    std::ofstream out(path);
    out << "quantity,norm,t0,t1,gamma,residual,samples\n";
    out << report.quantity << "," << report.norm << "," << csv_double(report.t0) << ","
        << csv_double(report.t1) << "," << csv_double(report.gamma) << ","
        << csv_double(report.residual) << "," << report.times.size() << "\n";
    out << "\ntime,value\n";
    for (std::size_t i = 0; i < report.times.size(); ++i)
        out << csv_double(report.times[i]) << "," << csv_double(report.values[i]) << "\n";
}

} // namespace vkg
