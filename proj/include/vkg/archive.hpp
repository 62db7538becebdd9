#pragma once

#include "vkg/simulation.hpp"

#include <string>

namespace vkg {

// Archive layout (all files append-once; bit-identical for identical
// config + seed):
//   config.txt    canonical key = value snapshot
//   manifest.txt  config hash, t_wrap, file list
//   norms.csv     time,quantity,norm,value
//   ledger.csv    bootstrap ledger rows
//   bundle.csv    forward probe trajectories at the output cadence
//   snapshots/*.bin   field/density snapshots in the VKG1 binary layout
//   history/*.bin     full-step E and rho histories
//
// Binary layout ("VKG1"): magic bytes 'V''K''G''1', u32 version (= 1),
// u32 dimension d, d x u32 points-per-axis, u32 component count, f64 time,
// then component blocks of f64 samples in row-major order, little endian.
// Complex fields are stored as interleaved (re, im) component pairs.

void write_archive(const RunResult& result, const std::string& directory);

// Snapshot primitives (also used by tests).
void write_field_snapshot(const std::string& path, const SpectralField& field, double time,
                          bool as_complex);
SpectralField read_field_snapshot(const std::string& path, double* time_out = nullptr,
                                  bool* was_complex = nullptr);

// Norm series reader for the fit/report verbs.
struct NormSeries {
    std::vector<double> times;
    std::vector<double> values;
};
NormSeries read_norm_series(const std::string& directory, const std::string& quantity,
                            const std::string& norm);

RunConfig read_archive_config(const std::string& directory);

void write_decay_report_csv(const std::string& path, const DecayReport& report);

} // namespace vkg
