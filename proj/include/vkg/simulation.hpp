#pragma once

#include "vkg/diagnostics.hpp"
#include "vkg/run_config.hpp"

namespace vkg {

struct NormRow {
    double time;
    std::string quantity;
    std::string norm;
    double value;
};

struct RunResult {
    RunConfig config;
    StateHistory history; // field states and rho at every step
    std::vector<NormRow> norms;
    std::vector<double> snapshot_times;

    // forward probe trajectories (scattering raw material)
    std::vector<PhasePoint> probes;
    CharacteristicBundle probe_trajectories;

    // final-state distribution (grid mode keeps the foot arrays)
    std::shared_ptr<Distribution> distribution;

    BootstrapLedger ledger;
};

// The Strang-split time loop: half transport in the frozen field at t_n,
// exact field propagation plus the trapezoid Duhamel step driven by the
// midpoint deposit, half transport in the frozen field at t_{n+1}.  The
// oscillatory profiles accumulate from the same samples, so the split
// reconstruction is exact.  Deterministic for a fixed config and seed.
RunResult run_simulation(const RunConfig& config);

// default scattering probe set for a run (inside the data support)
std::vector<PhasePoint> default_probes(const RunConfig& config);

} // namespace vkg
