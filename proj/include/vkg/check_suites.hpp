#pragma once

#include "vkg/simulation.hpp"

#include <string>
#include <vector>

namespace vkg {

// One measured quantity with its pinned acceptance interval.
struct CheckLine {
    std::string name;
    double measured = 0.0;
    double lo = -kInfinity;
    double hi = kInfinity;
    bool pass = false;
};

struct CheckReport {
    std::string suite;
    std::vector<CheckLine> lines;
    bool pass = true;

    void add(const std::string& name, double measured, double lo, double hi) {
        const bool ok = measured >= lo && measured <= hi;
        lines.push_back({name, measured, lo, hi, ok});
        pass = pass && ok;
    }
    void add_max(const std::string& name, double measured, double hi) {
        add(name, measured, -kInfinity, hi);
    }
};

std::vector<std::string> check_suite_names();

// Dispatch by suite name: green, bernstein, keyint, decomp, duhamel, scatter.
// Unknown names raise UsageError.
CheckReport run_check_suite(const std::string& name);

CheckReport check_green();
CheckReport check_bernstein();
CheckReport check_keyint();
CheckReport check_decomp();
CheckReport check_duhamel();
CheckReport check_scatter();

// --- shared scenario helpers (also used by the acceptance suite) -------------

// Small-data 1-D nonlinear configuration.
RunConfig small_run_config(int grid_n, int velocity_n, double half_length, double dt,
                           double horizon, double eps0, bool kinetic_snapshots);

// Prop-3.2 / Prop-3.3 residuals of a finished run over a probe set, between
// s = 0 and t = horizon.
struct DecompositionResiduals {
    double velocity = 0.0;
    double straightening = 0.0;
};
DecompositionResiduals decomposition_residuals(const RunResult& run);

// Worst relative residual of the Duhamel decoupling identity at the final
// kinetic snapshot time of a run.
double duhamel_residual(const RunResult& run, Sign sign);

} // namespace vkg
