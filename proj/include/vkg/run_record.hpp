#pragma once

#include "vkg/characteristics.hpp"
#include "vkg/field_state.hpp"

#include <string>
#include <vector>

namespace vkg {

// Velocity weight w(v) with its gradient, for weighted source densities
// S_w = int f w(v) dv.  The plain charge density is weight one.
struct VelocityWeight {
    std::string name = "rho";
    std::function<double(const Vec3&)> value = [](const Vec3&) { return 1.0; };
    std::function<Vec3(const Vec3&)> gradient = [](const Vec3&) { return Vec3{0, 0, 0}; };
};

// Grid-mode kinetic snapshot: f at every (x-node, v-node), x-major.
struct KineticSnapshot {
    double time = 0.0;
    std::vector<double> f_values;
};

// Full record of a run at step resolution: field states (with the
// oscillatory profiles), densities, and optional kinetic snapshots.  This is
// what the analysis layer consumes.
struct StateHistory {
    BoxGrid grid;
    std::vector<double> times;
    std::vector<FieldState> states;
    std::vector<SpectralField> rho_hats; // weight-one source density

    // kinetic snapshots (may be sparser than times, or empty)
    std::vector<KineticSnapshot> kinetic;

    explicit StateHistory(const BoxGrid& g) : grid(g) {}

    void append(const FieldState& state, SpectralField rho_hat) {
        if (!times.empty() && state.time <= times.back())
            throw OrderingError("StateHistory::append: times must increase");
        times.push_back(state.time);
        states.push_back(state);
        rho_hats.push_back(std::move(rho_hat));
    }

    std::size_t size() const { return times.size(); }

    std::size_t index_of(double t) const {
        for (std::size_t i = 0; i < times.size(); ++i)
            if (std::abs(times[i] - t) <= 1e-10 * (1.0 + std::abs(t)))
                return i;
        throw MissingHistoryError("StateHistory: no state stored at requested time");
    }

    FieldHistory electric_history() const {
        FieldHistory h(grid);
        for (std::size_t i = 0; i < times.size(); ++i)
            h.append(times[i], electric_field(states[i]));
        return h;
    }
};

} // namespace vkg
