#pragma once

#include "vkg/errors.hpp"

#include <span>
#include <vector>

namespace vkg {

// Tensor-product cubic B-spline interpolation on a uniform lattice, with a
// periodic or natural (zero second difference) end condition per axis.
// Several value channels can share one geometry so that vector fields are
// interpolated with a single weight computation per query point.
class TensorSpline {
public:
    struct Axis {
        int count;       // lattice points
        double origin;   // coordinate of node 0
        double step;     // node spacing
        bool periodic;
    };

    // values: channel-major, each channel row-major over the axes.
    TensorSpline(std::vector<Axis> axes, int channels, std::span<const double> values);

    int channels() const { return channels_; }

    // Evaluate all channels at a point (coordinates beyond a natural axis are
    // clamped to the boundary; periodic axes wrap).
    void eval(std::span<const double> point, std::span<double> out) const;

    double eval1(std::span<const double> point) const {
        double v;
        eval(point, {&v, 1});
        return v;
    }

private:
    std::vector<Axis> axes_;
    int channels_;
    std::vector<std::size_t> stride_;
    std::vector<double> coeff_; // channel-major B-spline coefficients

    void solve_axis(int axis, std::vector<double>& data) const;
};

} // namespace vkg
