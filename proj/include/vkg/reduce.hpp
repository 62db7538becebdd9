#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace vkg {

// Neumaier compensated accumulator.  All norm and quadrature reductions in
// the library run through this type in a fixed (lexicographic) index order,
// so results are bit-identical between runs regardless of worker count.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_total(std::span<const double> values) {
    CompensatedSum acc;
    for (double v : values)
        acc.add(v);
    return acc.value();
}

} // namespace vkg
