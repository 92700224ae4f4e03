#include "modstab/grid.hpp"

#include <cmath>

#include "modstab/error.hpp"

namespace modstab {

SampleGrid::SampleGrid(double lo, double hi, std::size_t count) : lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) throw ArgumentError("grid needs finite lo < hi");
    if (count < 2) throw ArgumentError("grid needs at least two points");
    points_.reserve(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i + 1 < count; ++i) {
        const double x = lo + step * static_cast<double>(i);
        // Snap symmetric-grid round-off so that the midpoint is exactly zero.
        points_.push_back(std::fabs(x) < 1e-12 * step ? 0.0 : x);
    }
    points_.push_back(hi);
}

}  // namespace modstab
