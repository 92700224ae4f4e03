#pragma once

#include <cstddef>
#include <vector>

namespace modstab {

/// `count` equally spaced points covering [lo, hi], endpoints included.
class SampleGrid {
public:
    SampleGrid(double lo, double hi, std::size_t count);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    std::size_t size() const noexcept { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    const std::vector<double>& points() const noexcept { return points_; }

    auto begin() const { return points_.begin(); }
    auto end() const { return points_.end(); }

    friend bool operator==(const SampleGrid&, const SampleGrid&) = default;

private:
    double lo_, hi_;
    std::vector<double> points_;
};

}  // namespace modstab
