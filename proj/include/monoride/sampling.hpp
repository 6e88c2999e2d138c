#pragma once

#include "monoride/types.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace monoride {

/// Randomly shifted Halton sequence over a box (Cranley-Patterson rotation).
/// Deterministic for a given seed; the first point is the box's lower corner
/// shifted by the rotation.
class HaltonSampler {
public:
    HaltonSampler(const Box& box, std::uint64_t seed);

    /// Fills (x, u) with sample number `index`.
    void point(std::size_t index, Vector& x, Vector& u) const;

private:
    Box box_;
    std::vector<double> shift_;
};

/// Central-difference step for a coordinate of magnitude |v|, relative to max(1, |v|).
[[nodiscard]] double fd_step_for(double v, double relative_step) noexcept;

}  // namespace monoride
