#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace monoride {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double width() const noexcept { return hi - lo; }
    [[nodiscard]] bool contains(double v) const noexcept { return v >= lo && v <= hi; }
    bool operator==(const Interval&) const = default;
};

/// Axis-aligned sampling domain over (state, input) space.
struct Box {
    std::vector<Interval> states;
    std::vector<Interval> inputs;

    [[nodiscard]] std::size_t dimension() const noexcept { return states.size() + inputs.size(); }
    bool operator==(const Box&) const = default;
};

/// Convenience constructor for a box with identical bounds on every state.
inline Box uniform_box(std::size_t n_states, Interval state_range, std::size_t n_inputs,
                       Interval input_range) {
    return Box{std::vector<Interval>(n_states, state_range),
               std::vector<Interval>(n_inputs, input_range)};
}

}  // namespace monoride
