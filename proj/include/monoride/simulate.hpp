#pragma once

#include "monoride/constraints.hpp"
#include "monoride/cost.hpp"
#include "monoride/dynamics.hpp"
#include "monoride/types.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace monoride {

/// Sampled (u, x) pair on a strictly increasing time grid starting at 0.
///
/// inputs[k] is held over [times[k], times[k+1]); the final entry is the input
/// in force at t_f, so every grid point carries a complete (x, u) pair.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Vector> inputs;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] bool empty() const noexcept { return times.empty(); }
    [[nodiscard]] std::size_t n_states() const { return states.empty() ? 0 : static_cast<std::size_t>(states.front().size()); }
    [[nodiscard]] std::size_t n_inputs() const { return inputs.empty() ? 0 : static_cast<std::size_t>(inputs.front().size()); }
    [[nodiscard]] double final_time() const { return times.back(); }

    /// Throws FormatError when lengths, the time grid, or finiteness are off.
    void validate() const;
};

/// Input signal t -> u(t); sampled at the start of every integration step.
using Control = std::function<Vector(double t)>;

/// Piecewise-constant input: values[i] holds on [starts[i], starts[i+1]).
class PiecewiseConstant {
public:
    PiecewiseConstant(std::vector<double> starts, std::vector<Vector> values);
    static PiecewiseConstant constant(Vector value);
    static PiecewiseConstant constant(double value);

    [[nodiscard]] Vector operator()(double t) const;
    [[nodiscard]] const std::vector<double>& starts() const noexcept { return starts_; }
    [[nodiscard]] const std::vector<Vector>& values() const noexcept { return values_; }

private:
    std::vector<double> starts_;
    std::vector<Vector> values_;
};

struct IntegrateOptions {
    std::size_t step_cap = 10'000'000;
};

/// Uniform grid 0, dt, 2dt, ..., ending exactly at t_f (last step shortened if needed).
[[nodiscard]] std::vector<double> make_time_grid(double t_f, double dt, const IntegrateOptions& options = {});

/// Scratch space for one RK4 step; reuse across steps to avoid allocation.
struct Rk4Workspace {
    Vector k1, k2, k3, k4, tmp;
    void resize(std::size_t n);
};

/// One classical RK4 step with u held constant.
void rk4_step(const ControlSystem& sys, const Vector& x, const Vector& u, double h, Rk4Workspace& ws, Vector& out);

/// Fixed-step RK4 with zero-order hold on the input.
[[nodiscard]] Trajectory integrate(const ControlSystem& sys, const Vector& x0, const Control& control, double t_f,
                                   double dt, const IntegrateOptions& options = {});

/// Replays a per-grid-point input sequence on a given time grid (inputs.size() == times.size()).
[[nodiscard]] Trajectory integrate_on_grid(const ControlSystem& sys, const Vector& x0, const std::vector<double>& times,
                                           const std::vector<Vector>& inputs);

/// Trapezoidal rule over the grid of L(x_k, u_k).
[[nodiscard]] double cost(const Trajectory& traj, const RunningCost& L);

struct Violation {
    double worst = 0.0;      ///< min over grid and constraints of h_k(x, u)
    double time = 0.0;       ///< where it occurs
    std::size_t step = 0;    ///< grid index
    std::size_t index = 0;   ///< constraint index
};

/// Worst residual along the trajectory; ties go to the earliest point and lowest index.
[[nodiscard]] Violation max_violation(const Trajectory& traj, const ConstraintSet& set);

}  // namespace monoride
