#pragma once

#include "monoride/constraints.hpp"
#include "monoride/dynamics.hpp"
#include "monoride/simulate.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace monoride {

/// Bang-and-ride: apply u_max unless some constraint forbids it, in which case
/// apply the largest input that keeps every constraint satisfied.
///
/// The lower input bound is an attribute of the search interval, not a constraint.
struct BangRidePolicy {
    double u_min = 0.0;
    double u_max = 0.0;
    ConstraintSet set;
    double bisection_tol = 0.0;
    int max_iter = 60;
    /// Horizon of the one-step prediction used for state-only constraints;
    /// simulate_bang_ride falls back to its step size when unset.
    std::optional<double> lookahead_dt;

    /// Builds a policy with default tolerances (bisection_tol = 1e-9 (u_max - u_min)).
    /// Appends an `input_bound` constraint u <= u_max unless the set already bounds the input.
    static BangRidePolicy create(ConstraintSet set, double u_max, double u_min = 0.0,
                                 std::optional<double> lookahead_dt = std::nullopt);

    void validate() const;
};

struct RideResult {
    double u = 0.0;
    /// Constraints at (or, for state-only ones, predicted to reach) their boundary.
    std::vector<std::size_t> engaged;
};

/// Largest u in [u_min, u_max] keeping mixed constraints h(x, u) >= 0 and
/// state-only constraints h(x+, u) >= 0 at the one-step prediction x+.
/// Throws InfeasibleError when even u_min violates a constraint by more than its tolerance.
[[nodiscard]] RideResult ride_input(const ControlSystem& sys, const Vector& x, const BangRidePolicy& policy);

/// Closed loop: ride_input at every grid point, held for one step.
[[nodiscard]] Trajectory simulate_bang_ride(const ControlSystem& sys, const Vector& x0, const BangRidePolicy& policy,
                                            double t_f, double dt);

/// Active set at every grid point.
[[nodiscard]] std::vector<std::vector<std::size_t>> engaged_profile(const Trajectory& traj, const ConstraintSet& set,
                                                                    double tol);

/// Human-readable phase for a set of engaged constraints: CC, CV, thermal-limited,
/// SOC-capped, state-limited, plating-limited (joined with '+'), or interior.
[[nodiscard]] std::string phase_name(const ConstraintSet& set, const std::vector<std::size_t>& engaged);

}  // namespace monoride
