#pragma once

#include "monoride/bangride.hpp"
#include "monoride/constraints.hpp"
#include "monoride/cost.hpp"
#include "monoride/dynamics.hpp"
#include "monoride/ordering.hpp"
#include "monoride/simulate.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace monoride {

/// A rectangular input bump and the cost gain it certifies.
struct Improvement {
    double t_start = 0.0;
    double t_end = 0.0;  ///< bump holds on [t_start, t_end)
    double height = 0.0;
    std::vector<Vector> inputs;  ///< perturbed per-grid-point inputs
    double base_cost = 0.0;      ///< J(x0, u), re-integrated
    double perturbed_cost = 0.0; ///< J(x0, u + bump)
    double delta_j = 0.0;
};

struct InteriorTail {
    double t0 = 0.0;
    std::size_t index = 0;       ///< first grid point of the tail
    double min_residual = 0.0;   ///< smallest residual over the tail
};

enum class NecessityStatus { kNotOptimal, kPassesNecessity };
[[nodiscard]] const char* to_string(NecessityStatus s) noexcept;

struct NecessityVerdict {
    NecessityStatus status = NecessityStatus::kPassesNecessity;
    std::optional<InteriorTail> interior_tail;
    std::optional<Improvement> improvement;
};

struct NecessityOptions {
    /// Default margin for "strictly positive"; per-constraint tol_engaged overrides it.
    double tol_engaged = 1e-4;
    /// Admissibility slack on the input trajectory and on perturbed ones.
    double tol_admissible = 1e-6;
    /// Initial bump height; defaults to 10% of max(1, max |u|) when unset.
    std::optional<double> bump_height;
    /// Fraction of the tail covered by the bump.
    double bump_width_fraction = 0.1;
};

/// Finds the earliest t0 after which every residual stays above its engagement margin.
/// A non-empty tail makes the trajectory non-optimal; the verdict then carries a
/// re-integrated improvement with delta_j > 0, or CertificateError is thrown.
[[nodiscard]] NecessityVerdict necessity_check(const ControlSystem& sys, const Trajectory& traj,
                                               const ConstraintSet& set, const RunningCost& L,
                                               const NecessityOptions& options = {});

/// Grid-aligned interior tail of `traj`, if any (same rule as necessity_check).
[[nodiscard]] std::optional<InteriorTail> find_interior_tail(const Trajectory& traj, const ConstraintSet& set,
                                                             double tol_engaged);

/// Adds a bump of `bump_height` over `bump_width` seconds at the start of the interior
/// tail (never at t = 0), halving the height until the perturbed trajectory is admissible.
/// Throws PreconditionError without a tail and CertificateError if the bump collapses
/// or fails to raise J.
[[nodiscard]] Improvement improving_perturbation(const ControlSystem& sys, const Trajectory& traj,
                                                 const ConstraintSet& set, const RunningCost& L, double bump_height,
                                                 double bump_width, const NecessityOptions& options = {});

struct OracleOptions {
    double dt = 0.0;                 ///< integration step; must divide t_f / n_steps
    std::uint64_t cap = 1'000'000;   ///< maximum |levels|^n_steps
    double tol = 1e-6;               ///< admissibility slack
    unsigned threads = 1;            ///< 0 = hardware concurrency
    bool record_all = false;         ///< keep every sequence for audit export
};

struct OracleRecord {
    std::vector<std::size_t> level_indices;
    double cost = 0.0;  ///< NaN when inadmissible
    bool admissible = false;
};

struct OracleResult {
    double best_cost = 0.0;
    std::vector<double> best_sequence;  ///< one control level per interval
    std::uint64_t n_evaluated = 0;
    std::uint64_t n_admissible = 0;
    std::vector<OracleRecord> records;  ///< filled when record_all
};

/// Exhaustive search over piecewise-constant controls on n_steps equal intervals.
/// Ties keep the first sequence in lexicographic (first-interval-major) order.
[[nodiscard]] OracleResult brute_force_best(const ControlSystem& sys, const Vector& x0, const ConstraintSet& set,
                                            const RunningCost& L, double t_f, std::size_t n_steps,
                                            const std::vector<double>& levels, const OracleOptions& options);

/// Expands a per-interval level sequence to a per-grid-point input sequence.
[[nodiscard]] std::vector<Vector> expand_sequence(const std::vector<double>& sequence, std::size_t steps_per_interval);

/// Oracle audit CSV: `index,u1..uN,cost,admissible`.
void write_oracle_csv(std::ostream& out, const OracleResult& result, const std::vector<double>& levels);

struct OracleGap {
    double j_bangride = 0.0;
    double j_oracle = 0.0;
    double gap = 0.0;  ///< j_oracle - j_bangride
    double max_level_spacing = 0.0;
    OracleResult oracle;
    Trajectory bangride;
    /// Bang-ride floored onto the oracle's interval/level grid.
    std::vector<double> projected_sequence;
    double projected_cost = 0.0;
    bool projected_admissible = false;
    /// Sampled monotone-cost check over the region both runs visit.
    MonotonicityReport cost_report;
};

[[nodiscard]] OracleGap oracle_gap(const ControlSystem& sys, const Vector& x0, const ConstraintSet& set,
                                   const RunningCost& L, double t_f, std::size_t n_steps,
                                   const std::vector<double>& levels, const BangRidePolicy& policy,
                                   const OracleOptions& options);

/// Per interval, the largest level not exceeding the minimum of u over that interval
/// (the lowest level when none is).
[[nodiscard]] std::vector<double> project_to_levels(const Trajectory& traj, std::size_t n_steps,
                                                    std::size_t steps_per_interval, const std::vector<double>& levels);

}  // namespace monoride
