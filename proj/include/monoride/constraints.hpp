#pragma once

#include "monoride/dynamics.hpp"
#include "monoride/types.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace monoride {

enum class ConstraintKind {
    kStateUpper,
    kInputUpper,
    kInputLower,  ///< violates the non-increasing-in-u hypothesis; fixtures only
    kVoltage,
    kTemperature,
    kPlating,
    kCustom,
};

[[nodiscard]] const char* to_string(ConstraintKind k) noexcept;

/// One scalar mixed constraint h_k(x, u) >= 0.
struct Constraint {
    std::string name;
    ConstraintKind kind = ConstraintKind::kCustom;
    std::function<double(const Vector& x, const Vector& u)> eval;
    bool depends_on_u = false;
    bool declared_nonincreasing_in_u = true;
    /// State bounded by kStateUpper / kTemperature constraints.
    std::optional<std::size_t> state_index;
    /// Per-constraint overrides of the set-wide tolerances, in natural units.
    std::optional<double> tol_active;
    std::optional<double> tol_engaged;

    double operator()(const Vector& x, const Vector& u) const { return eval(x, u); }
};

/// Ordered list of mixed constraints. Indices are stable: component k of every
/// residual vector is constraint k as added.
class ConstraintSet {
public:
    static constexpr double kDefaultTolActive = 1e-6;

    ConstraintSet() = default;
    explicit ConstraintSet(std::vector<Constraint> constraints, double tol_active = kDefaultTolActive);

    void add(Constraint c);

    [[nodiscard]] std::size_t size() const noexcept { return constraints_.size(); }
    [[nodiscard]] bool empty() const noexcept { return constraints_.empty(); }
    [[nodiscard]] const Constraint& operator[](std::size_t k) const { return constraints_.at(k); }
    [[nodiscard]] auto begin() const noexcept { return constraints_.begin(); }
    [[nodiscard]] auto end() const noexcept { return constraints_.end(); }

    [[nodiscard]] double tol_active() const noexcept { return tol_active_; }
    /// tol_active override of constraint k, else the set default.
    [[nodiscard]] double active_tolerance(std::size_t k) const;
    [[nodiscard]] std::optional<std::size_t> index_of(const std::string& name) const;

private:
    std::vector<Constraint> constraints_;
    double tol_active_ = kDefaultTolActive;
};

/// Monotone piecewise-linear boundary of the lithium-plating region:
/// the largest admissible current as a function of surface concentration.
class PlatingTable {
public:
    PlatingTable(std::vector<double> concentration, std::vector<double> max_current);

    /// Two-column CSV with header `concentration,max_current`.
    static PlatingTable from_csv(std::istream& in);
    static PlatingTable from_csv_file(const std::string& path);

    /// Interpolated boundary; concentrations outside the table are clamped to
    /// the end values and counted.
    [[nodiscard]] double boundary(double concentration) const;
    [[nodiscard]] std::uint64_t clamp_count() const noexcept { return clamps_->load(); }

    [[nodiscard]] const std::vector<double>& concentration() const noexcept { return conc_; }
    [[nodiscard]] const std::vector<double>& max_current() const noexcept { return current_; }

private:
    std::vector<double> conc_;
    std::vector<double> current_;
    std::shared_ptr<std::atomic<std::uint64_t>> clamps_ = std::make_shared<std::atomic<std::uint64_t>>(0);
};

/// x_i <= xbar (0-based i).
[[nodiscard]] Constraint upper_bound_state(std::size_t index, double xbar, std::string name = {});
/// u <= ubar.
[[nodiscard]] Constraint upper_bound_input(double ubar, std::string name = "input_bound");
/// u >= ulower; increasing in u, so it fails the input-monotonicity check.
[[nodiscard]] Constraint lower_bound_input(double ulower, std::string name = "input_lower_bound");
/// v(x, u) <= vbar for an ECM (or a thermal ECM, whose trailing temperature state is ignored).
[[nodiscard]] Constraint voltage_limit(const EcmParams& params, double vbar, std::string name = "voltage");
/// T <= Tbar.
[[nodiscard]] Constraint temperature_limit(double tbar, std::size_t temperature_index,
                                           std::string name = "temperature");
/// u <= boundary(surf(x, u)).
[[nodiscard]] Constraint plating_constraint(PlatingTable table, OutputMap surface, std::string name = "plating");

[[nodiscard]] Vector eval_constraints(const ConstraintSet& set, const Vector& x, const Vector& u);

/// All residuals >= -tol (boundary inclusive).
[[nodiscard]] bool is_admissible(const ConstraintSet& set, const Vector& x, const Vector& u, double tol);
/// Same, with each constraint's own active tolerance.
[[nodiscard]] bool is_admissible(const ConstraintSet& set, const Vector& x, const Vector& u);

/// Indices with |h_k| <= tol.
[[nodiscard]] std::vector<std::size_t> active_set(const ConstraintSet& set, const Vector& x, const Vector& u,
                                                  double tol);
[[nodiscard]] std::vector<std::size_t> active_set(const ConstraintSet& set, const Vector& x, const Vector& u);

/// Sampled check that one constraint is non-increasing in every input.
struct InputMonotonicityCheck {
    struct Witness {
        Vector x;
        Vector u;
        std::size_t input = 0;
        double estimate = 0.0;  ///< dh/du_j; positive means violation
    };
    std::string name;
    bool passed = true;
    std::size_t samples = 0;
    double max_estimate = 0.0;
    std::optional<Witness> witness;
};

struct SamplingOptions {
    std::size_t n_samples = 512;
    double fd_step = 1e-6;  ///< relative to max(1, |coordinate|)
    double tol = 1e-9;
    std::uint64_t seed = 0;
};

[[nodiscard]] std::vector<InputMonotonicityCheck> verify_nonincreasing_in_u(const ConstraintSet& set, const Box& box,
                                                                            const SamplingOptions& options = {});

}  // namespace monoride
