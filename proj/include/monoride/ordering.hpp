#pragma once

#include "monoride/cost.hpp"
#include "monoride/dynamics.hpp"
#include "monoride/simulate.hpp"
#include "monoride/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace monoride {

/// Componentwise (nonnegative-orthant) order between two vectors.
enum class Order {
    kStrictlyLess,     ///< x << y: every component strictly smaller
    kLess,             ///< x < y: x <= y and x != y, not <<
    kEqual,
    kGreater,          ///< y < x
    kStrictlyGreater,  ///< y << x
    kIncomparable,
};

[[nodiscard]] const char* to_string(Order o) noexcept;

struct OrderRelation {
    Order order = Order::kIncomparable;
    /// Per component: -1 if x_i < y_i, 0 if equal, +1 if x_i > y_i.
    std::vector<int> bits;

    /// x <= y.
    [[nodiscard]] bool leq() const noexcept {
        return order == Order::kStrictlyLess || order == Order::kLess || order == Order::kEqual;
    }
    [[nodiscard]] bool geq() const noexcept {
        return order == Order::kStrictlyGreater || order == Order::kGreater || order == Order::kEqual;
    }
};

[[nodiscard]] OrderRelation vec_compare(const Vector& x, const Vector& y);

/// Result of an entrywise sign test; `first_violation` is 0-based (row, col).
struct EntryCheck {
    bool ok = true;
    std::optional<std::pair<std::size_t, std::size_t>> first_violation;
    explicit operator bool() const noexcept { return ok; }
};

/// Every off-diagonal entry >= -tol (row-major scan order).
[[nodiscard]] EntryCheck is_metzler(const Matrix& A, double tol = 0.0);
/// Every entry >= -tol.
[[nodiscard]] EntryCheck is_nonneg(const Matrix& B, double tol = 0.0);

enum class Verdict { kMonotone, kNonMonotone, kInconclusive };
[[nodiscard]] const char* to_string(Verdict v) noexcept;

/// A sampled partial derivative with the wrong sign.
struct MonotonicityWitness {
    Vector x;
    Vector u;
    std::size_t row = 0;     ///< component j of f (or 0 for a scalar cost)
    std::size_t col = 0;     ///< variable i: state index, or input index when wrt_input
    bool wrt_input = false;
    double estimate = 0.0;
};

struct MonotonicityReport {
    Verdict verdict = Verdict::kMonotone;
    std::vector<MonotonicityWitness> witnesses;
    std::size_t samples_used = 0;
    Box box;
    /// "structural" (exact, linear systems) or "sampled" (certified on the sampled box only).
    std::string method;
    /// Smallest sign-constrained derivative seen.
    double min_estimate = 0.0;
};

struct KamkeMullerOptions {
    std::size_t n_samples = 512;
    double fd_step = 1e-6;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    /// Linear systems are decided exactly from (A, B) when set.
    bool use_structure = true;
    std::size_t max_witnesses = 16;
};

/// Kamke-Muller sign conditions: df_j/dx_i >= 0 (i != j) and df_j/du_i >= 0.
[[nodiscard]] MonotonicityReport check_kamke_muller(const ControlSystem& sys, const Box& box,
                                                    const KamkeMullerOptions& options = {});

/// Sampled check that L is non-decreasing in every state and input.
[[nodiscard]] MonotonicityReport check_cost_monotone(const RunningCost& L, const Box& box,
                                                     const KamkeMullerOptions& options = {});

/// Influence-graph excitability test (sufficient, not necessary).
struct ExcitabilityReport {
    bool excitable = false;
    /// (input, state) pairs with no path in the influence graph.
    std::vector<std::pair<std::size_t, std::size_t>> unreachable;
    std::string method = "graph-test";
};

[[nodiscard]] ExcitabilityReport check_excitability(const ControlSystem& sys, const Box& box,
                                                    const KamkeMullerOptions& options = {});

struct OrderTestResult {
    bool ordered = true;
    std::optional<double> first_violation_time;
    /// min over grid and components of (x_b - x_a) / scale, scale = max(1, max |x|) per component.
    double min_margin = 0.0;
};

/// Simulates (x0_a, u_a) and (x0_b, u_b) and checks x_a(t) <= x_b(t) on the grid,
/// with violations measured in normalised state units against `tol_order`.
/// Throws PreconditionError unless x0_a <= x0_b and u_a <= u_b.
[[nodiscard]] OrderTestResult trajectory_order_test(const ControlSystem& sys, const Vector& x0_a, const Vector& x0_b,
                                                    const PiecewiseConstant& u_a, const PiecewiseConstant& u_b,
                                                    double t_f, double dt, double tol_order = 1e-8);

}  // namespace monoride
