#include "monoride/bangride.hpp"

#include "monoride/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace monoride {

BangRidePolicy BangRidePolicy::create(ConstraintSet set, double u_max, double u_min,
                                      std::optional<double> lookahead_dt) {
    const bool has_input_bound = std::any_of(set.begin(), set.end(), [](const Constraint& c) {
        return c.kind == ConstraintKind::kInputUpper;
    });
    if (!has_input_bound) {
        std::string name = "input_bound";
        while (set.index_of(name)) name += "_";
        set.add(upper_bound_input(u_max, name));
    }
    BangRidePolicy p;
    p.u_min = u_min;
    p.u_max = u_max;
    p.set = std::move(set);
    p.bisection_tol = 1e-9 * (u_max - u_min);
    p.lookahead_dt = lookahead_dt;
    p.validate();
    return p;
}

void BangRidePolicy::validate() const {
    if (!(std::isfinite(u_min) && std::isfinite(u_max) && u_min < u_max)) {
        throw ParameterError("u_max", "need finite u_min < u_max");
    }
    if (!(bisection_tol > 0.0)) throw ParameterError("bisection_tol", "must be > 0");
    if (max_iter < 1) throw ParameterError("max_iter", "must be >= 1");
    if (lookahead_dt && !(*lookahead_dt > 0.0)) throw ParameterError("lookahead_dt", "must be > 0");
    if (set.empty()) throw ParameterError("constraints", "policy needs at least one constraint");
}

namespace {

/// Residuals of every constraint for a candidate input: mixed constraints at
/// (x, u), state-only constraints at the predicted next state.
class FeasibilityProbe {
public:
    FeasibilityProbe(const ControlSystem& sys, const Vector& x, const BangRidePolicy& policy, double lookahead)
        : sys_(sys), x_(x), policy_(policy), lookahead_(lookahead), u_(1), next_(x.size()) {
        ws_.resize(sys.n_states());
        residual_.resize(policy.set.size());
        for (const auto& c : policy.set) {
            if (!c.depends_on_u) has_state_only_ = true;
        }
    }

    const std::vector<double>& evaluate(double u) {
        u_(0) = u;
        if (has_state_only_) {
            rk4_step(sys_, x_, u_, lookahead_, ws_, next_);
        }
        for (std::size_t k = 0; k < policy_.set.size(); ++k) {
            const auto& c = policy_.set[k];
            residual_[k] = c.depends_on_u ? c(x_, u_) : c(next_, u_);
        }
        return residual_;
    }

    /// Residuals at the current state, for the u-independent admissibility check.
    double current(std::size_t k) {
        u_(0) = policy_.u_min;
        return policy_.set[k](x_, u_);
    }

private:
    const ControlSystem& sys_;
    const Vector& x_;
    const BangRidePolicy& policy_;
    double lookahead_;
    Vector u_;
    Vector next_;
    Rk4Workspace ws_;
    std::vector<double> residual_;
    bool has_state_only_ = false;
};

bool all_nonnegative(const std::vector<double>& r) {
    return std::all_of(r.begin(), r.end(), [](double v) { return v >= 0.0; });
}

RideResult ride_with_lookahead(const ControlSystem& sys, const Vector& x, const BangRidePolicy& policy,
                               double lookahead) {
    if (sys.n_inputs() != 1) throw DimensionError("bang-and-ride needs a single-input system");
    if (static_cast<std::size_t>(x.size()) != sys.n_states()) throw DimensionError("state has the wrong size");
    FeasibilityProbe probe(sys, x, policy, lookahead);
    const auto& set = policy.set;

    // The current state itself must be admissible.
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (!set[k].depends_on_u) {
            const double r = probe.current(k);
            if (!(r >= -set.active_tolerance(k))) {
                throw InfeasibleError("state violates '" + set[k].name + "' (residual " + std::to_string(r) + ")", k,
                                      set[k].name, 0.0);
            }
        }
    }

    double u = policy.u_max;
    if (!all_nonnegative(probe.evaluate(policy.u_max))) {
        const auto& r_min = probe.evaluate(policy.u_min);
        std::size_t worst = 0;
        double worst_scaled = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < set.size(); ++k) {
            const double scaled = r_min[k] + set.active_tolerance(k);
            if (scaled < worst_scaled) {
                worst_scaled = scaled;
                worst = k;
            }
        }
        if (!(worst_scaled >= 0.0)) {
            throw InfeasibleError("no admissible input: '" + set[worst].name + "' is violated even at u_min (residual " +
                                      std::to_string(r_min[worst]) + ")",
                                  worst, set[worst].name, 0.0);
        }
        if (!all_nonnegative(r_min)) {
            // Admissible only within tolerance: stay at the bottom of the interval.
            u = policy.u_min;
        } else {
            double lo = policy.u_min;
            double hi = policy.u_max;
#ifndef NDEBUG
            std::vector<double> r_lo = r_min;
#endif
            for (int it = 0; it < policy.max_iter && hi - lo > policy.bisection_tol; ++it) {
                const double mid = 0.5 * (lo + hi);
                const auto& r_mid = probe.evaluate(mid);
#ifndef NDEBUG
                for (std::size_t k = 0; k < set.size(); ++k) {
                    const double slack = 1e-9 * (1.0 + std::abs(r_lo[k]));
                    if (r_mid[k] > r_lo[k] + slack) {
                        throw std::logic_error("constraint '" + set[k].name + "' increases with the input");
                    }
                }
#endif
                if (all_nonnegative(r_mid)) {
                    lo = mid;
#ifndef NDEBUG
                    r_lo = r_mid;
#endif
                } else {
                    hi = mid;
                }
            }
            u = lo;
        }
    }

    RideResult out;
    out.u = u;
    const auto& r = probe.evaluate(u);
    for (std::size_t k = 0; k < set.size(); ++k) {
        const double tol = set.active_tolerance(k);
        const bool at_boundary = std::abs(r[k]) <= tol || (!set[k].depends_on_u && std::abs(probe.current(k)) <= tol);
        if (at_boundary) out.engaged.push_back(k);
    }
    return out;
}

}  // namespace

RideResult ride_input(const ControlSystem& sys, const Vector& x, const BangRidePolicy& policy) {
    policy.validate();
    if (!policy.lookahead_dt) throw ParameterError("lookahead_dt", "must be set for a standalone ride query");
    return ride_with_lookahead(sys, x, policy, *policy.lookahead_dt);
}

Trajectory simulate_bang_ride(const ControlSystem& sys, const Vector& x0, const BangRidePolicy& policy, double t_f,
                              double dt) {
    policy.validate();
    if (static_cast<std::size_t>(x0.size()) != sys.n_states()) throw DimensionError("initial state has the wrong size");
    const double lookahead = policy.lookahead_dt.value_or(dt);
    Trajectory traj;
    traj.times = make_time_grid(t_f, dt);
    traj.states.reserve(traj.times.size());
    traj.inputs.reserve(traj.times.size());
    traj.states.push_back(x0);
    Rk4Workspace ws;
    ws.resize(sys.n_states());
    Vector next(x0.size());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        RideResult ride;
        try {
            ride = ride_with_lookahead(sys, traj.states[k], policy, lookahead);
        } catch (const InfeasibleError& e) {
            throw InfeasibleError(std::string("ride-infeasible at t = ") + std::to_string(traj.times[k]) + ": " +
                                      e.what(),
                                  e.constraint_index(), e.constraint_name(), traj.times[k]);
        }
        traj.inputs.push_back(Vector::Constant(1, ride.u));
        if (k + 1 == traj.times.size()) break;
        rk4_step(sys, traj.states[k], traj.inputs[k], traj.times[k + 1] - traj.times[k], ws, next);
        if (!next.allFinite()) {
            throw IntegrationBlowup("closed-loop state became non-finite after t = " + std::to_string(traj.times[k]),
                                    traj.times[k]);
        }
        traj.states.push_back(next);
    }
    return traj;
}

std::vector<std::vector<std::size_t>> engaged_profile(const Trajectory& traj, const ConstraintSet& set, double tol) {
    if (set.empty()) throw ParameterError("constraints", "constraint set is empty");
    std::vector<std::vector<std::size_t>> out;
    out.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out.push_back(active_set(set, traj.states[k], traj.inputs[k], tol));
    }
    return out;
}

std::string phase_name(const ConstraintSet& set, const std::vector<std::size_t>& engaged) {
    if (engaged.empty()) return "interior";
    std::vector<std::string> names;
    for (auto k : engaged) {
        const auto& c = set[k];
        std::string n;
        switch (c.kind) {
            case ConstraintKind::kInputUpper: n = "CC"; break;
            case ConstraintKind::kVoltage: n = "CV"; break;
            case ConstraintKind::kTemperature: n = "thermal-limited"; break;
            case ConstraintKind::kPlating: n = "plating-limited"; break;
            case ConstraintKind::kStateUpper: n = c.state_index == 0 ? "SOC-capped" : "state-limited"; break;
            default: n = c.name; break;
        }
        if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    }
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) out += '+';
        out += n;
    }
    return out;
}

}  // namespace monoride
