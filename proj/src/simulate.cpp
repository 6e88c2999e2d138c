#include "monoride/simulate.hpp"

#include "monoride/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace monoride {

void Trajectory::validate() const {
    if (times.empty()) throw FormatError("trajectory is empty");
    if (states.size() != times.size() || inputs.size() != times.size()) {
        throw FormatError("trajectory columns have inconsistent lengths");
    }
    if (times.front() != 0.0) throw FormatError("trajectory must start at t = 0");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || (k > 0 && !(times[k] > times[k - 1]))) {
            throw FormatError("trajectory times must be finite and strictly increasing");
        }
        if (states[k].size() != states.front().size() || inputs[k].size() != inputs.front().size()) {
            throw FormatError("trajectory rows have inconsistent widths");
        }
        if (!states[k].allFinite() || !inputs[k].allFinite()) {
            throw FormatError("trajectory contains non-finite values at t = " + std::to_string(times[k]));
        }
    }
}

// ---------------------------------------------------------------------------
// PiecewiseConstant

PiecewiseConstant::PiecewiseConstant(std::vector<double> starts, std::vector<Vector> values)
    : starts_(std::move(starts)), values_(std::move(values)) {
    if (starts_.empty() || starts_.size() != values_.size()) {
        throw DimensionError("piecewise-constant input needs one value per start time");
    }
    if (starts_.front() != 0.0) {
        throw ParameterError("starts", "first piece must start at t = 0");
    }
    for (std::size_t i = 1; i < starts_.size(); ++i) {
        if (!(starts_[i] > starts_[i - 1])) throw ParameterError("starts", "must be strictly increasing");
        if (values_[i].size() != values_[0].size()) throw DimensionError("piece values differ in width");
    }
}

PiecewiseConstant PiecewiseConstant::constant(Vector value) { return PiecewiseConstant({0.0}, {std::move(value)}); }

PiecewiseConstant PiecewiseConstant::constant(double value) { return constant(Vector::Constant(1, value)); }

Vector PiecewiseConstant::operator()(double t) const {
    const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
    const auto i = it == starts_.begin() ? 0 : static_cast<std::size_t>(it - starts_.begin()) - 1;
    return values_[i];
}

// ---------------------------------------------------------------------------
// Integration

std::vector<double> make_time_grid(double t_f, double dt, const IntegrateOptions& options) {
    if (!(std::isfinite(t_f) && t_f > 0.0)) throw ParameterError("t_final", "must be > 0");
    if (!(std::isfinite(dt) && dt > 0.0)) throw ParameterError("dt", "must be > 0");
    const double ratio = t_f / dt;
    if (ratio > static_cast<double>(options.step_cap)) {
        throw ParameterError("dt", "t_f/dt exceeds the step cap of " + std::to_string(options.step_cap));
    }
    // Absorb round-off so that t_f = N dt does not create a sliver step.
    auto n = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
    n = std::max<std::size_t>(n, 1);
    std::vector<double> times(n + 1);
    for (std::size_t k = 0; k < n; ++k) {
        times[k] = static_cast<double>(k) * dt;
    }
    times[n] = t_f;
    return times;
}

void Rk4Workspace::resize(std::size_t n) {
    const auto s = static_cast<Eigen::Index>(n);
    k1.resize(s);
    k2.resize(s);
    k3.resize(s);
    k4.resize(s);
    tmp.resize(s);
}

void rk4_step(const ControlSystem& sys, const Vector& x, const Vector& u, double h, Rk4Workspace& ws, Vector& out) {
    sys.evaluate_into(x, u, ws.k1);
    ws.tmp = x + (0.5 * h) * ws.k1;
    sys.evaluate_into(ws.tmp, u, ws.k2);
    ws.tmp = x + (0.5 * h) * ws.k2;
    sys.evaluate_into(ws.tmp, u, ws.k3);
    ws.tmp = x + h * ws.k3;
    sys.evaluate_into(ws.tmp, u, ws.k4);
    out = x + (h / 6.0) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);
}

namespace {

void check_dims(const ControlSystem& sys, const Vector& x0) {
    if (static_cast<std::size_t>(x0.size()) != sys.n_states()) {
        throw DimensionError("initial state has size " + std::to_string(x0.size()) + ", system has " +
                             std::to_string(sys.n_states()) + " states");
    }
    if (!x0.allFinite()) throw NumericalError("initial state is not finite");
}

void check_input(const ControlSystem& sys, const Vector& u, double t) {
    if (static_cast<std::size_t>(u.size()) != sys.n_inputs()) {
        throw DimensionError("input at t = " + std::to_string(t) + " has size " + std::to_string(u.size()));
    }
    if (!u.allFinite()) throw NumericalError("input is not finite at t = " + std::to_string(t));
}

}  // namespace

Trajectory integrate_on_grid(const ControlSystem& sys, const Vector& x0, const std::vector<double>& times,
                             const std::vector<Vector>& inputs) {
    check_dims(sys, x0);
    if (times.empty() || inputs.size() != times.size()) {
        throw DimensionError("need one input per grid point");
    }
    Trajectory traj;
    traj.times = times;
    traj.inputs = inputs;
    traj.states.reserve(times.size());
    traj.states.push_back(x0);
    Rk4Workspace ws;
    ws.resize(sys.n_states());
    Vector next(x0.size());
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        check_input(sys, inputs[k], times[k]);
        rk4_step(sys, traj.states.back(), inputs[k], times[k + 1] - times[k], ws, next);
        if (!next.allFinite()) {
            throw IntegrationBlowup("integration produced a non-finite state after t = " + std::to_string(times[k]),
                                    times[k]);
        }
        traj.states.push_back(next);
    }
    check_input(sys, inputs.back(), times.back());
    return traj;
}

Trajectory integrate(const ControlSystem& sys, const Vector& x0, const Control& control, double t_f, double dt,
                     const IntegrateOptions& options) {
    check_dims(sys, x0);
    if (!control) throw ParameterError("control", "must be callable");
    const auto times = make_time_grid(t_f, dt, options);
    std::vector<Vector> inputs;
    inputs.reserve(times.size());
    for (double t : times) {
        inputs.push_back(control(t));
    }
    return integrate_on_grid(sys, x0, times, inputs);
}

double cost(const Trajectory& traj, const RunningCost& L) {
    if (traj.empty()) throw FormatError("cannot evaluate the cost of an empty trajectory");
    if (!L.eval) throw ParameterError("running_cost", "must be callable");
    double total = 0.0;
    double prev = L(traj.states[0], traj.inputs[0]);
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double cur = L(traj.states[k], traj.inputs[k]);
        total += 0.5 * (traj.times[k] - traj.times[k - 1]) * (prev + cur);
        prev = cur;
    }
    if (!std::isfinite(total)) throw NumericalError("running cost is not finite");
    return total;
}

Violation max_violation(const Trajectory& traj, const ConstraintSet& set) {
    if (set.empty()) throw ParameterError("constraints", "constraint set is empty");
    if (traj.empty()) throw FormatError("trajectory is empty");
    Violation v;
    v.worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        for (std::size_t c = 0; c < set.size(); ++c) {
            const double r = set[c](traj.states[k], traj.inputs[k]);
            if (std::isnan(r)) throw NumericalError("constraint '" + set[c].name + "' evaluated to NaN");
            if (r < v.worst) {
                v = Violation{r, traj.times[k], k, c};
            }
        }
    }
    return v;
}

}  // namespace monoride
