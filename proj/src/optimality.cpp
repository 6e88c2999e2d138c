#include "monoride/optimality.hpp"

#include "monoride/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

namespace monoride {

const char* to_string(NecessityStatus s) noexcept {
    switch (s) {
        case NecessityStatus::kNotOptimal: return "not_optimal";
        case NecessityStatus::kPassesNecessity: return "passes_necessity";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Necessity condition

namespace {

double engagement_margin(const Constraint& c, double fallback) { return c.tol_engaged.value_or(fallback); }

bool engaged_at(const Trajectory& traj, std::size_t k, const ConstraintSet& set, double tol_engaged) {
    for (const auto& c : set) {
        if (!(c(traj.states[k], traj.inputs[k]) > engagement_margin(c, tol_engaged))) return true;
    }
    return false;
}

double max_abs_input(const Trajectory& traj) {
    double m = 0.0;
    for (const auto& u : traj.inputs) m = std::max(m, u.cwiseAbs().maxCoeff());
    return m;
}

}  // namespace

std::optional<InteriorTail> find_interior_tail(const Trajectory& traj, const ConstraintSet& set, double tol_engaged) {
    if (set.empty()) throw ParameterError("constraints", "constraint set is empty");
    traj.validate();
    const std::size_t n = traj.size();
    std::size_t first = 0;
    for (std::size_t k = n; k-- > 0;) {
        if (engaged_at(traj, k, set, tol_engaged)) {
            first = k + 1;
            break;
        }
    }
    // The tail must cover a positive time span.
    if (first + 1 >= n) return std::nullopt;
    InteriorTail tail;
    tail.index = first;
    tail.t0 = traj.times[first];
    tail.min_residual = std::numeric_limits<double>::infinity();
    for (std::size_t k = first; k < n; ++k) {
        tail.min_residual = std::min(tail.min_residual, eval_constraints(set, traj.states[k], traj.inputs[k]).minCoeff());
    }
    return tail;
}

Improvement improving_perturbation(const ControlSystem& sys, const Trajectory& traj, const ConstraintSet& set,
                                   const RunningCost& L, double bump_height, double bump_width,
                                   const NecessityOptions& options) {
    if (!(bump_height > 0.0) || !(bump_width > 0.0)) {
        throw ParameterError("bump", "height and width must be > 0");
    }
    const auto tail = find_interior_tail(traj, set, options.tol_engaged);
    if (!tail) throw PreconditionError("no interior tail: some constraint is engaged up to the final time");

    const std::size_t last = traj.size() - 1;
    const std::size_t start = std::max<std::size_t>(tail->index, 1);
    if (start >= last) throw CertificateError("interior tail is too short to carry a bump");
    std::size_t stop = start + 1;
    while (stop < last && traj.times[stop] < traj.times[start] + bump_width) ++stop;

    const Vector& x0 = traj.states.front();
    const auto base = integrate_on_grid(sys, x0, traj.times, traj.inputs);
    const double base_cost = cost(base, L);

    const double floor = 1e-12 * std::max(1.0, max_abs_input(traj));
    for (double height = bump_height; height >= floor; height *= 0.5) {
        std::vector<Vector> inputs = traj.inputs;
        for (std::size_t k = start; k < stop; ++k) {
            inputs[k].array() += height;
        }
        const auto perturbed = integrate_on_grid(sys, x0, traj.times, inputs);
        if (max_violation(perturbed, set).worst < -options.tol_admissible) continue;
        const double perturbed_cost = cost(perturbed, L);
        const double delta = perturbed_cost - base_cost;
        if (!(delta > 0.0)) {
            throw CertificateError("admissible bump did not increase the cost (delta J = " + std::to_string(delta) +
                                   "); the running cost is not strictly monotone here");
        }
        Improvement imp;
        imp.t_start = traj.times[start];
        imp.t_end = traj.times[stop];
        imp.height = height;
        imp.inputs = std::move(inputs);
        imp.base_cost = base_cost;
        imp.perturbed_cost = perturbed_cost;
        imp.delta_j = delta;
        return imp;
    }
    throw CertificateError("improving bump collapsed below " + std::to_string(floor) +
                           " without becoming admissible");
}

NecessityVerdict necessity_check(const ControlSystem& sys, const Trajectory& traj, const ConstraintSet& set,
                                 const RunningCost& L, const NecessityOptions& options) {
    if (set.empty()) throw ParameterError("constraints", "constraint set is empty");
    traj.validate();
    const auto v = max_violation(traj, set);
    if (v.worst < -options.tol_admissible) {
        throw PreconditionError("trajectory is not admissible: '" + set[v.index].name + "' residual " +
                                std::to_string(v.worst) + " at t = " + std::to_string(v.time));
    }
    NecessityVerdict verdict;
    verdict.interior_tail = find_interior_tail(traj, set, options.tol_engaged);
    if (!verdict.interior_tail) {
        verdict.status = NecessityStatus::kPassesNecessity;
        return verdict;
    }
    const double height = options.bump_height.value_or(0.1 * std::max(1.0, max_abs_input(traj)));
    const double width = options.bump_width_fraction * (traj.final_time() - verdict.interior_tail->t0);
    verdict.improvement = improving_perturbation(sys, traj, set, L, height, width, options);
    verdict.status = NecessityStatus::kNotOptimal;
    return verdict;
}

// ---------------------------------------------------------------------------
// Brute-force oracle

namespace {

std::uint64_t checked_power(std::size_t base, std::size_t exp, std::uint64_t cap) {
    std::uint64_t out = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (out > cap / std::max<std::size_t>(base, 1)) return cap + 1;
        out *= base;
    }
    return out;
}

struct SubtreeResult {
    double best_cost = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best;
    std::uint64_t n_admissible = 0;
    std::vector<OracleRecord> records;
};

/// Depth-first enumeration sharing the integration of common prefixes; a prefix
/// that violates a constraint rules out its whole subtree.
class OracleSearch {
public:
    OracleSearch(const ControlSystem& sys, const ConstraintSet& set, const RunningCost& L,
                 const std::vector<double>& levels, std::size_t n_steps, std::size_t spi,
                 const std::vector<double>& times, double tol, bool record)
        : sys_(sys), set_(set), L_(L), levels_(levels), n_steps_(n_steps), spi_(spi), times_(times), tol_(tol),
          record_(record) {
        const std::size_t n = times_.size();
        weights_.assign(n, 0.0);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double h = 0.5 * (times_[k + 1] - times_[k]);
            weights_[k] += h;
            weights_[k + 1] += h;
        }
    }

    SubtreeResult run(std::size_t first_level, const Vector& x0) {
        SubtreeResult res;
        std::vector<std::size_t> idx(n_steps_, 0);
        idx[0] = first_level;
        Workspace ws(sys_.n_states());
        descend(0, x0, 0.0, idx, ws, res);
        return res;
    }

private:
    struct Workspace {
        explicit Workspace(std::size_t n) : u(1) {
            rk.resize(n);
            next.resize(n);
        }
        Rk4Workspace rk;
        Vector u;
        Vector next;
    };

    bool admissible(const Vector& x, const Vector& u) const {
        for (const auto& c : set_) {
            if (!(c(x, u) >= -tol_)) return false;
        }
        return true;
    }

    void record_pruned(std::size_t depth, std::vector<std::size_t>& idx, SubtreeResult& res) const {
        if (!record_) return;
        if (depth + 1 == n_steps_) {
            res.records.push_back({idx, std::numeric_limits<double>::quiet_NaN(), false});
            return;
        }
        for (std::size_t l = 0; l < levels_.size(); ++l) {
            idx[depth + 1] = l;
            record_pruned(depth + 1, idx, res);
        }
        idx[depth + 1] = 0;
    }

    void descend(std::size_t depth, const Vector& x_start, double partial, std::vector<std::size_t>& idx,
                 Workspace& ws, SubtreeResult& res) const {
        ws.u(0) = levels_[idx[depth]];
        Vector x = x_start;
        const std::size_t k0 = depth * spi_;
        for (std::size_t k = k0; k < k0 + spi_; ++k) {
            if (!admissible(x, ws.u)) {
                record_pruned(depth, idx, res);
                return;
            }
            partial += weights_[k] * L_(x, ws.u);
            rk4_step(sys_, x, ws.u, times_[k + 1] - times_[k], ws.rk, ws.next);
            if (!ws.next.allFinite()) {
                throw IntegrationBlowup("oracle rollout became non-finite", times_[k]);
            }
            x.swap(ws.next);
        }
        if (depth + 1 == n_steps_) {
            if (!admissible(x, ws.u)) {
                record_pruned(depth, idx, res);
                return;
            }
            const double total = partial + weights_.back() * L_(x, ws.u);
            ++res.n_admissible;
            if (total > res.best_cost) {
                res.best_cost = total;
                res.best = idx;
            }
            if (record_) res.records.push_back({idx, total, true});
            return;
        }
        for (std::size_t l = 0; l < levels_.size(); ++l) {
            idx[depth + 1] = l;
            descend(depth + 1, x, partial, idx, ws, res);
        }
        idx[depth + 1] = 0;
    }

    const ControlSystem& sys_;
    const ConstraintSet& set_;
    const RunningCost& L_;
    const std::vector<double>& levels_;
    std::size_t n_steps_;
    std::size_t spi_;
    const std::vector<double>& times_;
    double tol_;
    bool record_;
    std::vector<double> weights_;
};

std::size_t steps_per_interval(double t_f, std::size_t n_steps, double dt) {
    if (!(dt > 0.0)) throw ParameterError("dt", "oracle needs a positive integration step");
    const double interval = t_f / static_cast<double>(n_steps);
    const double ratio = interval / dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
        throw ParameterError("dt", "must divide the oracle interval t_f / n_steps");
    }
    return static_cast<std::size_t>(rounded);
}

std::vector<double> oracle_grid(double t_f, std::size_t n_steps, std::size_t spi) {
    const std::size_t n = n_steps * spi;
    std::vector<double> times(n + 1);
    for (std::size_t k = 0; k < n; ++k) {
        times[k] = t_f * static_cast<double>(k) / static_cast<double>(n);
    }
    times[n] = t_f;
    return times;
}

}  // namespace

std::vector<Vector> expand_sequence(const std::vector<double>& sequence, std::size_t steps_per_interval) {
    std::vector<Vector> inputs;
    inputs.reserve(sequence.size() * steps_per_interval + 1);
    for (double level : sequence) {
        for (std::size_t k = 0; k < steps_per_interval; ++k) {
            inputs.push_back(Vector::Constant(1, level));
        }
    }
    if (!sequence.empty()) inputs.push_back(Vector::Constant(1, sequence.back()));
    return inputs;
}

OracleResult brute_force_best(const ControlSystem& sys, const Vector& x0, const ConstraintSet& set,
                              const RunningCost& L, double t_f, std::size_t n_steps, const std::vector<double>& levels,
                              const OracleOptions& options) {
    if (set.empty()) throw ParameterError("constraints", "constraint set is empty");
    if (sys.n_inputs() != 1) throw DimensionError("oracle enumerates scalar inputs only");
    if (static_cast<std::size_t>(x0.size()) != sys.n_states()) throw DimensionError("initial state has the wrong size");
    if (n_steps == 0) throw ParameterError("n_steps", "must be >= 1");
    if (levels.empty()) throw ParameterError("levels", "need at least one control level");
    if (!(std::isfinite(t_f) && t_f > 0.0)) throw ParameterError("t_final", "must be > 0");
    const std::uint64_t total = checked_power(levels.size(), n_steps, options.cap);
    if (total > options.cap) {
        throw ParameterError("oracle", "|levels|^n_steps exceeds the enumeration cap of " + std::to_string(options.cap));
    }
    const std::size_t spi = steps_per_interval(t_f, n_steps, options.dt);
    const auto times = oracle_grid(t_f, n_steps, spi);

    OracleSearch search(sys, set, L, levels, n_steps, spi, times, options.tol, options.record_all);
    std::vector<SubtreeResult> parts(levels.size());
    unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
    threads = std::min<unsigned>(threads, static_cast<unsigned>(levels.size()));
    if (threads <= 1) {
        for (std::size_t l = 0; l < levels.size(); ++l) parts[l] = search.run(l, x0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t l = t; l < levels.size(); l += threads) parts[l] = search.run(l, x0);
            });
        }
        for (auto& th : pool) th.join();
    }

    OracleResult out;
    out.n_evaluated = total;
    double best = -std::numeric_limits<double>::infinity();
    const std::vector<std::size_t>* best_idx = nullptr;
    for (auto& p : parts) {
        out.n_admissible += p.n_admissible;
        if (!p.best.empty() && p.best_cost > best) {
            best = p.best_cost;
            best_idx = &p.best;
        }
        if (options.record_all) {
            std::move(p.records.begin(), p.records.end(), std::back_inserter(out.records));
        }
    }
    if (best_idx == nullptr) {
        throw OracleInfeasibleError("every enumerated control sequence is inadmissible");
    }
    for (auto i : *best_idx) out.best_sequence.push_back(levels[i]);
    const auto traj = integrate_on_grid(sys, x0, times, expand_sequence(out.best_sequence, spi));
    out.best_cost = cost(traj, L);
    return out;
}

void write_oracle_csv(std::ostream& out, const OracleResult& result, const std::vector<double>& levels) {
    if (result.records.empty()) return;
    const std::size_t n = result.records.front().level_indices.size();
    out << "index";
    for (std::size_t j = 0; j < n; ++j) out << ",u" << (j + 1);
    out << ",cost,admissible\n";
    char buf[64];
    for (std::size_t r = 0; r < result.records.size(); ++r) {
        const auto& rec = result.records[r];
        out << r;
        for (auto i : rec.level_indices) {
            std::snprintf(buf, sizeof(buf), "%.17g", levels[i]);
            out << ',' << buf;
        }
        if (rec.admissible) {
            std::snprintf(buf, sizeof(buf), "%.17g", rec.cost);
            out << ',' << buf << ",1\n";
        } else {
            out << ",,0\n";
        }
    }
}

std::vector<double> project_to_levels(const Trajectory& traj, std::size_t n_steps, std::size_t spi,
                                      const std::vector<double>& levels) {
    if (levels.empty()) throw ParameterError("levels", "need at least one control level");
    if (traj.size() < n_steps * spi) throw DimensionError("trajectory is shorter than the oracle grid");
    std::vector<double> sorted = levels;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    for (std::size_t j = 0; j < n_steps; ++j) {
        double lowest = std::numeric_limits<double>::infinity();
        for (std::size_t k = j * spi; k < (j + 1) * spi; ++k) lowest = std::min(lowest, traj.inputs[k](0));
        const double slack = 1e-12 * std::max(1.0, std::abs(lowest));
        double pick = sorted.front();
        for (double l : sorted) {
            if (l <= lowest + slack) pick = l;
        }
        out.push_back(pick);
    }
    return out;
}

OracleGap oracle_gap(const ControlSystem& sys, const Vector& x0, const ConstraintSet& set, const RunningCost& L,
                     double t_f, std::size_t n_steps, const std::vector<double>& levels, const BangRidePolicy& policy,
                     const OracleOptions& options) {
    OracleGap g;
    g.bangride = simulate_bang_ride(sys, x0, policy, t_f, options.dt);
    g.j_bangride = cost(g.bangride, L);
    g.oracle = brute_force_best(sys, x0, set, L, t_f, n_steps, levels, options);
    g.j_oracle = g.oracle.best_cost;
    g.gap = g.j_oracle - g.j_bangride;

    std::vector<double> sorted = levels;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        g.max_level_spacing = std::max(g.max_level_spacing, sorted[i] - sorted[i - 1]);
    }

    const std::size_t spi = steps_per_interval(t_f, n_steps, options.dt);
    const auto times = oracle_grid(t_f, n_steps, spi);
    if (g.bangride.size() != times.size()) {
        throw ParameterError("dt", "bang-ride and oracle grids differ; dt must divide t_f / n_steps");
    }
    const Trajectory& on_grid = g.bangride;
    g.projected_sequence = project_to_levels(on_grid, n_steps, spi, levels);
    const auto projected = integrate_on_grid(sys, x0, times, expand_sequence(g.projected_sequence, spi));
    g.projected_admissible = max_violation(projected, set).worst >= -options.tol;
    g.projected_cost = cost(projected, L);

    // Region visited by both runs, for the monotone-cost check.
    const auto best = integrate_on_grid(sys, x0, times, expand_sequence(g.oracle.best_sequence, spi));
    Box box;
    box.states.assign(sys.n_states(), Interval{std::numeric_limits<double>::infinity(),
                                               -std::numeric_limits<double>::infinity()});
    box.inputs.assign(1, Interval{policy.u_min, policy.u_max});
    for (const Trajectory* t : std::initializer_list<const Trajectory*>{&g.bangride, &best}) {
        for (const auto& x : t->states) {
            for (std::size_t i = 0; i < sys.n_states(); ++i) {
                const double v = x(static_cast<Eigen::Index>(i));
                box.states[i].lo = std::min(box.states[i].lo, v);
                box.states[i].hi = std::max(box.states[i].hi, v);
            }
        }
    }
    KamkeMullerOptions km;
    km.n_samples = 256;
    g.cost_report = check_cost_monotone(L, box, km);
    return g;
}

}  // namespace monoride
