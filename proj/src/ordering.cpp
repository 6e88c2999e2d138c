#include "monoride/ordering.hpp"

#include "monoride/errors.hpp"
#include "monoride/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

namespace monoride {

const char* to_string(Order o) noexcept {
    switch (o) {
        case Order::kStrictlyLess: return "strictly_less";
        case Order::kLess: return "less";
        case Order::kEqual: return "equal";
        case Order::kGreater: return "greater";
        case Order::kStrictlyGreater: return "strictly_greater";
        case Order::kIncomparable: return "incomparable";
    }
    return "unknown";
}

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::kMonotone: return "monotone";
        case Verdict::kNonMonotone: return "non_monotone";
        case Verdict::kInconclusive: return "inconclusive";
    }
    return "unknown";
}

OrderRelation vec_compare(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) {
        throw DimensionError("cannot compare vectors of sizes " + std::to_string(x.size()) + " and " +
                             std::to_string(y.size()));
    }
    OrderRelation rel;
    rel.bits.resize(static_cast<std::size_t>(x.size()));
    std::size_t less = 0, greater = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        int b = 0;
        if (x(i) < y(i)) {
            b = -1;
            ++less;
        } else if (x(i) > y(i)) {
            b = 1;
            ++greater;
        }
        rel.bits[static_cast<std::size_t>(i)] = b;
    }
    const auto n = static_cast<std::size_t>(x.size());
    if (less == 0 && greater == 0) {
        rel.order = Order::kEqual;
    } else if (greater == 0) {
        rel.order = less == n ? Order::kStrictlyLess : Order::kLess;
    } else if (less == 0) {
        rel.order = greater == n ? Order::kStrictlyGreater : Order::kGreater;
    } else {
        rel.order = Order::kIncomparable;
    }
    return rel;
}

EntryCheck is_metzler(const Matrix& A, double tol) {
    if (A.rows() != A.cols()) throw DimensionError("Metzler test needs a square matrix");
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            if (i != j && !(A(i, j) >= -tol)) {
                return {false, std::pair{static_cast<std::size_t>(i), static_cast<std::size_t>(j)}};
            }
        }
    }
    return {};
}

EntryCheck is_nonneg(const Matrix& B, double tol) {
    for (Eigen::Index i = 0; i < B.rows(); ++i) {
        for (Eigen::Index j = 0; j < B.cols(); ++j) {
            if (!(B(i, j) >= -tol)) {
                return {false, std::pair{static_cast<std::size_t>(i), static_cast<std::size_t>(j)}};
            }
        }
    }
    return {};
}

namespace {

void check_box(const Box& box, std::size_t n, std::size_t m) {
    if (box.states.size() != n || box.inputs.size() != m) {
        throw DimensionError("box has " + std::to_string(box.states.size()) + "+" +
                             std::to_string(box.inputs.size()) + " coordinates, system needs " + std::to_string(n) +
                             "+" + std::to_string(m));
    }
}

void check_samples(const KamkeMullerOptions& o) {
    if (o.n_samples == 0) throw ParameterError("n_samples", "must be >= 1");
    if (!(o.fd_step > 0.0)) throw ParameterError("fd_step", "must be > 0");
    if (!(o.tol >= 0.0)) throw ParameterError("tol", "must be >= 0");
}

MonotonicityReport structural_report(const LinearPart& lin, const Box& box, double tol, std::size_t max_witnesses) {
    MonotonicityReport rep;
    rep.box = box;
    rep.method = "structural";
    rep.min_estimate = std::numeric_limits<double>::infinity();
    auto consider = [&](double value, std::size_t row, std::size_t col, bool wrt_input) {
        rep.min_estimate = std::min(rep.min_estimate, value);
        if (!(value >= -tol) && rep.witnesses.size() < max_witnesses) {
            rep.witnesses.push_back({Vector(), Vector(), row, col, wrt_input, value});
        }
    };
    for (Eigen::Index j = 0; j < lin.A.rows(); ++j) {
        for (Eigen::Index i = 0; i < lin.A.cols(); ++i) {
            if (i != j) consider(lin.A(j, i), static_cast<std::size_t>(j), static_cast<std::size_t>(i), false);
        }
        for (Eigen::Index i = 0; i < lin.B.cols(); ++i) {
            consider(lin.B(j, i), static_cast<std::size_t>(j), static_cast<std::size_t>(i), true);
        }
    }
    if (!std::isfinite(rep.min_estimate)) rep.min_estimate = 0.0;
    const bool ok = is_metzler(lin.A, tol).ok && is_nonneg(lin.B, tol).ok;
    rep.verdict = ok ? Verdict::kMonotone : Verdict::kNonMonotone;
    return rep;
}

/// Calls visit(sample_x, sample_u, variable_index, wrt_input, fp, fm, h) for every
/// sample point and every perturbed coordinate, with fp/fm the field evaluated at
/// the forward/backward perturbation.
template <typename Eval, typename Visit>
void sweep_central_differences(const Box& box, const KamkeMullerOptions& o, std::size_t out_dim, Eval&& eval,
                               Visit&& visit) {
    HaltonSampler sampler(box, o.seed);
    Vector x, u;
    Vector fp(static_cast<Eigen::Index>(out_dim)), fm(static_cast<Eigen::Index>(out_dim));
    for (std::size_t s = 0; s < o.n_samples; ++s) {
        sampler.point(s, x, u);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double h = fd_step_for(x(i), o.fd_step);
            const double keep = x(i);
            x(i) = keep + h;
            eval(x, u, fp);
            x(i) = keep - h;
            eval(x, u, fm);
            x(i) = keep;
            visit(x, u, static_cast<std::size_t>(i), false, fp, fm, h);
        }
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const double h = fd_step_for(u(i), o.fd_step);
            const double keep = u(i);
            u(i) = keep + h;
            eval(x, u, fp);
            u(i) = keep - h;
            eval(x, u, fm);
            u(i) = keep;
            visit(x, u, static_cast<std::size_t>(i), true, fp, fm, h);
        }
    }
}

/// Round-off floor of a central difference.
double fd_noise(double fp, double fm, double h) {
    return 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(fp) + std::abs(fm)) / h;
}

}  // namespace

MonotonicityReport check_kamke_muller(const ControlSystem& sys, const Box& box, const KamkeMullerOptions& options) {
    check_box(box, sys.n_states(), sys.n_inputs());
    check_samples(options);
    if (options.use_structure && sys.linear_part()) {
        return structural_report(*sys.linear_part(), box, options.tol, options.max_witnesses);
    }
    MonotonicityReport rep;
    rep.box = box;
    rep.method = "sampled";
    rep.samples_used = options.n_samples;
    rep.min_estimate = std::numeric_limits<double>::infinity();
    bool near_zero = false;
    bool violated = false;
    auto eval = [&](const Vector& x, const Vector& u, Vector& out) {
        sys.evaluate_into(x, u, out);
        if (!out.allFinite()) throw NumericalError("vector field is non-finite inside the sampling box");
    };
    sweep_central_differences(
        box, options, sys.n_states(), eval,
        [&](const Vector& x, const Vector& u, std::size_t var, bool wrt_input, const Vector& fp, const Vector& fm,
            double h) {
            for (Eigen::Index j = 0; j < fp.size(); ++j) {
                if (!wrt_input && static_cast<std::size_t>(j) == var) continue;
                const double d = (fp(j) - fm(j)) / (2.0 * h);
                rep.min_estimate = std::min(rep.min_estimate, d);
                if (d < -options.tol) {
                    violated = true;
                    if (rep.witnesses.size() < options.max_witnesses) {
                        rep.witnesses.push_back({x, u, static_cast<std::size_t>(j), var, wrt_input, d});
                    }
                } else if (d < -fd_noise(fp(j), fm(j), h)) {
                    near_zero = true;
                }
            }
        });
    rep.verdict = violated ? Verdict::kNonMonotone : (near_zero ? Verdict::kInconclusive : Verdict::kMonotone);
    return rep;
}

MonotonicityReport check_cost_monotone(const RunningCost& L, const Box& box, const KamkeMullerOptions& options) {
    check_samples(options);
    if (!L.eval) throw ParameterError("running_cost", "must be callable");
    MonotonicityReport rep;
    rep.box = box;
    rep.method = "sampled";
    rep.samples_used = options.n_samples;
    rep.min_estimate = std::numeric_limits<double>::infinity();
    bool near_zero = false;
    bool violated = false;
    auto eval = [&](const Vector& x, const Vector& u, Vector& out) {
        out(0) = L(x, u);
        if (!std::isfinite(out(0))) throw NumericalError("running cost is non-finite inside the sampling box");
    };
    sweep_central_differences(box, options, 1, eval,
                              [&](const Vector& x, const Vector& u, std::size_t var, bool wrt_input, const Vector& fp,
                                  const Vector& fm, double h) {
                                  const double d = (fp(0) - fm(0)) / (2.0 * h);
                                  rep.min_estimate = std::min(rep.min_estimate, d);
                                  if (d < -options.tol) {
                                      violated = true;
                                      if (rep.witnesses.size() < options.max_witnesses) {
                                          rep.witnesses.push_back({x, u, 0, var, wrt_input, d});
                                      }
                                  } else if (d < -fd_noise(fp(0), fm(0), h)) {
                                      near_zero = true;
                                  }
                              });
    rep.verdict = violated ? Verdict::kNonMonotone : (near_zero ? Verdict::kInconclusive : Verdict::kMonotone);
    return rep;
}

ExcitabilityReport check_excitability(const ControlSystem& sys, const Box& box, const KamkeMullerOptions& options) {
    check_box(box, sys.n_states(), sys.n_inputs());
    check_samples(options);
    const std::size_t n = sys.n_states();
    const std::size_t m = sys.n_inputs();
    // state_edges[i] = states j influenced by state i; input_edges[i] likewise for input i.
    std::vector<std::set<std::size_t>> state_edges(n), input_edges(m);
    if (const auto& lin = sys.linear_part()) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                if (i != j && std::abs(lin->A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))) > options.tol) {
                    state_edges[i].insert(j);
                }
            }
            for (std::size_t i = 0; i < m; ++i) {
                if (std::abs(lin->B(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))) > options.tol) {
                    input_edges[i].insert(j);
                }
            }
        }
    } else {
        auto eval = [&](const Vector& x, const Vector& u, Vector& out) {
            sys.evaluate_into(x, u, out);
            if (!out.allFinite()) throw NumericalError("vector field is non-finite inside the sampling box");
        };
        sweep_central_differences(box, options, n, eval,
                                  [&](const Vector&, const Vector&, std::size_t var, bool wrt_input, const Vector& fp,
                                      const Vector& fm, double h) {
                                      for (std::size_t j = 0; j < n; ++j) {
                                          if (!wrt_input && j == var) continue;
                                          const auto jj = static_cast<Eigen::Index>(j);
                                          const double d = (fp(jj) - fm(jj)) / (2.0 * h);
                                          if (std::abs(d) > options.tol) {
                                              (wrt_input ? input_edges[var] : state_edges[var]).insert(j);
                                          }
                                      }
                                  });
    }

    ExcitabilityReport rep;
    for (std::size_t in = 0; in < m; ++in) {
        std::vector<bool> seen(n, false);
        std::queue<std::size_t> frontier;
        for (auto j : input_edges[in]) {
            if (!seen[j]) {
                seen[j] = true;
                frontier.push(j);
            }
        }
        while (!frontier.empty()) {
            const auto i = frontier.front();
            frontier.pop();
            for (auto j : state_edges[i]) {
                if (!seen[j]) {
                    seen[j] = true;
                    frontier.push(j);
                }
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!seen[j]) rep.unreachable.emplace_back(in, j);
        }
    }
    rep.excitable = rep.unreachable.empty();
    return rep;
}

OrderTestResult trajectory_order_test(const ControlSystem& sys, const Vector& x0_a, const Vector& x0_b,
                                      const PiecewiseConstant& u_a, const PiecewiseConstant& u_b, double t_f,
                                      double dt, double tol_order) {
    if (!vec_compare(x0_a, x0_b).leq()) {
        throw PreconditionError("trajectory order test needs x0_a <= x0_b");
    }
    std::vector<double> switch_times = u_a.starts();
    switch_times.insert(switch_times.end(), u_b.starts().begin(), u_b.starts().end());
    for (double t : switch_times) {
        if (!vec_compare(u_a(t), u_b(t)).leq()) {
            throw PreconditionError("trajectory order test needs u_a <= u_b; violated at t = " + std::to_string(t));
        }
    }
    const auto ta = integrate(sys, x0_a, u_a, t_f, dt);
    const auto tb = integrate(sys, x0_b, u_b, t_f, dt);

    const auto n = static_cast<Eigen::Index>(sys.n_states());
    Vector scale = Vector::Ones(n);
    for (std::size_t k = 0; k < ta.size(); ++k) {
        scale = scale.cwiseMax(ta.states[k].cwiseAbs()).cwiseMax(tb.states[k].cwiseAbs());
    }
    OrderTestResult res;
    res.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ta.size(); ++k) {
        const double margin = ((tb.states[k] - ta.states[k]).array() / scale.array()).minCoeff();
        res.min_margin = std::min(res.min_margin, margin);
        if (margin < -tol_order && res.ordered) {
            res.ordered = false;
            res.first_violation_time = ta.times[k];
        }
    }
    return res;
}

}  // namespace monoride
