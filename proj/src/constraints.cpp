#include "monoride/constraints.hpp"

#include "monoride/errors.hpp"
#include "monoride/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace monoride {

const char* to_string(ConstraintKind k) noexcept {
    switch (k) {
        case ConstraintKind::kStateUpper: return "state_upper";
        case ConstraintKind::kInputUpper: return "input_upper";
        case ConstraintKind::kInputLower: return "input_lower";
        case ConstraintKind::kVoltage: return "voltage";
        case ConstraintKind::kTemperature: return "temperature";
        case ConstraintKind::kPlating: return "plating";
        case ConstraintKind::kCustom: return "custom";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// ConstraintSet

ConstraintSet::ConstraintSet(std::vector<Constraint> constraints, double tol_active) : tol_active_(tol_active) {
    if (!(std::isfinite(tol_active) && tol_active >= 0.0)) {
        throw ParameterError("tol_active", "must be finite and >= 0");
    }
    for (auto& c : constraints) {
        add(std::move(c));
    }
}

void ConstraintSet::add(Constraint c) {
    if (c.name.empty()) {
        throw ParameterError("name", "constraint name must be non-empty");
    }
    if (!c.eval) {
        throw ParameterError(c.name, "constraint has no residual function");
    }
    if (index_of(c.name)) {
        throw ParameterError(c.name, "duplicate constraint name");
    }
    for (auto tol : {c.tol_active, c.tol_engaged}) {
        if (tol && !(std::isfinite(*tol) && *tol >= 0.0)) {
            throw ParameterError(c.name, "tolerance overrides must be finite and >= 0");
        }
    }
    constraints_.push_back(std::move(c));
}

double ConstraintSet::active_tolerance(std::size_t k) const {
    return constraints_.at(k).tol_active.value_or(tol_active_);
}

std::optional<std::size_t> ConstraintSet::index_of(const std::string& name) const {
    for (std::size_t k = 0; k < constraints_.size(); ++k) {
        if (constraints_[k].name == name) return k;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// PlatingTable

PlatingTable::PlatingTable(std::vector<double> concentration, std::vector<double> max_current)
    : conc_(std::move(concentration)), current_(std::move(max_current)) {
    if (conc_.size() != current_.size()) {
        throw ParameterError("plating_table", "columns differ in length");
    }
    if (conc_.size() < 2) {
        throw ParameterError("plating_table", "needs at least two breakpoints");
    }
    for (std::size_t i = 0; i < conc_.size(); ++i) {
        if (!std::isfinite(conc_[i]) || !std::isfinite(current_[i])) {
            throw ParameterError("plating_table", "entries must be finite");
        }
        if (i > 0 && !(conc_[i] > conc_[i - 1])) {
            throw ParameterError("plating_table.concentration", "breakpoints must be strictly increasing");
        }
        if (i > 0 && current_[i] > current_[i - 1]) {
            throw ParameterError("plating_table.max_current", "boundary must be non-increasing in concentration");
        }
    }
}

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    const auto last = s.find_last_not_of(" \t\r");
    return first == std::string::npos ? std::string{} : s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, std::size_t line) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw FormatError("line " + std::to_string(line) + ": cannot parse number '" + t + "'");
    }
    return v;
}

}  // namespace

PlatingTable PlatingTable::from_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<double> conc, cur;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (!header_seen) {
            if (comma == std::string::npos || trim(line.substr(0, comma)) != "concentration" ||
                trim(line.substr(comma + 1)) != "max_current") {
                throw FormatError("plating table header must be 'concentration,max_current'");
            }
            header_seen = true;
            continue;
        }
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw FormatError("line " + std::to_string(line_no) + ": expected two columns");
        }
        conc.push_back(parse_double(line.substr(0, comma), line_no));
        cur.push_back(parse_double(line.substr(comma + 1), line_no));
    }
    if (!header_seen) {
        throw FormatError("plating table is empty");
    }
    return PlatingTable(std::move(conc), std::move(cur));
}

PlatingTable PlatingTable::from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open plating table '" + path + "'");
    }
    return from_csv(in);
}

double PlatingTable::boundary(double c) const {
    if (c <= conc_.front() || c >= conc_.back()) {
        if (c < conc_.front() || c > conc_.back()) {
            clamps_->fetch_add(1, std::memory_order_relaxed);
        }
        return c <= conc_.front() ? current_.front() : current_.back();
    }
    const auto it = std::upper_bound(conc_.begin(), conc_.end(), c);
    const auto k = static_cast<std::size_t>(it - conc_.begin()) - 1;
    const double w = (c - conc_[k]) / (conc_[k + 1] - conc_[k]);
    return current_[k] + w * (current_[k + 1] - current_[k]);
}

// ---------------------------------------------------------------------------
// Constructors

Constraint upper_bound_state(std::size_t index, double xbar, std::string name) {
    if (!std::isfinite(xbar)) throw ParameterError("bound", "must be finite");
    const auto i = static_cast<Eigen::Index>(index);
    Constraint c;
    c.name = name.empty() ? "x" + std::to_string(index + 1) + "_upper" : std::move(name);
    c.kind = ConstraintKind::kStateUpper;
    c.eval = [i, xbar](const Vector& x, const Vector&) { return xbar - x(i); };
    c.depends_on_u = false;
    c.declared_nonincreasing_in_u = true;
    c.state_index = index;
    return c;
}

Constraint upper_bound_input(double ubar, std::string name) {
    if (!std::isfinite(ubar)) throw ParameterError("bound", "must be finite");
    Constraint c;
    c.name = std::move(name);
    c.kind = ConstraintKind::kInputUpper;
    c.eval = [ubar](const Vector&, const Vector& u) { return ubar - u(0); };
    c.depends_on_u = true;
    c.declared_nonincreasing_in_u = true;
    return c;
}

Constraint lower_bound_input(double ulower, std::string name) {
    if (!std::isfinite(ulower)) throw ParameterError("bound", "must be finite");
    Constraint c;
    c.name = std::move(name);
    c.kind = ConstraintKind::kInputLower;
    c.eval = [ulower](const Vector&, const Vector& u) { return u(0) - ulower; };
    c.depends_on_u = true;
    c.declared_nonincreasing_in_u = false;
    return c;
}

Constraint voltage_limit(const EcmParams& params, double vbar, std::string name) {
    params.validate();
    if (!std::isfinite(vbar)) throw ParameterError("bound", "must be finite");
    const auto n = static_cast<Eigen::Index>(params.n_states());
    Constraint c;
    c.name = std::move(name);
    c.kind = ConstraintKind::kVoltage;
    c.eval = [params, n, vbar](const Vector& x, const Vector& u) {
        if (x.size() < n) {
            throw DimensionError("voltage limit needs at least " + std::to_string(n) + " states");
        }
        return vbar - ecm_voltage(params, x.head(n), u(0));
    };
    c.depends_on_u = params.series_resistance > 0.0;
    c.declared_nonincreasing_in_u = true;
    return c;
}

Constraint temperature_limit(double tbar, std::size_t temperature_index, std::string name) {
    Constraint c = upper_bound_state(temperature_index, tbar, std::move(name));
    c.kind = ConstraintKind::kTemperature;
    return c;
}

Constraint plating_constraint(PlatingTable table, OutputMap surface, std::string name) {
    if (!surface) throw ParameterError("surface_output", "must be callable");
    Constraint c;
    c.name = std::move(name);
    c.kind = ConstraintKind::kPlating;
    c.eval = [table = std::move(table), surface = std::move(surface)](const Vector& x, const Vector& u) {
        return table.boundary(surface(x, u)) - u(0);
    };
    c.depends_on_u = true;
    c.declared_nonincreasing_in_u = true;
    return c;
}

// ---------------------------------------------------------------------------
// Evaluation

Vector eval_constraints(const ConstraintSet& set, const Vector& x, const Vector& u) {
    Vector r(static_cast<Eigen::Index>(set.size()));
    for (std::size_t k = 0; k < set.size(); ++k) {
        r(static_cast<Eigen::Index>(k)) = set[k](x, u);
    }
    return r;
}

bool is_admissible(const ConstraintSet& set, const Vector& x, const Vector& u, double tol) {
    for (const auto& c : set) {
        if (!(c(x, u) >= -tol)) return false;
    }
    return true;
}

bool is_admissible(const ConstraintSet& set, const Vector& x, const Vector& u) {
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (!(set[k](x, u) >= -set.active_tolerance(k))) return false;
    }
    return true;
}

std::vector<std::size_t> active_set(const ConstraintSet& set, const Vector& x, const Vector& u, double tol) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (std::abs(set[k](x, u)) <= tol) out.push_back(k);
    }
    return out;
}

std::vector<std::size_t> active_set(const ConstraintSet& set, const Vector& x, const Vector& u) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (std::abs(set[k](x, u)) <= set.active_tolerance(k)) out.push_back(k);
    }
    return out;
}

std::vector<InputMonotonicityCheck> verify_nonincreasing_in_u(const ConstraintSet& set, const Box& box,
                                                              const SamplingOptions& options) {
    if (options.n_samples == 0) throw ParameterError("n_samples", "must be >= 1");
    if (box.inputs.empty()) throw DimensionError("box has no input coordinates");
    HaltonSampler sampler(box, options.seed);
    std::vector<InputMonotonicityCheck> checks(set.size());
    for (std::size_t k = 0; k < set.size(); ++k) {
        checks[k].name = set[k].name;
        checks[k].max_estimate = -std::numeric_limits<double>::infinity();
    }
    Vector x, u;
    for (std::size_t s = 0; s < options.n_samples; ++s) {
        sampler.point(s, x, u);
        for (Eigen::Index j = 0; j < u.size(); ++j) {
            const double h = fd_step_for(u(j), options.fd_step);
            Vector up = u, dn = u;
            up(j) += h;
            dn(j) -= h;
            for (std::size_t k = 0; k < set.size(); ++k) {
                const double hp = set[k](x, up);
                const double hm = set[k](x, dn);
                if (!std::isfinite(hp) || !std::isfinite(hm)) {
                    throw NumericalError("constraint '" + set[k].name + "' is non-finite inside the box");
                }
                const double d = (hp - hm) / (2.0 * h);
                auto& chk = checks[k];
                ++chk.samples;
                chk.max_estimate = std::max(chk.max_estimate, d);
                if (d > options.tol && chk.passed) {
                    chk.passed = false;
                    chk.witness = InputMonotonicityCheck::Witness{x, u, static_cast<std::size_t>(j), d};
                }
            }
        }
    }
    return checks;
}

}  // namespace monoride
