#include "monoride/dynamics.hpp"

#include "monoride/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace monoride {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) {
        throw ParameterError(field, what);
    }
}

bool finite(double v) { return std::isfinite(v); }

std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back("x" + std::to_string(i + 1));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ControlSystem

ControlSystem::ControlSystem(std::size_t n_states, std::size_t n_inputs, Field field,
                             std::vector<std::string> labels)
    : n_states_(n_states), n_inputs_(n_inputs), field_(std::move(field)), labels_(std::move(labels)) {
    if (n_states_ == 0 || n_inputs_ == 0) {
        throw DimensionError("control system needs at least one state and one input");
    }
    if (!field_) {
        throw ParameterError("field", "vector field must be callable");
    }
    if (labels_.empty()) {
        labels_ = default_labels(n_states_);
    }
    if (labels_.size() != n_states_) {
        throw DimensionError("expected " + std::to_string(n_states_) + " state labels, got " +
                             std::to_string(labels_.size()));
    }
}

ControlSystem ControlSystem::linear(Matrix A, Matrix B, std::vector<std::string> labels) {
    if (A.rows() != A.cols() || A.rows() == 0) {
        throw DimensionError("A must be square and non-empty");
    }
    if (B.rows() != A.rows() || B.cols() == 0) {
        throw DimensionError("B must have as many rows as A and at least one column");
    }
    if (!A.allFinite() || !B.allFinite()) {
        throw ParameterError("linear_part", "A and B must be finite");
    }
    const auto n = static_cast<std::size_t>(A.rows());
    const auto m = static_cast<std::size_t>(B.cols());
    Field field = [A, B](const Vector& x, const Vector& u, Vector& dx) {
        dx.noalias() = A * x;
        dx.noalias() += B * u;
    };
    ControlSystem sys(n, m, std::move(field), std::move(labels));
    sys.linear_ = LinearPart{std::move(A), std::move(B)};
    return sys;
}

Vector ControlSystem::operator()(const Vector& x, const Vector& u) const {
    if (static_cast<std::size_t>(x.size()) != n_states_ || static_cast<std::size_t>(u.size()) != n_inputs_) {
        throw DimensionError("field evaluated with state of size " + std::to_string(x.size()) +
                             " and input of size " + std::to_string(u.size()) + "; expected " +
                             std::to_string(n_states_) + " and " + std::to_string(n_inputs_));
    }
    Vector dx(static_cast<Eigen::Index>(n_states_));
    field_(x, u, dx);
    if (!dx.allFinite()) {
        throw NumericalError("vector field returned a non-finite value");
    }
    return dx;
}

// ---------------------------------------------------------------------------
// Open-circuit voltage

OpenCircuitVoltage OpenCircuitVoltage::affine(double offset, double slope) {
    OpenCircuitVoltage ocv;
    ocv.offset_ = offset;
    ocv.slope_ = slope;
    ocv.validate();
    return ocv;
}

OpenCircuitVoltage OpenCircuitVoltage::table(std::vector<double> soc, std::vector<double> volts) {
    OpenCircuitVoltage ocv;
    ocv.soc_ = std::move(soc);
    ocv.volts_ = std::move(volts);
    ocv.validate();
    return ocv;
}

void OpenCircuitVoltage::validate() const {
    if (!is_table()) {
        require(finite(offset_) && finite(slope_), "ocv", "affine coefficients must be finite");
        require(slope_ >= 0.0, "ocv.slope", "OCV must be non-decreasing in SOC");
        return;
    }
    require(soc_.size() == volts_.size(), "ocv", "soc and volts columns differ in length");
    require(soc_.size() >= 2, "ocv", "table needs at least two breakpoints");
    for (std::size_t i = 0; i < soc_.size(); ++i) {
        require(finite(soc_[i]) && finite(volts_[i]), "ocv", "table entries must be finite");
        if (i > 0) {
            require(soc_[i] > soc_[i - 1], "ocv.soc", "breakpoints must be strictly increasing");
            require(volts_[i] >= volts_[i - 1], "ocv.volts", "OCV must be non-decreasing in SOC");
        }
    }
}

double OpenCircuitVoltage::operator()(double soc) const {
    if (!is_table()) {
        return offset_ + slope_ * soc;
    }
    // Segment k covers [soc_[k], soc_[k+1]]; the end segments extrapolate.
    auto it = std::upper_bound(soc_.begin(), soc_.end(), soc);
    std::size_t k = it == soc_.begin() ? 0 : static_cast<std::size_t>(it - soc_.begin()) - 1;
    k = std::min(k, soc_.size() - 2);
    const double w = (soc - soc_[k]) / (soc_[k + 1] - soc_[k]);
    return volts_[k] + w * (volts_[k + 1] - volts_[k]);
}

// ---------------------------------------------------------------------------
// Parameter validation

void EcmParams::validate() const {
    require(finite(capacity) && capacity > 0.0, "capacity", "must be > 0");
    require(finite(series_resistance) && series_resistance >= 0.0, "series_resistance", "must be >= 0");
    for (std::size_t k = 0; k < rc_pairs.size(); ++k) {
        const auto idx = std::to_string(k);
        require(finite(rc_pairs[k].resistance) && rc_pairs[k].resistance > 0.0,
                "rc_pairs[" + idx + "].resistance", "must be > 0");
        require(finite(rc_pairs[k].capacitance) && rc_pairs[k].capacitance > 0.0,
                "rc_pairs[" + idx + "].capacitance", "must be > 0");
    }
    ocv.validate();
}

void PadeSpmParams::validate() const {
    require(finite(a1) && a1 <= 0.0, "a1", "must be <= 0");
    require(finite(a2) && a2 <= 0.0, "a2", "must be <= 0");
    require(finite(b1) && b1 >= 0.0, "b1", "must be >= 0");
    require(finite(b2) && b2 >= 0.0, "b2", "must be >= 0");
    require(finite(b3) && b3 >= 0.0, "b3", "must be >= 0");
    require(finite(c1) && c1 >= 0.0, "c1", "must be >= 0");
    require(finite(c2) && c2 >= 0.0, "c2", "must be >= 0");
    require(finite(c3) && c3 >= 0.0, "c3", "must be >= 0");
}

void FdSpmParams::validate() const {
    require(finite(diffusivity) && diffusivity > 0.0, "diffusivity", "must be > 0");
    require(finite(particle_radius) && particle_radius > 0.0, "particle_radius", "must be > 0");
    require(n_interior >= 2, "n_interior", "must be >= 2");
    require(finite(faraday) && faraday > 0.0, "faraday", "must be > 0");
    require(finite(surface_area) && surface_area > 0.0, "surface_area", "must be > 0");
    require(finite(collector_area) && collector_area > 0.0, "collector_area", "must be > 0");
    require(finite(thickness) && thickness > 0.0, "thickness", "must be > 0");
    require(electrode_sign == 1 || electrode_sign == -1, "electrode_sign", "must be +1 or -1");
    require(spacing() > 0.0, "particle_radius", "grid spacing must be > 0");
}

void ThermalParams::validate() const {
    require(finite(mass) && mass > 0.0, "mass", "must be > 0");
    require(finite(heat_capacity) && heat_capacity > 0.0, "heat_capacity", "must be > 0");
    require(finite(thermal_resistance) && thermal_resistance > 0.0, "thermal_resistance", "must be > 0");
}

// ---------------------------------------------------------------------------
// Model builders

ControlSystem build_ecm(const EcmParams& params) {
    params.validate();
    const auto n = static_cast<Eigen::Index>(params.n_states());
    Matrix A = Matrix::Zero(n, n);
    Matrix B(n, 1);
    B(0, 0) = 1.0 / params.capacity;
    std::vector<std::string> labels{"soc"};
    for (std::size_t k = 0; k < params.rc_pairs.size(); ++k) {
        const auto& rc = params.rc_pairs[k];
        const auto i = static_cast<Eigen::Index>(k + 1);
        A(i, i) = -1.0 / (rc.resistance * rc.capacitance);
        B(i, 0) = 1.0 / rc.capacitance;
        labels.push_back("v_rc" + std::to_string(k + 1));
    }
    return ControlSystem::linear(std::move(A), std::move(B), std::move(labels));
}

double ecm_voltage(const EcmParams& params, const Vector& x, double u) {
    if (static_cast<std::size_t>(x.size()) != params.n_states()) {
        throw DimensionError("ecm_voltage expects a state of size " + std::to_string(params.n_states()) +
                             ", got " + std::to_string(x.size()));
    }
    return params.ocv(x(0)) + x.tail(x.size() - 1).sum() + params.series_resistance * u;
}

namespace {

SystemWithOutput pade_system(const PadeSpmParams& p, double sign) {
    p.validate();
    Matrix A = Matrix::Zero(3, 3);
    A(0, 0) = p.a1;
    A(1, 1) = p.a2;
    Matrix B(3, 1);
    B << sign * p.b1, p.b2, p.b3;
    const double c1 = sign * p.c1;
    const double c2 = p.c2;
    const double c3 = p.c3;
    OutputMap y = [c1, c2, c3](const Vector& x, const Vector&) { return c1 * x(0) + c2 * x(1) + c3 * x(2); };
    return {ControlSystem::linear(std::move(A), std::move(B), {"pade_x1", "pade_x2", "pade_x3"}), std::move(y)};
}

}  // namespace

SystemWithOutput build_pade_spm(const PadeSpmParams& params) {
    // x -> diag(-1, 1, 1) x leaves the diagonal A untouched and flips b1 and c1.
    return pade_system(params, +1.0);
}

SystemWithOutput build_pade_spm_untransformed(const PadeSpmParams& params) {
    return pade_system(params, -1.0);
}

SystemWithOutput build_fd_spm(const FdSpmParams& p) {
    p.validate();
    const auto n = static_cast<Eigen::Index>(p.n_interior);
    const double nd = static_cast<double>(p.n_interior);
    const double delta = p.spacing();
    const double rate = p.diffusivity / (delta * delta);
    Matrix A = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, i) = -2.0 * rate;
        if (i > 0) A(i, i - 1) = rate;
        if (i + 1 < n) A(i, i + 1) = rate;
    }
    A(n - 1, n - 1) = rate * (-2.0 + (nd + 1.0) / nd);

    const double transfer = p.faraday * p.surface_area * p.collector_area * p.thickness;
    const double sign = static_cast<double>(p.electrode_sign);
    Matrix B = Matrix::Zero(n, 1);
    B(n - 1, 0) = sign * (nd + 1.0) * (nd + 1.0) / (nd * transfer);

    std::vector<std::string> labels;
    for (Eigen::Index i = 0; i < n; ++i) {
        labels.push_back("c" + std::to_string(i + 1));
    }

    const double surface_gain = (nd + 1.0) / nd;
    const double feedthrough = sign * p.particle_radius * p.particle_radius / (nd * p.diffusivity * transfer);
    OutputMap y = [n, surface_gain, feedthrough](const Vector& x, const Vector& u) {
        return surface_gain * x(n - 1) + feedthrough * u(0);
    };
    return {ControlSystem::linear(std::move(A), std::move(B), std::move(labels)), std::move(y)};
}

ControlSystem build_thermal_coupled_ecm(const EcmParams& ecm, const ThermalParams& th) {
    ecm.validate();
    th.validate();
    const std::size_t n_rc = ecm.rc_pairs.size();
    const std::size_t n = n_rc + 2;
    const double inv_q = 1.0 / ecm.capacity;
    const double r0 = ecm.series_resistance;
    const double inv_rt = 1.0 / th.thermal_resistance;
    const double inv_mcp = 1.0 / (th.mass * th.heat_capacity);
    std::vector<double> decay(n_rc), gain(n_rc);
    for (std::size_t k = 0; k < n_rc; ++k) {
        decay[k] = 1.0 / (ecm.rc_pairs[k].resistance * ecm.rc_pairs[k].capacitance);
        gain[k] = 1.0 / ecm.rc_pairs[k].capacitance;
    }
    ControlSystem::Field field = [=](const Vector& x, const Vector& u, Vector& dx) {
        const double current = u(0);
        double rc_sum = 0.0;
        dx(0) = current * inv_q;
        for (std::size_t k = 0; k < n_rc; ++k) {
            const auto i = static_cast<Eigen::Index>(k + 1);
            dx(i) = -decay[k] * x(i) + gain[k] * current;
            rc_sum += x(i);
        }
        const auto t = static_cast<Eigen::Index>(n - 1);
        dx(t) = (-x(t) * inv_rt + current * (rc_sum + r0 * current)) * inv_mcp;
    };
    std::vector<std::string> labels{"soc"};
    for (std::size_t k = 0; k < n_rc; ++k) {
        labels.push_back("v_rc" + std::to_string(k + 1));
    }
    labels.emplace_back("temperature");
    return ControlSystem(n, 1, std::move(field), std::move(labels));
}

}  // namespace monoride
