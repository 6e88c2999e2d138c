#pragma once

#include "monoride/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace monoride {

/// Dense linear realisation xdot = A x + B u.
struct LinearPart {
    Matrix A;
    Matrix B;
};

/// A controlled ODE xdot = f(x, u).
///
/// Immutable after construction; copies share nothing mutable, so a system may be
/// evaluated from several threads at once.
class ControlSystem {
public:
    /// Writes f(x, u) into `dx`, which is already sized to n_states.
    using Field = std::function<void(const Vector& x, const Vector& u, Vector& dx)>;

    ControlSystem(std::size_t n_states, std::size_t n_inputs, Field field,
                  std::vector<std::string> labels = {});

    /// Positive/linear system with the field taken straight from (A, B).
    static ControlSystem linear(Matrix A, Matrix B, std::vector<std::string> labels = {});

    [[nodiscard]] std::size_t n_states() const noexcept { return n_states_; }
    [[nodiscard]] std::size_t n_inputs() const noexcept { return n_inputs_; }
    [[nodiscard]] const std::optional<LinearPart>& linear_part() const noexcept { return linear_; }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// Checked evaluation: validates dimensions and finiteness of the result.
    [[nodiscard]] Vector operator()(const Vector& x, const Vector& u) const;

    /// Unchecked hot-path evaluation used by the integrators.
    void evaluate_into(const Vector& x, const Vector& u, Vector& dx) const { field_(x, u, dx); }

private:
    std::size_t n_states_;
    std::size_t n_inputs_;
    Field field_;
    std::optional<LinearPart> linear_;
    std::vector<std::string> labels_;
};

/// Scalar output map y = g(x, u), e.g. a particle surface concentration.
using OutputMap = std::function<double(const Vector& x, const Vector& u)>;

/// Open-circuit voltage curve U(soc). Either affine or a tabulated, linearly
/// interpolated curve (linear extrapolation past the end breakpoints).
class OpenCircuitVoltage {
public:
    /// Repo default: U(s) = 3.0 + 1.2 s.
    OpenCircuitVoltage() = default;

    static OpenCircuitVoltage affine(double offset, double slope);
    static OpenCircuitVoltage table(std::vector<double> soc, std::vector<double> volts);

    [[nodiscard]] double operator()(double soc) const;

    [[nodiscard]] bool is_table() const noexcept { return !soc_.empty(); }
    [[nodiscard]] double offset() const noexcept { return offset_; }
    [[nodiscard]] double slope() const noexcept { return slope_; }
    [[nodiscard]] const std::vector<double>& soc_points() const noexcept { return soc_; }
    [[nodiscard]] const std::vector<double>& volt_points() const noexcept { return volts_; }

    /// Throws ParameterError unless the curve is non-decreasing.
    void validate() const;

    bool operator==(const OpenCircuitVoltage&) const = default;

private:
    double offset_ = 3.0;
    double slope_ = 1.2;
    std::vector<double> soc_;
    std::vector<double> volts_;
};

struct RcPair {
    double resistance = 0.0;   ///< [Ohm]
    double capacitance = 0.0;  ///< [F]

    bool operator==(const RcPair&) const = default;
};

/// Equivalent circuit model: SOC integrator, RC relaxation pairs, series resistance.
struct EcmParams {
    double capacity = 0.0;           ///< Q [A s]
    double series_resistance = 0.0;  ///< R0 [Ohm]
    std::vector<RcPair> rc_pairs;
    OpenCircuitVoltage ocv;

    void validate() const;
    [[nodiscard]] std::size_t n_states() const noexcept { return 1 + rc_pairs.size(); }
    bool operator==(const EcmParams&) const = default;
};

/// Third-order Pade realisation of the single particle model, as published
/// (before the sign flip of state 1).
struct PadeSpmParams {
    double a1 = 0.0, a2 = 0.0;
    double b1 = 0.0, b2 = 0.0, b3 = 0.0;
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;

    void validate() const;
    bool operator==(const PadeSpmParams&) const = default;
};

/// Finite-difference single particle model for one electrode.
struct FdSpmParams {
    double diffusivity = 0.0;      ///< Ds [m^2/s]
    double particle_radius = 0.0;  ///< Rs [m]
    std::size_t n_interior = 0;    ///< interior grid points n
    double faraday = 96485.33212;  ///< F [C/mol]
    double surface_area = 0.0;     ///< a, active area per unit volume [1/m]
    double collector_area = 0.0;   ///< current collector area [m^2]
    double thickness = 0.0;        ///< electrode thickness [m]
    int electrode_sign = +1;       ///< +1 cathode, -1 anode

    void validate() const;
    bool operator==(const FdSpmParams&) const = default;
    [[nodiscard]] double spacing() const { return particle_radius / static_cast<double>(n_interior + 1); }
};

/// Lumped thermal model m Cp dT/dt = -T/R_T + u (sum x_rc + R0 u).
struct ThermalParams {
    double mass = 0.0;                ///< [kg]
    double heat_capacity = 0.0;       ///< Cp [J/(kg K)]
    double thermal_resistance = 0.0;  ///< R_T [K/W]

    void validate() const;
    bool operator==(const ThermalParams&) const = default;
};

/// A model together with its surface-concentration output.
struct SystemWithOutput {
    ControlSystem system;
    OutputMap surface_output;
};

/// State 1 is SOC, states 2..n are RC-pair voltages.
[[nodiscard]] ControlSystem build_ecm(const EcmParams& params);

/// Terminal voltage U(x1) + sum_{j>=2} x_j + R0 u. `x` must have exactly 1 + #rc entries.
[[nodiscard]] double ecm_voltage(const EcmParams& params, const Vector& x, double u);

/// Pade SPM after the x1 -> -x1 transformation; B and the output row are nonnegative.
[[nodiscard]] SystemWithOutput build_pade_spm(const PadeSpmParams& params);

/// Pade SPM exactly as published (B = (-b1, b2, b3), y = -c1 x1 + c2 x2 + c3 x3).
[[nodiscard]] SystemWithOutput build_pade_spm_untransformed(const PadeSpmParams& params);

[[nodiscard]] SystemWithOutput build_fd_spm(const FdSpmParams& params);

/// State (SOC, RC voltages..., T). Nonlinear: no linear part.
[[nodiscard]] ControlSystem build_thermal_coupled_ecm(const EcmParams& ecm, const ThermalParams& th);

/// Index of the temperature state in a thermal-coupled ECM.
[[nodiscard]] inline std::size_t thermal_temperature_index(const EcmParams& ecm) noexcept {
    return ecm.n_states();
}

}  // namespace monoride
