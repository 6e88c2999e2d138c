#pragma once

#include "monoride/bangride.hpp"
#include "monoride/constraints.hpp"
#include "monoride/cost.hpp"
#include "monoride/dynamics.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace monoride {

inline constexpr int kSchemaVersion = 1;

enum class ModelType { kEcm, kPadeSpm, kFdSpm, kThermalEcm };
[[nodiscard]] const char* to_string(ModelType t) noexcept;

struct ModelConfig {
    ModelType type = ModelType::kEcm;
    EcmParams ecm;          ///< ecm and thermal_ecm
    ThermalParams thermal;  ///< thermal_ecm
    PadeSpmParams pade;     ///< pade_spm
    FdSpmParams fd;         ///< fd_spm

    bool operator==(const ModelConfig&) const = default;
};

enum class ConstraintType { kStateUpper, kInputUpper, kVoltage, kTemperature, kPlating };
[[nodiscard]] const char* to_string(ConstraintType t) noexcept;

/// How an input_upper bound is read: directly in amperes, or as a C-rate (multiple of Q / 1 h).
enum class CurrentUnits { kAmps, kCRate };

struct ConstraintConfig {
    ConstraintType type = ConstraintType::kStateUpper;
    std::string name;                 ///< unique; defaulted per type when omitted
    double bound = 0.0;               ///< unused by plating
    std::size_t state = 0;            ///< 1-based; state_upper only
    CurrentUnits units = CurrentUnits::kAmps;  ///< input_upper only
    std::string table;                ///< plating: CSV path (resolved against the config file)
    std::vector<double> concentration;  ///< plating: inline table when `table` is empty
    std::vector<double> max_current;
    std::optional<double> tol_active;
    std::optional<double> tol_engaged;

    bool operator==(const ConstraintConfig&) const = default;
};

enum class CostType { kSocRate, kSocIntegral, kStateComponent, kTemperaturePenalized };
[[nodiscard]] const char* to_string(CostType t) noexcept;

struct CostConfig {
    CostType type = CostType::kSocRate;
    std::size_t state = 1;  ///< 1-based; state_component only

    bool operator==(const CostConfig&) const = default;
};

struct HorizonConfig {
    double t_f = 600.0;
    double dt = 0.3;

    bool operator==(const HorizonConfig&) const = default;
};

struct PolicyConfig {
    double u_min = 0.0;
    /// Defaults to the resolved input_upper bound.
    std::optional<double> u_max;
    std::optional<double> bisection_tol;
    int max_iter = 60;
    std::optional<double> lookahead_dt;

    bool operator==(const PolicyConfig&) const = default;
};

struct OracleConfig {
    std::size_t n_steps = 5;
    std::vector<double> levels;
    unsigned threads = 1;
    double tol = 1e-6;

    bool operator==(const OracleConfig&) const = default;
};

/// Open-loop input profile for `simulate`: values[i] holds from starts[i].
struct InputProfileConfig {
    std::vector<double> starts{0.0};
    std::vector<double> values{0.0};

    bool operator==(const InputProfileConfig&) const = default;
};

/// Sampling box for check-monotone. Empty state bounds mean [0, 1] per state.
struct CheckConfig {
    std::vector<double> state_lo;
    std::vector<double> state_hi;
    std::optional<double> u_lo;  ///< defaults to policy.u_min
    std::optional<double> u_hi;  ///< defaults to the resolved u_max
    std::size_t n_samples = 512;

    bool operator==(const CheckConfig&) const = default;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    ModelConfig model;
    std::vector<double> initial_state;  ///< empty means the zero state
    std::vector<ConstraintConfig> constraints;
    CostConfig cost;
    HorizonConfig horizon;
    PolicyConfig policy;
    std::optional<OracleConfig> oracle;
    std::optional<InputProfileConfig> input;
    CheckConfig check;
    std::uint64_t seed = 0;
    double tol_active = ConstraintSet::kDefaultTolActive;
    double tol_engaged = 1e-4;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates; throws ConfigError with the offending field or line.
[[nodiscard]] ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

/// Every field written explicitly, so the output documents the resolved defaults.
[[nodiscard]] std::string dump_config(const ExperimentConfig& config);
void save_config(const ExperimentConfig& config, const std::string& path);

/// Everything a subcommand needs, instantiated from a validated config.
struct Experiment {
    ControlSystem system;
    ConstraintSet constraints;
    RunningCost cost;
    BangRidePolicy policy;
    Vector x0;
    double t_f;
    double dt;
    std::optional<EcmParams> ecm;  ///< set for ECM-family models (enables the voltage column)
    OutputMap surface_output;      ///< set for SPM models
};

[[nodiscard]] Experiment build_experiment(const ExperimentConfig& config);

/// Bound of an input_upper constraint in amperes.
[[nodiscard]] double input_bound_amps(const ExperimentConfig& config, const ConstraintConfig& c);

}  // namespace monoride
