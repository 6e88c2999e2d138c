#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace monoride {

/// Process exit codes surfaced by the CLI.
enum class ExitCode : int {
    kOk = 0,
    kGeneric = 1,
    kConfig = 2,
    kInfeasible = 3,
    kNumerical = 4,
    kCertificate = 5,
};

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual ExitCode exit_code() const noexcept { return ExitCode::kGeneric; }
};

/// A model/constraint/policy parameter violates its invariants.
class ParameterError : public Error {
public:
    ParameterError(std::string field, const std::string& what)
        : Error("invalid parameter '" + field + "': " + what), field_(std::move(field)) {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kConfig; }

private:
    std::string field_;
};

/// Vector or matrix sizes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Caller broke a documented precondition (e.g. unordered inputs to an order test).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Configuration file could not be parsed or cross-referenced.
class ConfigError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kConfig; }
};

/// Malformed CSV input.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Bang-and-ride found no admissible input, even at the lower search bound.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, std::size_t constraint_index, std::string constraint_name,
                    double time)
        : Error(what),
          constraint_index_(constraint_index),
          constraint_name_(std::move(constraint_name)),
          time_(time) {}
    [[nodiscard]] std::size_t constraint_index() const noexcept { return constraint_index_; }
    [[nodiscard]] const std::string& constraint_name() const noexcept { return constraint_name_; }
    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kInfeasible; }

private:
    std::size_t constraint_index_;
    std::string constraint_name_;
    double time_;
};

/// The brute-force oracle found nothing admissible.
class OracleInfeasibleError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kInfeasible; }
};

/// Non-finite values encountered during evaluation or integration.
class NumericalError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kNumerical; }
};

/// Integration produced a non-finite state.
class IntegrationBlowup : public NumericalError {
public:
    IntegrationBlowup(const std::string& what, double last_good_time)
        : NumericalError(what), last_good_time_(last_good_time) {}
    [[nodiscard]] double last_good_time() const noexcept { return last_good_time_; }

private:
    double last_good_time_;
};

/// A non-optimality claim could not be backed by a verified improvement.
class CertificateError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kCertificate; }
};

}  // namespace monoride
