#pragma once

#include "monoride/types.hpp"

#include <cstddef>
#include <functional>
#include <string>

namespace monoride {

/// Which of the cost hypotheses a running cost is declared to satisfy.
enum class CostClass {
    kMonotone,              ///< non-decreasing in (x, u) jointly
    kStrictInInput,         ///< additionally strictly increasing in u
    kStrictInStateExcited,  ///< strictly increasing in x under x << y; needs an excitable system
    kNonMonotone,           ///< deliberately violates the monotone-cost hypothesis
};

[[nodiscard]] const char* to_string(CostClass c) noexcept;

/// Running cost L(x, u) of the functional J = int_0^tf L dt, to be maximised.
struct RunningCost {
    std::string name;
    std::function<double(const Vector& x, const Vector& u)> eval;
    CostClass monotonicity_class = CostClass::kMonotone;

    double operator()(const Vector& x, const Vector& u) const { return eval(x, u); }

    /// L = u / Q: rate of SOC increase; maximising J maximises the final SOC.
    static RunningCost soc_rate(double capacity);
    /// L = x_1: the integral of the state-of-charge.
    static RunningCost soc_integral();
    /// L = x_i (0-based index).
    static RunningCost state_component(std::size_t index);
    /// L = x_soc + u - x_temp: penalises temperature, so it is not monotone.
    static RunningCost temperature_penalized(std::size_t soc_index, std::size_t temperature_index);
};

}  // namespace monoride
