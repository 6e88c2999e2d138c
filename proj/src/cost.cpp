#include "monoride/cost.hpp"

#include "monoride/errors.hpp"

#include <cmath>

namespace monoride {

const char* to_string(CostClass c) noexcept {
    switch (c) {
        case CostClass::kMonotone: return "monotone";
        case CostClass::kStrictInInput: return "strict_in_input";
        case CostClass::kStrictInStateExcited: return "strict_in_state_excited";
        case CostClass::kNonMonotone: return "non_monotone";
    }
    return "unknown";
}

RunningCost RunningCost::soc_rate(double capacity) {
    if (!(std::isfinite(capacity) && capacity > 0.0)) {
        throw ParameterError("capacity", "must be > 0");
    }
    return {"soc_rate", [capacity](const Vector&, const Vector& u) { return u(0) / capacity; },
            CostClass::kStrictInInput};
}

RunningCost RunningCost::soc_integral() {
    return {"soc_integral", [](const Vector& x, const Vector&) { return x(0); }, CostClass::kStrictInStateExcited};
}

RunningCost RunningCost::state_component(std::size_t index) {
    const auto i = static_cast<Eigen::Index>(index);
    return {"state_component(" + std::to_string(index + 1) + ")",
            [i](const Vector& x, const Vector&) { return x(i); }, CostClass::kStrictInStateExcited};
}

RunningCost RunningCost::temperature_penalized(std::size_t soc_index, std::size_t temperature_index) {
    const auto s = static_cast<Eigen::Index>(soc_index);
    const auto t = static_cast<Eigen::Index>(temperature_index);
    return {"temperature_penalized", [s, t](const Vector& x, const Vector& u) { return x(s) + u(0) - x(t); },
            CostClass::kNonMonotone};
}

}  // namespace monoride
