#pragma once

// Scenarios whose outputs are frozen under tests/data. The generator
// (golden_gen) and the tests must agree on these definitions.

#include "monoride/simulate.hpp"

#include "support/fixtures.hpp"

namespace monoride::testing {

/// Thermal-coupled ECM under a three-level staircase current.
struct ThermalScenario {
    static constexpr double t_f = 600.0;
    static constexpr double dt = 1.0;
    static constexpr std::size_t golden_refinement = 10;

    static ControlSystem system() { return build_thermal_coupled_ecm(reference_ecm(), reference_thermal()); }
    static PiecewiseConstant input() {
        return PiecewiseConstant({0.0, 200.0, 400.0},
                                 {Vector::Constant(1, reference_current_bound()), Vector::Constant(1, 4.0),
                                  Vector::Constant(1, 0.0)});
    }
};

/// Transformed Pade SPM charged at 2 A then rested.
struct PadeScenario {
    static constexpr double t_f = 100.0;
    static constexpr double dt = 0.1;

    static ControlSystem system() { return build_pade_spm(pade_fixture()).system; }
    static PiecewiseConstant input() {
        return PiecewiseConstant({0.0, 60.0}, {Vector::Constant(1, 2.0), Vector::Constant(1, 0.0)});
    }
};

}  // namespace monoride::testing
