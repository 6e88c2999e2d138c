#pragma once

// Model fixtures shared by the unit, property and acceptance tests.

#include "monoride/constraints.hpp"
#include "monoride/dynamics.hpp"

#include <string>

namespace monoride::testing {

/// Q = 3300 A s, R0 = 0.05 Ohm, one RC pair (0.02 Ohm, 1000 F), U(s) = 3.0 + 1.2 s.
inline EcmParams reference_ecm() {
    EcmParams p;
    p.capacity = 3300.0;
    p.series_resistance = 0.05;
    p.rc_pairs = {{0.02, 1000.0}};
    return p;
}

inline ThermalParams reference_thermal() { return {0.07, 1000.0, 1.0}; }

/// 10C for the reference capacity.
inline double reference_current_bound() { return 10.0 * 3300.0 / 3600.0; }

inline PadeSpmParams pade_fixture() {
    PadeSpmParams p;
    p.a1 = -0.05;
    p.a2 = -0.2;
    p.b1 = 3e-4;
    p.b2 = 5e-4;
    p.b3 = 1e-3;
    p.c1 = 1.0;
    p.c2 = 1.0;
    p.c3 = 1.0;
    return p;
}

inline FdSpmParams fd_fixture(std::size_t n) {
    FdSpmParams p;
    p.diffusivity = 1e-14;
    p.particle_radius = 5e-6;
    p.n_interior = n;
    p.surface_area = 3.0 * 0.5 / 5e-6;
    p.collector_area = 0.1;
    p.thickness = 70e-6;
    p.electrode_sign = +1;
    return p;
}

inline std::string data_path(const std::string& name) { return std::string(MONORIDE_TEST_DATA) + "/" + name; }

}  // namespace monoride::testing
