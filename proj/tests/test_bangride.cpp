#include "monoride/bangride.hpp"
#include "monoride/errors.hpp"
#include "monoride/optimality.hpp"

#include "support/fixtures.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace monoride;
using namespace monoride::testing;

namespace {

ConstraintSet reference_constraints(const EcmParams& ecm) {
    const double ubar = reference_current_bound();
    return ConstraintSet({upper_bound_state(0, 1.0, "soc"), upper_bound_state(1, 0.25, "rc_voltage"),
                          temperature_limit(8.0, 2), upper_bound_input(ubar, "current"), voltage_limit(ecm, 4.5)});
}

}  // namespace

TEST(RideInput, BangWhenOnlyTheInputIsBounded) {
    const auto sys = build_ecm(reference_ecm());
    const auto policy = BangRidePolicy::create(ConstraintSet({upper_bound_input(7.0)}), 7.0, 0.0, 0.1);
    Gen g(1);
    for (int i = 0; i < 10; ++i) {
        const auto r = ride_input(sys, g.vector(2, 0, 1), policy);
        EXPECT_EQ(r.u, 7.0);
        EXPECT_EQ(r.engaged, (std::vector<std::size_t>{0}));
    }
}

TEST(RideInput, SolvesTheVoltageLimit) {
    EcmParams p = reference_ecm();
    p.series_resistance = 0.01;
    const auto sys = build_ecm(p);
    const auto policy = BangRidePolicy::create(ConstraintSet({voltage_limit(p, 4.5)}), 50.0, 0.0, 0.1);
    EXPECT_DOUBLE_EQ(policy.bisection_tol, 50e-9);
    // U(1) + x2 = 4.2 + 0.2 = 4.4.
    const auto r = ride_input(sys, (Vector(2) << 1.0, 0.2).finished(), policy);
    EXPECT_NEAR(r.u, 10.0, policy.bisection_tol);
    EXPECT_LE(r.u, 10.0 + 1e-12);
    ASSERT_EQ(r.engaged.size(), 1u);
    EXPECT_EQ(policy.set[r.engaged[0]].name, "voltage");
}

TEST(RideInput, FullCellStopsCharging) {
    const auto sys = build_ecm(reference_ecm());
    const auto policy =
        BangRidePolicy::create(ConstraintSet({upper_bound_state(0, 1.0, "soc")}), reference_current_bound(), 0.0, 0.3);
    const auto r = ride_input(sys, (Vector(2) << 1.0, 0.1).finished(), policy);
    EXPECT_NEAR(r.u, 0.0, 1e-6);
    EXPECT_NE(std::find(r.engaged.begin(), r.engaged.end(), 0u), r.engaged.end());
}

TEST(RideInput, LookaheadSolvesTheStateBound) {
    // The predicted SOC after one step lands on the bound: u = (1 - x1) Q / h.
    const auto p = reference_ecm();
    const auto sys = build_ecm(p);
    const double h = 0.3;
    const auto policy = BangRidePolicy::create(ConstraintSet({upper_bound_state(0, 1.0, "soc")}), 50.0, 0.0, h);
    const double x1 = 1.0 - 1e-4;
    const auto r = ride_input(sys, (Vector(2) << x1, 0.0).finished(), policy);
    EXPECT_NEAR(r.u, (1.0 - x1) * p.capacity / h, 1e-6);
}

TEST(RideInput, InfeasibleStateIsReported) {
    const auto sys = build_ecm(reference_ecm());
    const auto policy =
        BangRidePolicy::create(ConstraintSet({upper_bound_state(0, 1.0, "soc")}), reference_current_bound(), 0.0, 0.3);
    try {
        (void)ride_input(sys, (Vector(2) << 1.1, 0.0).finished(), policy);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.constraint_name(), "soc");
        EXPECT_EQ(e.exit_code(), ExitCode::kInfeasible);
    }
}

TEST(RideInput, NeedsALookahead) {
    const auto sys = build_ecm(reference_ecm());
    const auto policy = BangRidePolicy::create(ConstraintSet({upper_bound_input(1.0)}), 1.0);
    EXPECT_THROW((void)ride_input(sys, Vector::Zero(2), policy), ParameterError);
}

TEST(Policy, Validation) {
    EXPECT_THROW((void)BangRidePolicy::create(ConstraintSet({upper_bound_input(1.0)}), 0.0, 0.0), ParameterError);
    auto p = BangRidePolicy::create(ConstraintSet({upper_bound_input(1.0)}), 1.0);
    EXPECT_EQ(p.max_iter, 60);
    p.bisection_tol = 0.0;
    EXPECT_THROW(p.validate(), ParameterError);
    // An input bound is added when the set has none.
    const auto q = BangRidePolicy::create(ConstraintSet({upper_bound_state(0, 1.0)}), 2.0);
    ASSERT_EQ(q.set.size(), 2u);
    EXPECT_EQ(q.set[1].kind, ConstraintKind::kInputUpper);
}

TEST(SimulateBangRide, PureBangEqualsConstantCurrent) {
    const auto sys = build_thermal_coupled_ecm(reference_ecm(), reference_thermal());
    const double ubar = reference_current_bound();
    const auto policy = BangRidePolicy::create(ConstraintSet({upper_bound_input(ubar)}), ubar);
    const auto ride = simulate_bang_ride(sys, Vector::Zero(3), policy, 300.0, 0.3);
    const auto open = integrate(sys, Vector::Zero(3), PiecewiseConstant::constant(ubar), 300.0, 0.3);
    ASSERT_EQ(ride.size(), open.size());
    for (std::size_t k = 0; k < ride.size(); ++k) {
        EXPECT_EQ(ride.inputs[k](0), ubar);
        EXPECT_EQ(ride.states[k], open.states[k]);
    }
    const auto profile = engaged_profile(ride, policy.set, 1e-6);
    for (const auto& e : profile) EXPECT_EQ(e, (std::vector<std::size_t>{0}));
}

TEST(SimulateBangRide, InadmissibleStartFailsAtTimeZero) {
    const auto sys = build_ecm(reference_ecm());
    const auto policy =
        BangRidePolicy::create(ConstraintSet({upper_bound_state(0, 1.0, "soc")}), reference_current_bound());
    try {
        (void)simulate_bang_ride(sys, (Vector(2) << 1.5, 0.0).finished(), policy, 10.0, 1.0);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.time(), 0.0);
    }
}

TEST(SimulateBangRide, ReferenceChargeGoesCcThenCvThenSocCapped) {
    const auto ecm = reference_ecm();
    const auto sys = build_thermal_coupled_ecm(ecm, reference_thermal());
    const auto policy = BangRidePolicy::create(reference_constraints(ecm), reference_current_bound());
    const auto traj = simulate_bang_ride(sys, Vector::Zero(3), policy, 600.0, 0.3);
    const auto profile = engaged_profile(traj, policy.set, 1e-6);

    std::vector<std::string> phases;
    for (const auto& e : profile) {
        const auto name = phase_name(policy.set, e);
        if (name != "interior" && (phases.empty() || phases.back() != name)) phases.push_back(name);
    }
    EXPECT_EQ(phases, (std::vector<std::string>{"CC", "CV", "SOC-capped"}));
    EXPECT_GE(max_violation(traj, policy.set).worst, -2e-6);
    EXPECT_NEAR(traj.states.back()(0), 1.0, 1e-6);
}

TEST(SimulateBangRide, RandomisedAdmissibilityAndEngagement) {
    Gen g(2024);
    for (int trial = 0; trial < 15; ++trial) {
        EcmParams ecm = reference_ecm();
        ecm.capacity = g.uniform(1000.0, 5000.0);
        ecm.series_resistance = g.uniform(0.01, 0.08);
        ecm.rc_pairs = {{g.uniform(0.005, 0.03), g.uniform(500.0, 3000.0)}};
        const double ubar = g.uniform(2.0, 8.0) * ecm.capacity / 3600.0;
        const ConstraintSet set({upper_bound_state(0, g.uniform(0.7, 1.0), "soc"),
                                 upper_bound_state(1, g.uniform(0.1, 0.3), "rc"), temperature_limit(g.uniform(3, 10), 2),
                                 upper_bound_input(ubar), voltage_limit(ecm, g.uniform(4.0, 4.4))});
        const auto sys = build_thermal_coupled_ecm(ecm, reference_thermal());
        const auto policy = BangRidePolicy::create(set, ubar);
        const double t_f = 3600.0;
        const auto traj = simulate_bang_ride(sys, Vector::Zero(3), policy, t_f, t_f / 2000.0);
        EXPECT_GE(max_violation(traj, set).worst, -2.0 * set.tol_active()) << "trial " << trial;
        EXPECT_FALSE(find_interior_tail(traj, set, 1e-4).has_value()) << "trial " << trial;
    }
}

TEST(EngagedProfile, EmptySetRejected) {
    Trajectory t;
    t.times = {0.0};
    t.states = {Vector::Zero(1)};
    t.inputs = {Vector::Zero(1)};
    EXPECT_THROW((void)engaged_profile(t, ConstraintSet{}, 1e-6), ParameterError);
}

TEST(PhaseName, Labels) {
    const auto ecm = reference_ecm();
    const auto set = reference_constraints(ecm);
    EXPECT_EQ(phase_name(set, {}), "interior");
    EXPECT_EQ(phase_name(set, {3}), "CC");
    EXPECT_EQ(phase_name(set, {4}), "CV");
    EXPECT_EQ(phase_name(set, {0}), "SOC-capped");
    EXPECT_EQ(phase_name(set, {1}), "state-limited");
    EXPECT_EQ(phase_name(set, {2}), "thermal-limited");
    EXPECT_EQ(phase_name(set, {3, 4}), "CC+CV");
}

TEST(RideInput, DebugBuildsAssertMonotoneFeasibility) {
#ifdef NDEBUG
    GTEST_SKIP() << "the bisection monotonicity assertion is compiled out in release builds";
#else
    const auto sys = build_ecm(reference_ecm());
    Constraint bad = lower_bound_input(0.0);
    const auto policy = BangRidePolicy::create(ConstraintSet({bad, upper_bound_input(0.5)}), 10.0, 0.0, 0.1);
    EXPECT_THROW((void)ride_input(sys, Vector::Zero(2), policy), std::logic_error);
#endif
}
