#include "monoride/constraints.hpp"
#include "monoride/errors.hpp"

#include "support/fixtures.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace monoride;
using namespace monoride::testing;

namespace {

Vector u1(double u) { return Vector::Constant(1, u); }

PlatingTable synthetic_table() { return PlatingTable({0.0, 0.5, 1.0}, {3.0, 2.0, 0.0}); }

/// Surface concentration read straight from x_1.
OutputMap first_state() {
    return [](const Vector& x, const Vector&) { return x(0); };
}

}  // namespace

TEST(StateBound, Residuals) {
    const auto c = upper_bound_state(0, 1.0);
    EXPECT_EQ(c.name, "x1_upper");
    EXPECT_FALSE(c.depends_on_u);
    EXPECT_DOUBLE_EQ(c((Vector(2) << 0.4, 0.0).finished(), u1(0)), 0.6);
    EXPECT_DOUBLE_EQ(c((Vector(2) << 1.0, 0.0).finished(), u1(0)), 0.0);
    EXPECT_NEAR(c((Vector(2) << 1.2, 0.0).finished(), u1(0)), -0.2, 1e-15);
}

TEST(InputBound, Residuals) {
    const auto c = upper_bound_input(5.0);
    EXPECT_TRUE(c.depends_on_u);
    EXPECT_TRUE(c.declared_nonincreasing_in_u);
    EXPECT_DOUBLE_EQ(c(Vector::Zero(1), u1(0)), 5.0);
    EXPECT_DOUBLE_EQ(c(Vector::Zero(1), u1(5)), 0.0);
    EXPECT_DOUBLE_EQ(c(Vector::Zero(1), u1(6)), -1.0);
}

TEST(Voltage, Residuals) {
    EcmParams p = reference_ecm();
    p.series_resistance = 0.01;
    const auto c = voltage_limit(p, 4.5);
    EXPECT_NEAR(c((Vector(2) << 0.5, 0.1).finished(), u1(10)), 0.7, 1e-14);
    // U + sum x = 4.4 (x1 = 1, x2 = 0.2): the limit is reached exactly at u = 10.
    EXPECT_NEAR(c((Vector(2) << 1.0, 0.2).finished(), u1(10)), 0.0, 1e-14);
    EXPECT_TRUE(c.depends_on_u);
}

TEST(Voltage, IgnoresTrailingTemperatureState) {
    const auto c = voltage_limit(reference_ecm(), 4.5);
    const Vector x = (Vector(3) << 0.5, 0.1, 7.0).finished();
    EXPECT_NEAR(c(x, u1(1)), 4.5 - (3.6 + 0.1 + 0.05), 1e-14);
    EXPECT_THROW((void)c(Vector::Zero(1), u1(0)), DimensionError);
}

TEST(Temperature, Residuals) {
    const auto c = temperature_limit(8.0, 2);
    EXPECT_DOUBLE_EQ(c(Vector::Zero(3), u1(0)), 8.0);
    EXPECT_DOUBLE_EQ(c((Vector(3) << 0, 0, 8).finished(), u1(0)), 0.0);
    EXPECT_DOUBLE_EQ(c((Vector(3) << 0, 0, 10).finished(), u1(0)), -2.0);
}

TEST(Plating, SyntheticTableArithmetic) {
    const auto c = plating_constraint(synthetic_table(), first_state());
    EXPECT_NEAR(c(u1(0.5), u1(1.5)), 0.5, 1e-15);
    EXPECT_NEAR(c(u1(0.5), u1(2.0)), 0.0, 1e-15);
    EXPECT_NEAR(c(u1(1.0), u1(0.1)), -0.1, 1e-15);
    EXPECT_NEAR(c(u1(0.25), u1(0.0)), 2.5, 1e-15);
}

TEST(Plating, OutOfRangeConcentrationIsClampedAndCounted) {
    const auto table = synthetic_table();
    EXPECT_EQ(table.clamp_count(), 0u);
    EXPECT_DOUBLE_EQ(table.boundary(-1.0), 3.0);
    EXPECT_DOUBLE_EQ(table.boundary(2.0), 0.0);
    EXPECT_EQ(table.clamp_count(), 2u);
    EXPECT_DOUBLE_EQ(table.boundary(0.75), 1.0);
    EXPECT_EQ(table.clamp_count(), 2u);
}

TEST(Plating, TableValidation) {
    EXPECT_THROW(PlatingTable({0.0, 0.0}, {1.0, 1.0}), ParameterError);
    EXPECT_THROW(PlatingTable({0.0, 1.0}, {1.0, 2.0}), ParameterError);
    EXPECT_THROW(PlatingTable({0.0}, {1.0}), ParameterError);
    EXPECT_THROW(PlatingTable({0.0, 1.0}, {1.0}), ParameterError);
}

TEST(Plating, CsvParsing) {
    std::istringstream ok("concentration,max_current\n0,3\n0.5,2\r\n1,0\n");
    const auto t = PlatingTable::from_csv(ok);
    EXPECT_EQ(t.concentration(), (std::vector<double>{0.0, 0.5, 1.0}));
    EXPECT_EQ(t.max_current(), (std::vector<double>{3.0, 2.0, 0.0}));
    std::istringstream bad_header("c,i\n0,1\n1,0\n");
    EXPECT_THROW((void)PlatingTable::from_csv(bad_header), FormatError);
    std::istringstream bad_row("concentration,max_current\n0,abc\n");
    EXPECT_THROW((void)PlatingTable::from_csv(bad_row), FormatError);
    EXPECT_NO_THROW((void)PlatingTable::from_csv_file(data_path("plating_table.csv")));
}

TEST(Plating, ResidualNonIncreasingInInputForMonotoneSurface) {
    Gen g(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> conc{0.0}, cur{g.uniform(2.0, 5.0)};
        for (int k = 0; k < 4; ++k) {
            conc.push_back(conc.back() + g.uniform(0.05, 0.5));
            cur.push_back(cur.back() - g.uniform(0.0, 1.0));
        }
        const double gain = g.uniform(0.0, 0.2);
        OutputMap surf = [gain](const Vector& x, const Vector& u) { return x(0) + gain * u(0); };
        const auto c = plating_constraint(PlatingTable(conc, cur), surf);
        const Vector x = g.vector(1, 0.0, 2.0);
        const double ua = g.uniform(0.0, 5.0);
        const double ub = ua + g.uniform(0.0, 2.0);
        EXPECT_GE(c(x, u1(ua)), c(x, u1(ub)) - 1e-12);
    }
}

TEST(ConstraintSet, IndexStabilityAndNames) {
    const ConstraintSet set({upper_bound_state(0, 1.0, "soc"), upper_bound_input(2.0), temperature_limit(8, 1)});
    EXPECT_EQ(set.size(), 3u);
    EXPECT_EQ(*set.index_of("soc"), 0u);
    EXPECT_EQ(*set.index_of("input_bound"), 1u);
    EXPECT_EQ(*set.index_of("temperature"), 2u);
    EXPECT_FALSE(set.index_of("nope").has_value());
    const Vector r = eval_constraints(set, (Vector(2) << 0.25, 3.0).finished(), u1(0.5));
    ASSERT_EQ(r.size(), 3);
    EXPECT_DOUBLE_EQ(r(0), 0.75);
    EXPECT_DOUBLE_EQ(r(1), 1.5);
    EXPECT_DOUBLE_EQ(r(2), 5.0);
    for (std::size_t k = 0; k < set.size(); ++k) EXPECT_EQ(*set.index_of(set[k].name), k);
}

TEST(ConstraintSet, RejectsDuplicatesAndBadTolerances) {
    ConstraintSet set;
    set.add(upper_bound_input(1.0));
    EXPECT_THROW(set.add(upper_bound_input(2.0)), ParameterError);
    EXPECT_THROW(ConstraintSet({}, -1.0), ParameterError);
    auto c = upper_bound_state(0, 1.0);
    c.name.clear();
    EXPECT_THROW(set.add(c), ParameterError);
}

namespace {

/// Three constraints whose residuals at (x, u) equal x itself.
ConstraintSet residual_echo() {
    std::vector<Constraint> cs;
    for (std::size_t k = 0; k < 3; ++k) {
        Constraint c;
        c.name = "r" + std::to_string(k + 1);
        c.eval = [k](const Vector& x, const Vector&) { return x(static_cast<Eigen::Index>(k)); };
        cs.push_back(c);
    }
    return ConstraintSet(std::move(cs));
}

}  // namespace

TEST(Admissibility, ToleranceIsInclusive) {
    const auto set = residual_echo();
    const double tol = 1e-6;
    EXPECT_TRUE(is_admissible(set, (Vector(3) << 1, 2, 3).finished(), u1(0), tol));
    EXPECT_FALSE(is_admissible(set, (Vector(3) << 1, -2 * tol, 3).finished(), u1(0), tol));
    EXPECT_TRUE(is_admissible(set, (Vector(3) << 1, -tol, 3).finished(), u1(0), tol));
}

TEST(ActiveSet, Examples) {
    const auto set = residual_echo();
    EXPECT_EQ(active_set(set, (Vector(3) << 0.5, 1e-9, -1e-9).finished(), u1(0), 1e-6),
              (std::vector<std::size_t>{1, 2}));
    EXPECT_TRUE(active_set(set, (Vector(3) << 1, 2, 3).finished(), u1(0), 1e-6).empty());
    EXPECT_EQ(active_set(set, (Vector(3) << 0, 2, 3).finished(), u1(0), 0.0), (std::vector<std::size_t>{0}));
}

TEST(ActiveSet, PerConstraintOverride) {
    std::vector<Constraint> cs{upper_bound_state(0, 1.0), upper_bound_state(1, 1.0)};
    cs[1].tol_active = 0.1;
    const ConstraintSet set(cs, 1e-6);
    EXPECT_EQ(active_set(set, (Vector(2) << 0.95, 0.95).finished(), u1(0)), (std::vector<std::size_t>{1}));
    EXPECT_DOUBLE_EQ(set.active_tolerance(0), 1e-6);
    EXPECT_DOUBLE_EQ(set.active_tolerance(1), 0.1);
}

TEST(InputMonotonicity, ShippedConstructorsPass) {
    const auto ecm = reference_ecm();
    const ConstraintSet set({upper_bound_input(10.0), voltage_limit(ecm, 4.5), upper_bound_state(0, 1.0),
                             temperature_limit(8.0, 2)});
    const auto reports = verify_nonincreasing_in_u(set, uniform_box(3, {0, 1}, 1, {0, 10}));
    ASSERT_EQ(reports.size(), 4u);
    for (const auto& r : reports) EXPECT_TRUE(r.passed) << r.name;
    EXPECT_NEAR(reports[0].max_estimate, -1.0, 1e-6);
    EXPECT_NEAR(reports[1].max_estimate, -0.05, 1e-6);
}

TEST(InputMonotonicity, PlatingPasses) {
    const auto fd = build_fd_spm(fd_fixture(4));
    const ConstraintSet set({plating_constraint(synthetic_table(), fd.surface_output)});
    const auto r = verify_nonincreasing_in_u(set, uniform_box(4, {0, 1}, 1, {0, 2}));
    EXPECT_TRUE(r.front().passed);
}

TEST(InputMonotonicity, LowerBoundFails) {
    const ConstraintSet set({lower_bound_input(0.0)});
    const auto r = verify_nonincreasing_in_u(set, uniform_box(1, {0, 1}, 1, {0, 10}));
    ASSERT_FALSE(r.front().passed);
    ASSERT_TRUE(r.front().witness.has_value());
    EXPECT_NEAR(r.front().witness->estimate, 1.0, 1e-6);
}
