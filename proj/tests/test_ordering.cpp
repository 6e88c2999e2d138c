#include "monoride/errors.hpp"
#include "monoride/ordering.hpp"

#include "support/fixtures.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

using namespace monoride;
using namespace monoride::testing;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

/// xdot1 = -u, xdot2 = u: ordered inputs give unordered trajectories.
ControlSystem anti_monotone_toy() {
    Matrix A = Matrix::Zero(2, 2);
    Matrix B(2, 1);
    B << -1.0, 1.0;
    return ControlSystem::linear(A, B);
}

}  // namespace

TEST(VecCompare, Definitions) {
    EXPECT_EQ(vec_compare(v2(1, 2), v2(1, 3)).order, Order::kLess);
    EXPECT_EQ(vec_compare(v2(1, 2), v2(2, 3)).order, Order::kStrictlyLess);
    EXPECT_EQ(vec_compare(v2(1, 3), v2(2, 2)).order, Order::kIncomparable);
    EXPECT_EQ(vec_compare(v2(1, 3), v2(1, 3)).order, Order::kEqual);
    EXPECT_EQ(vec_compare(v2(2, 3), v2(1, 2)).order, Order::kStrictlyGreater);
    EXPECT_EQ(vec_compare(v2(1, 3), v2(1, 2)).order, Order::kGreater);
    EXPECT_EQ(vec_compare(v2(1, 3), v2(2, 2)).bits, (std::vector<int>{-1, 1}));
    EXPECT_THROW((void)vec_compare(v2(1, 2), Vector::Zero(3)), DimensionError);
}

TEST(VecCompare, IsAPartialOrder) {
    Gen g(3);
    for (int i = 0; i < 500; ++i) {
        // Small integer grids make equal components and comparable pairs common.
        auto draw = [&] {
            Vector v(3);
            for (auto& e : v) e = static_cast<double>(g.index(3));
            return v;
        };
        const Vector x = draw(), y = draw(), z = draw();
        EXPECT_EQ(vec_compare(x, x).order, Order::kEqual);
        const auto xy = vec_compare(x, y);
        const auto yx = vec_compare(y, x);
        EXPECT_EQ(xy.leq(), yx.geq());
        if (xy.leq() && yx.leq()) EXPECT_EQ(x, y);
        if (xy.leq() && vec_compare(y, z).leq()) EXPECT_TRUE(vec_compare(x, z).leq());
        if (xy.order == Order::kStrictlyLess) EXPECT_TRUE(xy.leq());
    }
}

TEST(Metzler, Examples) {
    Matrix a(2, 2);
    a << 0, 0, 0, -0.1;
    EXPECT_TRUE(is_metzler(a));
    Matrix b(2, 2);
    b << -1, -1e-3, 0, -1;
    const auto r = is_metzler(b, 0.0);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(*r.first_violation, std::make_pair(std::size_t{0}, std::size_t{1}));
    EXPECT_TRUE(is_metzler(b, 1e-2));
    EXPECT_TRUE(is_metzler(build_fd_spm(fd_fixture(2)).system.linear_part()->A));
    EXPECT_THROW((void)is_metzler(Matrix::Zero(2, 3)), DimensionError);
}

TEST(Nonneg, Examples) {
    EXPECT_TRUE(is_nonneg(build_ecm(reference_ecm()).linear_part()->B));
    EXPECT_TRUE(is_nonneg(Matrix::Zero(3, 2)));
    const auto r = is_nonneg(build_pade_spm_untransformed(pade_fixture()).system.linear_part()->B);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(*r.first_violation, std::make_pair(std::size_t{0}, std::size_t{0}));
}

TEST(KamkeMuller, LinearStructuralMatchesSampled) {
    const auto sys = build_ecm(reference_ecm());
    const Box box = uniform_box(2, {0, 1}, 1, {0, 10});
    const auto structural = check_kamke_muller(sys, box);
    KamkeMullerOptions o;
    o.use_structure = false;
    const auto sampled = check_kamke_muller(sys, box, o);
    EXPECT_EQ(structural.verdict, Verdict::kMonotone);
    EXPECT_EQ(structural.method, "structural");
    EXPECT_EQ(sampled.verdict, Verdict::kMonotone);
    EXPECT_EQ(sampled.method, "sampled");
    EXPECT_EQ(sampled.samples_used, 512u);
}

TEST(KamkeMuller, ThermalFlipsWithTheInputSign) {
    const auto sys = build_thermal_coupled_ecm(reference_ecm(), reference_thermal());
    const auto neg = check_kamke_muller(sys, uniform_box(3, {0, 1}, 1, {-10, 10}));
    ASSERT_EQ(neg.verdict, Verdict::kNonMonotone);
    ASSERT_FALSE(neg.witnesses.empty());
    for (const auto& w : neg.witnesses) {
        EXPECT_LT(w.u(0), 0.0);
        EXPECT_LT(w.estimate, 0.0);
        EXPECT_EQ(w.row, 2u);  // only the temperature equation can break the sign conditions
    }
    const auto pos = check_kamke_muller(sys, uniform_box(3, {0, 1}, 1, {0, 10}));
    EXPECT_EQ(pos.verdict, Verdict::kMonotone);
    EXPECT_TRUE(pos.witnesses.empty());
}

TEST(KamkeMuller, WitnessDerivativeMatchesAnalyticValue) {
    // d(Tdot)/d(x_rc) = u / (m Cp).
    const auto sys = build_thermal_coupled_ecm(reference_ecm(), reference_thermal());
    const auto rep = check_kamke_muller(sys, uniform_box(3, {0, 1}, 1, {-10, -1}));
    ASSERT_EQ(rep.verdict, Verdict::kNonMonotone);
    bool saw_state = false;
    for (const auto& w : rep.witnesses) {
        if (!w.wrt_input && w.col == 1) {
            saw_state = true;
            EXPECT_NEAR(w.estimate, w.u(0) / 70.0, 1e-6);
        }
    }
    EXPECT_TRUE(saw_state);
}

TEST(KamkeMuller, RejectsMismatchedBox) {
    const auto sys = build_ecm(reference_ecm());
    EXPECT_THROW((void)check_kamke_muller(sys, uniform_box(3, {0, 1}, 1, {0, 1})), DimensionError);
}

TEST(KamkeMuller, RandomLinearSystemsAgreeWithStructure) {
    Gen g(21);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + g.index(4);
        Matrix A = g.metzler(n);
        Matrix B = g.nonneg(n, 1);
        if (trial % 2 == 1) {
            if (g.coin()) {
                const auto i = g.index(n);
                A(i, (i + 1) % n) = -g.uniform(0.01, 0.5);
            } else {
                B(g.index(n), 0) = -g.uniform(0.01, 0.5);
            }
        }
        const auto sys = ControlSystem::linear(A, B);
        const bool structural = is_metzler(A).ok && is_nonneg(B).ok;
        KamkeMullerOptions o;
        o.use_structure = false;
        o.n_samples = 64;
        const auto sampled = check_kamke_muller(sys, uniform_box(n, {-1, 1}, 1, {-1, 1}), o);
        EXPECT_EQ(sampled.verdict == Verdict::kMonotone, structural) << "trial " << trial;
        EXPECT_EQ(sampled.verdict == Verdict::kNonMonotone, !sampled.witnesses.empty());
    }
}

TEST(CostMonotone, ClassesBehaveAsDeclared) {
    const Box box = uniform_box(3, {0, 1}, 1, {0, 10});
    EXPECT_EQ(check_cost_monotone(RunningCost::soc_rate(3300.0), box).verdict, Verdict::kMonotone);
    EXPECT_EQ(check_cost_monotone(RunningCost::soc_integral(), box).verdict, Verdict::kMonotone);
    const auto bad = check_cost_monotone(RunningCost::temperature_penalized(0, 2), box);
    EXPECT_EQ(bad.verdict, Verdict::kNonMonotone);
    ASSERT_FALSE(bad.witnesses.empty());
    EXPECT_EQ(bad.witnesses.front().col, 2u);
}

TEST(Excitability, Examples) {
    const auto pade = build_pade_spm(pade_fixture()).system;
    const auto box3 = uniform_box(3, {0, 1}, 1, {0, 1});
    const auto p = check_excitability(pade, box3);
    EXPECT_TRUE(p.excitable);
    EXPECT_EQ(p.method, "graph-test");

    Matrix A = Matrix::Zero(2, 2);
    A(1, 1) = -0.1;
    Matrix B(2, 1);
    B << 1.0 / 3300.0, 0.0;
    const auto e = check_excitability(ControlSystem::linear(A, B), uniform_box(2, {0, 1}, 1, {0, 1}));
    EXPECT_FALSE(e.excitable);
    ASSERT_EQ(e.unreachable.size(), 1u);
    EXPECT_EQ(e.unreachable.front(), std::make_pair(std::size_t{0}, std::size_t{1}));

    const auto fd = build_fd_spm(fd_fixture(8)).system;
    EXPECT_TRUE(check_excitability(fd, uniform_box(8, {0, 1}, 1, {0, 1})).excitable);

    const auto th = build_thermal_coupled_ecm(reference_ecm(), reference_thermal());
    EXPECT_TRUE(check_excitability(th, uniform_box(3, {0, 1}, 1, {0, 10})).excitable);
}

TEST(OrderTest, Examples) {
    const auto ecm = build_ecm(reference_ecm());
    const double ubar = reference_current_bound();
    const auto half = PiecewiseConstant::constant(0.5 * ubar);
    const auto full = PiecewiseConstant::constant(ubar);
    const auto r = trajectory_order_test(ecm, Vector::Zero(2), Vector::Zero(2), half, full, 600.0, 0.3);
    EXPECT_TRUE(r.ordered);
    EXPECT_FALSE(r.first_violation_time.has_value());

    const auto same = trajectory_order_test(ecm, Vector::Zero(2), Vector::Zero(2), full, full, 60.0, 0.3);
    EXPECT_TRUE(same.ordered);
    EXPECT_EQ(same.min_margin, 0.0);

    const auto toy = anti_monotone_toy();
    const auto bad = trajectory_order_test(toy, Vector::Zero(2), Vector::Zero(2), PiecewiseConstant::constant(0.0),
                                           PiecewiseConstant::constant(1.0), 1.0, 0.1);
    EXPECT_FALSE(bad.ordered);
    ASSERT_TRUE(bad.first_violation_time.has_value());
    EXPECT_NEAR(*bad.first_violation_time, 0.1, 1e-12);
}

TEST(OrderTest, UnorderedArgumentsAreCallerErrors) {
    const auto ecm = build_ecm(reference_ecm());
    EXPECT_THROW((void)trajectory_order_test(ecm, Vector::Ones(2), Vector::Zero(2), PiecewiseConstant::constant(1.0),
                                             PiecewiseConstant::constant(1.0), 1.0, 0.1),
                 PreconditionError);
    EXPECT_THROW((void)trajectory_order_test(ecm, Vector::Zero(2), Vector::Zero(2), PiecewiseConstant::constant(2.0),
                                             PiecewiseConstant::constant(1.0), 1.0, 0.1),
                 PreconditionError);
}

TEST(OrderTest, CertifiedSystemsKeepRandomPairsOrdered) {
    Gen g(99);
    struct Case {
        ControlSystem sys;
        double t_f, dt, u_hi;
    };
    const std::vector<Case> cases{
        {build_ecm(reference_ecm()), 300.0, 0.5, 10.0},
        {build_pade_spm(pade_fixture()).system, 60.0, 0.1, 10.0},
        {build_fd_spm(fd_fixture(8)).system, 200.0, 0.5, 10.0},
        {build_thermal_coupled_ecm(reference_ecm(), reference_thermal()), 300.0, 0.5, 10.0},
    };
    for (const auto& c : cases) {
        const auto n = c.sys.n_states();
        ASSERT_EQ(check_kamke_muller(c.sys, uniform_box(n, {0, 1}, 1, {0, c.u_hi})).verdict, Verdict::kMonotone);
        for (int pair = 0; pair < 10; ++pair) {
            const Vector xa = g.vector(n, 0.0, 0.5);
            const Vector xb = g.above(xa, 0.2);
            const auto [ua, ub] = g.ordered_inputs(c.t_f, 0.0, c.u_hi, 4);
            const auto r = trajectory_order_test(c.sys, xa, xb, ua, ub, c.t_f, c.dt);
            EXPECT_TRUE(r.ordered) << "margin " << r.min_margin;
            EXPECT_GE(r.min_margin, -1e-8);
        }
    }
}
