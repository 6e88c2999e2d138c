#pragma once

// Hand-rolled random generators for the property tests. Everything is driven by
// an explicit seed so a failing case can be replayed.

#include "monoride/dynamics.hpp"
#include "monoride/simulate.hpp"

#include <random>
#include <vector>

namespace monoride::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    bool coin() { return uniform(0.0, 1.0) < 0.5; }

    Vector vector(std::size_t n, double lo, double hi) {
        Vector v(static_cast<Eigen::Index>(n));
        for (auto& e : v) e = uniform(lo, hi);
        return v;
    }

    /// Returns y >= x componentwise, with some components left equal.
    Vector above(const Vector& x, double max_gap) {
        Vector y = x;
        for (auto& e : y) {
            if (!coin()) e += uniform(0.0, max_gap);
        }
        return y;
    }

    /// Diagonal in [-2, -0.1], off-diagonal in [0, 0.5] (with some zeros).
    Matrix metzler(std::size_t n) {
        Matrix A(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                A(i, j) = i == j ? uniform(-2.0, -0.1) : (coin() ? uniform(0.0, 0.5) : 0.0);
            }
        }
        return A;
    }

    Matrix nonneg(std::size_t n, std::size_t m) {
        Matrix B(n, m);
        for (auto& e : B.reshaped()) e = uniform(0.0, 1.0);
        return B;
    }

    /// Two input profiles on the same switch times with u_a <= u_b everywhere.
    std::pair<PiecewiseConstant, PiecewiseConstant> ordered_inputs(double t_f, double lo, double hi,
                                                                   std::size_t pieces) {
        std::vector<double> starts{0.0};
        for (std::size_t i = 1; i < pieces; ++i) starts.push_back(t_f * static_cast<double>(i) / pieces);
        std::vector<Vector> a, b;
        for (std::size_t i = 0; i < pieces; ++i) {
            const double ua = uniform(lo, hi);
            a.push_back(Vector::Constant(1, ua));
            b.push_back(Vector::Constant(1, coin() ? ua : uniform(ua, hi)));
        }
        return {PiecewiseConstant(starts, a), PiecewiseConstant(starts, b)};
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace monoride::testing
