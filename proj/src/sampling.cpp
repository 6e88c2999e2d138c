#include "monoride/sampling.hpp"

#include "monoride/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace monoride {

namespace {

constexpr std::array<unsigned, 32> kPrimes{2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,  37,  41,  43,  47,  53,
                                           59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

double radical_inverse(std::size_t index, unsigned base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= base;
    }
    return result;
}

}  // namespace

HaltonSampler::HaltonSampler(const Box& box, std::uint64_t seed) : box_(box) {
    const std::size_t dim = box_.dimension();
    if (dim == 0) {
        throw DimensionError("sampling box is empty");
    }
    if (dim > kPrimes.size()) {
        throw DimensionError("sampling box has more than 32 dimensions");
    }
    for (const auto& iv : box_.states) {
        if (!(iv.lo <= iv.hi)) throw ParameterError("box", "interval lower bound exceeds upper bound");
    }
    for (const auto& iv : box_.inputs) {
        if (!(iv.lo <= iv.hi)) throw ParameterError("box", "interval lower bound exceeds upper bound");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    shift_.resize(dim);
    for (auto& s : shift_) {
        s = unit(rng);
    }
}

void HaltonSampler::point(std::size_t index, Vector& x, Vector& u) const {
    x.resize(static_cast<Eigen::Index>(box_.states.size()));
    u.resize(static_cast<Eigen::Index>(box_.inputs.size()));
    std::size_t d = 0;
    auto coord = [&](const Interval& iv) {
        double r = radical_inverse(index + 1, kPrimes[d]) + shift_[d];
        r -= std::floor(r);
        ++d;
        return iv.lo + r * iv.width();
    };
    for (std::size_t i = 0; i < box_.states.size(); ++i) {
        x(static_cast<Eigen::Index>(i)) = coord(box_.states[i]);
    }
    for (std::size_t i = 0; i < box_.inputs.size(); ++i) {
        u(static_cast<Eigen::Index>(i)) = coord(box_.inputs[i]);
    }
}

double fd_step_for(double v, double relative_step) noexcept {
    return relative_step * std::max(1.0, std::abs(v));
}

}  // namespace monoride
