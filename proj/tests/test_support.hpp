#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "degstab/delay.hpp"
#include "degstab/operators.hpp"

namespace degstab::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Mixture of a smooth random polynomial and white noise on the free nodes. The noise weight is
// itself random so both smooth and rough samples occur.
inline Eigen::VectorXd random_free(const DiscreteGenerator& gen, Rng& rng) {
    const int m = gen.m();
    Eigen::VectorXd out(m);
    double c[4];
    for (double& ci : c) ci = uniform(rng, -1.0, 1.0);
    const double noise = uniform(rng, 0.0, 1.0) < 0.3 ? 0.0 : uniform(rng, 0.0, 1.0);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int k = 0; k < m; ++k) {
        const double x = gen.grid.x[gen.free_nodes[k]];
        out[k] = c[0] * x * x + c[1] * x * x * x + c[2] * std::sin(3.0 * x) * x + c[3] * x * x * x * x +
                 noise * nd(rng);
    }
    return out;
}

inline Eigen::VectorXd random_state(const DiscreteGenerator& gen, Rng& rng) {
    const int m = gen.m();
    Eigen::VectorXd Y(2 * m);
    Y.head(m) = random_free(gen, rng);
    Y.tail(m) = random_free(gen, rng);
    return Y * std::pow(10.0, uniform(rng, -3.0, 3.0));
}

// int_a^b |k| by Gauss-Kronrod on pieces split at the kernel's jump times, which are read off
// the kernel parameters here rather than taken from the library.
inline double numeric_abs_integral(const KernelSpec& k, double a, double b) {
    a = std::max(a, 0.0);
    if (b <= a) return 0.0;
    std::vector<double> cuts{a, b};
    if (k.kind == KernelKind::L1Pulse) cuts.push_back(k.support);
    if (k.kind == KernelKind::Tabulated)
        for (const auto& st : k.steps) cuts.push_back(st.first);
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        double lo = std::max(a, cuts[i]), hi = std::min(b, cuts[i + 1]);
        if (hi <= lo) continue;
        // Kronrod nodes are interior, so the value at a jump never enters
        auto f = [&](double t) { return std::abs(k.value(t)); };
        s += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 8, 1e-14);
    }
    return s;
}

}  // namespace degstab::testing
