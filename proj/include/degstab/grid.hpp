#pragma once

#include <Eigen/Dense>

namespace degstab {

/// Uniform nodes x_0 = 0 < ... < x_{n-1} = 1.
struct Grid {
    int n = 0;
    double h = 0.0;
    Eigen::VectorXd x;

    static Grid uniform(int n);
};

/// Trapezoid weights for unweighted integrals over [0,1].
Eigen::VectorXd trapezoid_weights(const Grid& grid);

}  // namespace degstab
