#include "degstab/grid.hpp"

#include "degstab/errors.hpp"

namespace degstab {

Grid Grid::uniform(int n) {
    if (n < 5) fail(ErrorCode::GridTooCoarse, "grid needs at least 3 interior points, got n=" + std::to_string(n));
    Grid g;
    g.n = n;
    g.h = 1.0 / (n - 1);
    g.x.resize(n);
    for (int i = 0; i < n; ++i) g.x[i] = static_cast<double>(i) / (n - 1);
    g.x[n - 1] = 1.0;
    return g;
}

Eigen::VectorXd trapezoid_weights(const Grid& grid) {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(grid.n, grid.h);
    w[0] = 0.5 * grid.h;
    w[grid.n - 1] = 0.5 * grid.h;
    return w;
}

}  // namespace degstab
