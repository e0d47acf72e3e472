#include "degstab/nonlinearity.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "degstab/errors.hpp"
#include "degstab/operators.hpp"

namespace degstab {

SourceSpec SourceSpec::power(double q) {
    if (!(q > 0.0)) fail(ErrorCode::InvalidArgument, "power source needs q > 0");
    SourceSpec s;
    s.kind = SourceKind::PowerPointwise;
    s.q = q;
    return s;
}

SourceSpec SourceSpec::nonlocal(double p) {
    if (!(p >= 1.0)) fail(ErrorCode::InvalidArgument, "nonlocal source needs p >= 1");
    SourceSpec s;
    s.kind = SourceKind::NonlocalL2;
    s.p = p;
    return s;
}

std::string SourceSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case SourceKind::None: os << "none"; break;
        case SourceKind::PowerPointwise: os << "power(q=" << q << ")"; break;
        case SourceKind::NonlocalL2: os << "nonlocal(p=" << p << ")"; break;
    }
    return os.str();
}

double c_q(double q) { return q >= 0.5 ? std::pow(2.0, 2.0 * q - 1.0) : 1.0; }

NonlinearityConstants make_constants(const SourceSpec& src, const Grid& grid, const CoefficientProfile& profile) {
    NonlinearityConstants c;
    c.C_HP = hardy_poincare_constant(grid, profile);
    c.a_max = profile.a_max();
    if (src.kind == SourceKind::PowerPointwise) c.C_q = c_q(src.q);
    if (src.kind == SourceKind::NonlocalL2) {
        c.C_q = c_q(src.p / 2.0);
        c.D_p = 2.0 * src.p * src.p * c.C_q * c.C_q * std::pow(c.a_max, src.p - 1.0);
    }
    return c;
}

double l2_norm(const Grid& grid, const Eigen::VectorXd& y) {
    return std::sqrt(trapezoid_weights(grid).dot(y.cwiseAbs2()));
}

Eigen::VectorXd eval_f(const SourceSpec& src, const Eigen::VectorXd& y, const Grid& grid) {
    switch (src.kind) {
        case SourceKind::None: return Eigen::VectorXd::Zero(y.size());
        case SourceKind::PowerPointwise: return y.cwiseAbs().array().pow(src.q).matrix().cwiseProduct(y);
        case SourceKind::NonlocalL2: return std::pow(l2_norm(grid, y), src.p) * y;
    }
    return Eigen::VectorXd::Zero(y.size());
}

double eval_F_functional(const SourceSpec& src, const Eigen::VectorXd& y, const Grid& grid,
                         const Eigen::VectorXd& w) {
    switch (src.kind) {
        case SourceKind::None: return 0.0;
        case SourceKind::PowerPointwise:
            return w.dot(y.cwiseAbs().array().pow(src.q + 2.0).matrix()) / (src.q + 2.0);
        case SourceKind::NonlocalL2:
            return std::pow(l2_norm(grid, y), src.p) * w.dot(y.cwiseAbs2()) / (src.p + 2.0);
    }
    return 0.0;
}

double eval_F_functional(const SourceSpec& src, const Eigen::VectorXd& y, const Grid& grid,
                         const CoefficientProfile& profile, bool weighted) {
    Eigen::VectorXd w = weighted ? inverse_weight_quadrature(grid, profile) : trapezoid_weights(grid);
    return eval_F_functional(src, y, grid, w);
}

double lipschitz_bound(const SourceSpec& src, const NonlinearityConstants& c, double r) {
    const double e = 4.0 * c.C_HP + 1.0;
    switch (src.kind) {
        case SourceKind::None: return 0.0;
        case SourceKind::PowerPointwise: {
            double q1 = src.q + 1.0;
            return std::sqrt((2.0 / 3.0) * q1 * q1 * c.C_q * e) * std::pow(r, src.q);
        }
        case SourceKind::NonlocalL2:
            return std::sqrt(2.0 * c.a_max * std::pow(e, src.p + 1.0) * (std::pow(c.a_max, src.p - 1.0) + 2.0 * c.D_p)) *
                   std::pow(r, src.p);
    }
    return 0.0;
}

namespace {

// h(x) = coef * x^expo
std::pair<double, double> h_shape(const SourceSpec& src, const NonlinearityConstants& c) {
    const double e = 4.0 * c.C_HP + 1.0;
    switch (src.kind) {
        case SourceKind::None: return {0.0, 1.0};
        case SourceKind::PowerPointwise: return {std::pow(2.0 / 3.0, src.q) * e, src.q};
        case SourceKind::NonlocalL2:
            return {std::pow(c.a_max, src.p / 2.0) * std::pow(e, src.p / 2.0 + 1.0), src.p};
    }
    return {0.0, 1.0};
}

}  // namespace

double h_eval(const SourceSpec& src, const NonlinearityConstants& c, double x) {
    auto [coef, expo] = h_shape(src, c);
    return coef * std::pow(x, expo);
}

double h_inverse(const SourceSpec& src, const NonlinearityConstants& c, double y) {
    auto [coef, expo] = h_shape(src, c);
    if (coef == 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(y / coef, 1.0 / expo);
}

double hardy_poincare_constant(const Grid& grid, const CoefficientProfile& profile) {
    const int n = grid.n;
    const double h = grid.h;
    const int m = n - 1;  // unknowns u_1 .. u_{n-1}
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i + 1 < n; ++i) {
        // cell (i, i+1), slope (u_{i+1} - u_i)/h, weight h
        int a = i - 1, b = i;
        if (a >= 0) S(a, a) += 1.0 / h;
        S(b, b) += 1.0 / h;
        if (a >= 0) {
            S(a, b) -= 1.0 / h;
            S(b, a) -= 1.0 / h;
        }
    }
    Eigen::VectorXd w = inverse_weight_quadrature(grid, profile).tail(m);
    Eigen::MatrixXd W = w.asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, W, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) fail(ErrorCode::EigSolveFailure, "Hardy-Poincare eigenproblem did not converge");
    double lmin = es.eigenvalues().minCoeff();
    if (!(lmin > 0.0)) fail(ErrorCode::EigSolveFailure, "slope seminorm is not definite");
    return 1.0 / lmin;
}

double sobolev_pointwise_bound(const Grid& grid, int i, double curvature_norm) {
    double s = 0.0;
    for (int j = 0; j < i; ++j) s += grid.h * std::sqrt(grid.x[j] + 0.5 * grid.h);
    return s * curvature_norm;
}

bool sobolev_pointwise_bound_check(const Grid& grid, const Eigen::VectorXd& u) {
    const double c = beam_curvature_norm(grid, u);
    const double tol = 1e-13 * (u.cwiseAbs().maxCoeff() + 1.0);
    for (int i = 0; i < grid.n; ++i)
        if (std::abs(u[i]) > sobolev_pointwise_bound(grid, i, c) + tol) return false;
    return true;
}

}  // namespace degstab
