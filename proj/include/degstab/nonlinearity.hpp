#pragma once

#include <limits>
#include <string>

#include <Eigen/Dense>

#include "degstab/degeneracy.hpp"
#include "degstab/grid.hpp"

namespace degstab {

enum class SourceKind { None, PowerPointwise, NonlocalL2 };

/// f(y) = |y|^q y (PowerPointwise) or ||y||_{L2}^p y (NonlocalL2).
struct SourceSpec {
    SourceKind kind = SourceKind::None;
    double q = 1.0;
    double p = 1.0;

    static SourceSpec none() { return {}; }
    static SourceSpec power(double q);
    static SourceSpec nonlocal(double p);
    std::string describe() const;
};

struct NonlinearityConstants {
    double C_q = 1.0;   // C_q for the power source, C_{p/2} for the nonlocal one
    double D_p = 0.0;
    double C_HP = 0.0;
    double a_max = 0.0;
};

double c_q(double q);

NonlinearityConstants make_constants(const SourceSpec& src, const Grid& grid, const CoefficientProfile& profile);

/// Unweighted L2 norm by the trapezoid rule.
double l2_norm(const Grid& grid, const Eigen::VectorXd& y);

Eigen::VectorXd eval_f(const SourceSpec& src, const Eigen::VectorXd& y, const Grid& grid);

/// int F(y)/a (weighted) or int F(y). For the nonlocal source F is taken along the ray s*y:
/// F = ||y||^p <y, y> / (p + 2) with the matching pairing.
double eval_F_functional(const SourceSpec& src, const Eigen::VectorXd& y, const Grid& grid,
                         const CoefficientProfile& profile, bool weighted);

/// Same functional with caller-supplied quadrature weights (the generator's mass on the full grid).
double eval_F_functional(const SourceSpec& src, const Eigen::VectorXd& y, const Grid& grid,
                         const Eigen::VectorXd& weights);

/// L(r) for the non-divergence beam.
double lipschitz_bound(const SourceSpec& src, const NonlinearityConstants& c, double r);

double h_eval(const SourceSpec& src, const NonlinearityConstants& c, double x);
/// +inf for SourceKind::None.
double h_inverse(const SourceSpec& src, const NonlinearityConstants& c, double y);

/// Largest C with int u^2/a <= C int (u')^2 over grid functions with u(0) = 0.
double hardy_poincare_constant(const Grid& grid, const CoefficientProfile& profile);

/// Discrete form of |u(x)| <= (2/3) x^{3/2} ||u''||: the right side uses the midpoint sum
/// sum_{j<i} h sqrt(x_{j+1/2}), which exceeds (2/3) x_i^{3/2} by the quadrature error only.
double sobolev_pointwise_bound(const Grid& grid, int i, double curvature_norm);
bool sobolev_pointwise_bound_check(const Grid& grid, const Eigen::VectorXd& u);

}  // namespace degstab
