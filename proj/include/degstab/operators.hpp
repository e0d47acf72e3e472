#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "degstab/degeneracy.hpp"
#include "degstab/grid.hpp"

namespace degstab {

enum class OperatorKind { BeamNonDiv, BeamDiv, WaveNonDiv, WaveDiv };

/// Condition imposed at x = 0. Auto picks the one matching the operator kind and coefficient class.
enum class OriginCondition { Auto, Clamped, Dirichlet, Natural };

const char* kind_name(OperatorKind k);
OperatorKind parse_kind(const std::string& s);
const char* origin_name(OriginCondition c);
OriginCondition parse_origin(const std::string& s);

inline bool is_beam(OperatorKind k) { return k == OperatorKind::BeamNonDiv || k == OperatorKind::BeamDiv; }
inline bool is_divergence(OperatorKind k) { return k == OperatorKind::BeamDiv || k == OperatorKind::WaveDiv; }

struct BoundaryParams {
    double beta = 0.0;
    double gamma = 0.0;  // unused for wave kinds
};

/// First-order system Y' = S Y for Y = (u, v) on the free nodes.
///
/// The discrete energy is 1/2 (u' K u + v' M v) with K = elastic + boundary, and
///   M v' = -K u - R v
/// where R holds the boundary damping. In the state inner product <Y,Z> = u'K u~ + v'M v~
/// this gives <S Y, Y> = -v' R v exactly.
struct DiscreteGenerator {
    OperatorKind kind = OperatorKind::BeamNonDiv;
    OriginCondition origin = OriginCondition::Clamped;
    Grid grid;
    CoefficientProfile profile;
    BoundaryParams bc;

    std::vector<int> free_nodes;      // grid index of each unknown
    Eigen::VectorXd mass;             // diagonal of M
    Eigen::MatrixXd elastic;          // seminorm form
    Eigen::MatrixXd boundary;         // beta/gamma trace springs
    Eigen::MatrixXd damping;          // R
    Eigen::MatrixXd stiffness;        // M^{-1}(elastic + boundary): the discrete operator
    Eigen::MatrixXd system_matrix;    // [0, I; -stiffness, -M^{-1} R]
    Eigen::RowVectorXd trace_value;   // u(1)
    Eigen::RowVectorXd trace_slope;   // u'(1), second-order one-sided

    int m() const { return static_cast<int>(free_nodes.size()); }
    int dim() const { return 2 * m(); }

    Eigen::VectorXd expand(const Eigen::VectorXd& free_values) const;
    Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& grid_values) const;
    Eigen::VectorXd pack(const Eigen::VectorXd& u_grid, const Eigen::VectorXd& v_grid) const;
    Eigen::VectorXd displacement(const Eigen::VectorXd& Y) const { return expand(Y.head(m())); }
    Eigen::VectorXd velocity(const Eigen::VectorXd& Y) const { return expand(Y.tail(m())); }

    /// Gram matrix of the state inner product.
    Eigen::MatrixXd gram() const;
};

inline constexpr int kMinGridNodes = 8;

DiscreteGenerator assemble(OperatorKind kind, const CoefficientProfile& profile, const BoundaryParams& bc,
                           const Grid& grid, OriginCondition origin = OriginCondition::Auto);

/// Quadrature weights for integrals of g/a: dual-cell widths over a at the dual-cell midpoint.
Eigen::VectorXd inverse_weight_quadrature(const Grid& grid, const CoefficientProfile& profile);

double state_inner(const DiscreteGenerator& gen, const Eigen::VectorXd& Y, const Eigen::VectorXd& Z);
double weighted_norm(const DiscreteGenerator& gen, const Eigen::VectorXd& Y);

/// Elastic seminorm of a displacement given on the free nodes.
double seminorm(const DiscreteGenerator& gen, const Eigen::VectorXd& u_free);

/// <S Y, Y> in the state inner product.
double dissipation_form(const DiscreteGenerator& gen, const Eigen::VectorXd& Y);

/// Boundary damping rate v' R v (the discrete y_t(1)^2 + y_tx(1)^2 and its wave analogues).
double boundary_dissipation(const DiscreteGenerator& gen, const Eigen::VectorXd& v_free);

/// Continuous Green identity defect for grid functions u, v, with finite-difference derivatives
/// and trapezoid integrals. Second-order accurate for smooth u, v satisfying the x=0 conditions.
double gauss_green_residual(const DiscreteGenerator& gen, const Eigen::VectorXd& u_grid, const Eigen::VectorXd& v_grid);

/// |<A u, v>_M - (a_h(u, v) + boundary springs)| with a_h summed from stencil values,
/// i.e. how far the assembled matrix is from the summation-by-parts form.
double discrete_green_defect(const DiscreteGenerator& gen, const Eigen::VectorXd& u_free, const Eigen::VectorXd& v_free);

/// ||u''|| for a clamped grid function (u(0) = u'(0) = 0), same quadrature as the beam generators.
double beam_curvature_norm(const Grid& grid, const Eigen::VectorXd& u_grid);

double spectral_abscissa(const Eigen::MatrixXd& A);

/// Finite-difference weights for the k-th derivative at z from nodes xs (Fornberg).
std::vector<double> fd_weights(double z, const std::vector<double>& xs, int k);

void write_matrix_market(std::ostream& os, const Eigen::MatrixXd& A);

}  // namespace degstab
