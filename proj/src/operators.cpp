#include "degstab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "degstab/csv.hpp"
#include "degstab/errors.hpp"

namespace degstab {

const char* kind_name(OperatorKind k) {
    switch (k) {
        case OperatorKind::BeamNonDiv: return "beam_nondiv";
        case OperatorKind::BeamDiv: return "beam_div";
        case OperatorKind::WaveNonDiv: return "wave_nondiv";
        case OperatorKind::WaveDiv: return "wave_div";
    }
    return "?";
}

OperatorKind parse_kind(const std::string& s) {
    if (s == "beam_nondiv") return OperatorKind::BeamNonDiv;
    if (s == "beam_div") return OperatorKind::BeamDiv;
    if (s == "wave_nondiv") return OperatorKind::WaveNonDiv;
    if (s == "wave_div") return OperatorKind::WaveDiv;
    fail(ErrorCode::InvalidArgument, "unknown operator kind '" + s + "'");
}

const char* origin_name(OriginCondition c) {
    switch (c) {
        case OriginCondition::Auto: return "auto";
        case OriginCondition::Clamped: return "clamped";
        case OriginCondition::Dirichlet: return "dirichlet";
        case OriginCondition::Natural: return "natural";
    }
    return "?";
}

OriginCondition parse_origin(const std::string& s) {
    if (s == "auto") return OriginCondition::Auto;
    if (s == "clamped") return OriginCondition::Clamped;
    if (s == "dirichlet") return OriginCondition::Dirichlet;
    if (s == "natural") return OriginCondition::Natural;
    fail(ErrorCode::InvalidArgument, "unknown x=0 condition '" + s + "'");
}

namespace {

// One quadrature point of a discrete quadratic form: value c.u with weight w.
struct StencilRow {
    std::vector<std::pair<int, double>> c;
    double w = 0.0;

    double apply(const Eigen::VectorXd& u) const {
        double s = 0.0;
        for (auto [i, ci] : c) s += ci * u[i];
        return s;
    }
};

OriginCondition expected_origin(OperatorKind kind, DegeneracyClass cls) {
    switch (kind) {
        case OperatorKind::BeamNonDiv: return OriginCondition::Clamped;
        case OperatorKind::BeamDiv: return cls == DegeneracyClass::WD ? OriginCondition::Clamped : OriginCondition::Natural;
        case OperatorKind::WaveNonDiv: return OriginCondition::Dirichlet;
        case OperatorKind::WaveDiv: return cls == DegeneracyClass::WD ? OriginCondition::Dirichlet : OriginCondition::Natural;
    }
    return OriginCondition::Clamped;
}

// Curvature samples u'' at the nodes. Node 0 uses the ghost value u_{-1} = u_1 of a clamped end
// and is dropped for the natural condition; node n-1 uses a one-sided second-order stencil.
std::vector<StencilRow> curvature_rows(const Grid& g, bool clamped, bool weighted, const CoefficientProfile* prof) {
    const int n = g.n;
    const double h = g.h, h2 = h * h;
    auto wt = [&](double width, double xm) { return weighted ? width * prof->a(xm) : width; };
    std::vector<StencilRow> rows;
    if (clamped) rows.push_back({{{0, -2.0 / h2}, {1, 2.0 / h2}}, wt(0.5 * h, 0.25 * h)});
    for (int j = 1; j < n - 1; ++j)
        rows.push_back({{{j - 1, 1.0 / h2}, {j, -2.0 / h2}, {j + 1, 1.0 / h2}}, wt(h, g.x[j])});
    rows.push_back({{{n - 1, 2.0 / h2}, {n - 2, -5.0 / h2}, {n - 3, 4.0 / h2}, {n - 4, -1.0 / h2}},
                    wt(0.5 * h, 1.0 - 0.25 * h)});
    return rows;
}

// Slopes on cell midpoints.
std::vector<StencilRow> slope_rows(const Grid& g, bool weighted, const CoefficientProfile* prof) {
    std::vector<StencilRow> rows;
    const double h = g.h;
    for (int i = 0; i + 1 < g.n; ++i) {
        double xm = g.x[i] + 0.5 * h;
        rows.push_back({{{i, -1.0 / h}, {i + 1, 1.0 / h}}, weighted ? h * prof->a(xm) : h});
    }
    return rows;
}

std::vector<StencilRow> elastic_rows(const DiscreteGenerator& gen) {
    const bool weighted = is_divergence(gen.kind);
    if (is_beam(gen.kind))
        return curvature_rows(gen.grid, gen.origin == OriginCondition::Clamped, weighted, &gen.profile);
    return slope_rows(gen.grid, weighted, &gen.profile);
}

Eigen::MatrixXd form_matrix(const std::vector<StencilRow>& rows, int n) {
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    for (const auto& r : rows)
        for (auto [i, ci] : r.c)
            for (auto [j, cj] : r.c) K(i, j) += r.w * ci * cj;
    return K;
}

Eigen::MatrixXd take(const Eigen::MatrixXd& A, const std::vector<int>& idx) {
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd B(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) B(a, b) = A(idx[a], idx[b]);
    return B;
}

double trapezoid(const Grid& g, const Eigen::VectorXd& f) { return trapezoid_weights(g).dot(f); }

// Derivative of order k at node i, second-order accurate; centered where the stencil fits.
double fd_derivative(const Grid& g, const Eigen::VectorXd& u, int k, int i) {
    const int n = g.n;
    int p = (k % 2 == 0) ? k + 1 : k + 2;
    int lo = i - p / 2;
    if (lo < 0 || lo + p > n) {
        p = k + 2;
        lo = std::clamp(i - p / 2, 0, n - p);
    }
    std::vector<double> xs(p);
    for (int j = 0; j < p; ++j) xs[j] = g.x[lo + j];
    auto w = fd_weights(g.x[i], xs, k);
    double s = 0.0;
    for (int j = 0; j < p; ++j) s += w[j] * u[lo + j];
    return s;
}

Eigen::VectorXd fd_derivative_all(const Grid& g, const Eigen::VectorXd& u, int k) {
    Eigen::VectorXd d(g.n);
    for (int i = 0; i < g.n; ++i) d[i] = fd_derivative(g, u, k, i);
    return d;
}

}  // namespace

Eigen::VectorXd inverse_weight_quadrature(const Grid& grid, const CoefficientProfile& profile) {
    const int n = grid.n;
    const double h = grid.h;
    Eigen::VectorXd w(n);
    w[0] = 0.5 * h / profile.a(0.25 * h);
    for (int i = 1; i < n - 1; ++i) w[i] = h / profile.grid_values[i];
    w[n - 1] = 0.5 * h / profile.a(1.0 - 0.25 * h);
    return w;
}

Eigen::VectorXd DiscreteGenerator::expand(const Eigen::VectorXd& free_values) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(grid.n);
    for (int a = 0; a < m(); ++a) full[free_nodes[a]] = free_values[a];
    return full;
}

Eigen::VectorXd DiscreteGenerator::restrict_to_free(const Eigen::VectorXd& grid_values) const {
    Eigen::VectorXd r(m());
    for (int a = 0; a < m(); ++a) r[a] = grid_values[free_nodes[a]];
    return r;
}

Eigen::VectorXd DiscreteGenerator::pack(const Eigen::VectorXd& u_grid, const Eigen::VectorXd& v_grid) const {
    Eigen::VectorXd Y(dim());
    Y << restrict_to_free(u_grid), restrict_to_free(v_grid);
    return Y;
}

Eigen::MatrixXd DiscreteGenerator::gram() const {
    const int k = m();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * k, 2 * k);
    G.topLeftCorner(k, k) = elastic + boundary;
    G.bottomRightCorner(k, k) = mass.asDiagonal();
    return G;
}

DiscreteGenerator assemble(OperatorKind kind, const CoefficientProfile& profile, const BoundaryParams& bc,
                           const Grid& grid, OriginCondition origin) {
    if (grid.n < kMinGridNodes)
        fail(ErrorCode::GridTooCoarse, "operator assembly needs n >= " + std::to_string(kMinGridNodes));
    if (profile.grid_values.size() != grid.n)
        fail(ErrorCode::InvalidArgument, "coefficient profile was classified on a different grid");
    if (bc.beta < 0.0 || bc.gamma < 0.0) fail(ErrorCode::InvalidArgument, "beta and gamma must be nonnegative");

    const OriginCondition expected = expected_origin(kind, profile.cls);
    if (origin == OriginCondition::Auto) origin = expected;
    if (origin != expected)
        fail(ErrorCode::InconsistentBC, std::string(kind_name(kind)) + " with a " + class_name(profile.cls) +
                                            " coefficient requires the '" + origin_name(expected) +
                                            "' condition at x=0, got '" + origin_name(origin) + "'");
    if (kind == OperatorKind::WaveDiv && !(bc.beta > 0.0))
        fail(ErrorCode::InvalidArgument, "wave_div needs beta > 0");
    if (kind == OperatorKind::BeamDiv && origin == OriginCondition::Natural && !(bc.beta > 0.0 && bc.gamma > 0.0))
        fail(ErrorCode::InvalidArgument, "beam_div with an SD coefficient needs beta > 0 and gamma > 0");

    DiscreteGenerator gen;
    gen.kind = kind;
    gen.origin = origin;
    gen.grid = grid;
    gen.profile = profile;
    gen.bc = bc;

    const int n = grid.n;
    const double h = grid.h;
    for (int i = (origin == OriginCondition::Natural && kind == OperatorKind::WaveDiv) ? 0 : 1; i < n; ++i)
        gen.free_nodes.push_back(i);

    Eigen::VectorXd mass_full = is_divergence(kind) ? trapezoid_weights(grid) : inverse_weight_quadrature(grid, profile);
    gen.mass = gen.restrict_to_free(mass_full);

    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(n), d = Eigen::RowVectorXd::Zero(n);
    e[n - 1] = 1.0;
    d[n - 1] = 1.5 / h;
    d[n - 2] = -2.0 / h;
    d[n - 3] = 0.5 / h;

    Eigen::MatrixXd springs, damp;
    const double a1 = profile.a(1.0);
    switch (kind) {
        case OperatorKind::BeamNonDiv:
        case OperatorKind::BeamDiv:
            springs = bc.beta * e.transpose() * e + bc.gamma * d.transpose() * d;
            damp = e.transpose() * e + d.transpose() * d;
            break;
        case OperatorKind::WaveNonDiv:
            springs = bc.beta * e.transpose() * e;
            damp = e.transpose() * e;
            break;
        case OperatorKind::WaveDiv:
            springs = bc.beta * a1 * e.transpose() * e;
            damp = a1 * e.transpose() * e;
            break;
    }

    gen.elastic = take(form_matrix(elastic_rows(gen), n), gen.free_nodes);
    gen.boundary = take(springs, gen.free_nodes);
    gen.damping = take(damp, gen.free_nodes);
    gen.trace_value = gen.restrict_to_free(e.transpose()).transpose();
    gen.trace_slope = gen.restrict_to_free(d.transpose()).transpose();

    const int m = gen.m();
    Eigen::VectorXd minv = gen.mass.cwiseInverse();
    gen.stiffness = minv.asDiagonal() * (gen.elastic + gen.boundary);
    gen.system_matrix = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    gen.system_matrix.topRightCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
    gen.system_matrix.bottomLeftCorner(m, m) = -gen.stiffness;
    gen.system_matrix.bottomRightCorner(m, m) = -(minv.asDiagonal() * gen.damping);
    return gen;
}

double state_inner(const DiscreteGenerator& gen, const Eigen::VectorXd& Y, const Eigen::VectorXd& Z) {
    const int m = gen.m();
    auto u = Y.head(m), v = Y.tail(m), uu = Z.head(m), vv = Z.tail(m);
    return u.dot((gen.elastic + gen.boundary) * uu) + v.dot(gen.mass.cwiseProduct(vv));
}

double weighted_norm(const DiscreteGenerator& gen, const Eigen::VectorXd& Y) {
    return std::sqrt(std::max(0.0, state_inner(gen, Y, Y)));
}

double seminorm(const DiscreteGenerator& gen, const Eigen::VectorXd& u_free) {
    return std::sqrt(std::max(0.0, u_free.dot(gen.elastic * u_free)));
}

double dissipation_form(const DiscreteGenerator& gen, const Eigen::VectorXd& Y) {
    return state_inner(gen, gen.system_matrix * Y, Y);
}

double boundary_dissipation(const DiscreteGenerator& gen, const Eigen::VectorXd& v_free) {
    return v_free.dot(gen.damping * v_free);
}

double gauss_green_residual(const DiscreteGenerator& gen, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    const Grid& g = gen.grid;
    const int last = g.n - 1;
    const Eigen::VectorXd& a = gen.profile.grid_values;
    Eigen::VectorXd v1 = fd_derivative_all(g, v, 1);
    switch (gen.kind) {
        case OperatorKind::BeamNonDiv: {
            Eigen::VectorXd u2 = fd_derivative_all(g, u, 2), v2 = fd_derivative_all(g, v, 2);
            double lhs = trapezoid(g, fd_derivative_all(g, u, 4).cwiseProduct(v));
            double rhs = fd_derivative(g, u, 3, last) * v[last] - u2[last] * v1[last] + trapezoid(g, u2.cwiseProduct(v2));
            return std::abs(lhs - rhs);
        }
        case OperatorKind::BeamDiv: {
            Eigen::VectorXd u2 = fd_derivative_all(g, u, 2), v2 = fd_derivative_all(g, v, 2);
            Eigen::VectorXd flux = a.cwiseProduct(u2);
            double lhs = trapezoid(g, fd_derivative_all(g, flux, 2).cwiseProduct(v));
            double rhs = fd_derivative(g, flux, 1, last) * v[last] - flux[last] * v1[last] +
                         trapezoid(g, flux.cwiseProduct(v2));
            return std::abs(lhs - rhs);
        }
        case OperatorKind::WaveNonDiv: {
            Eigen::VectorXd u1 = fd_derivative_all(g, u, 1);
            double lhs = trapezoid(g, fd_derivative_all(g, u, 2).cwiseProduct(v));
            double rhs = u1[last] * v[last] - trapezoid(g, u1.cwiseProduct(v1));
            return std::abs(lhs - rhs);
        }
        case OperatorKind::WaveDiv: {
            Eigen::VectorXd flux = a.cwiseProduct(fd_derivative_all(g, u, 1));
            double lhs = trapezoid(g, fd_derivative_all(g, flux, 1).cwiseProduct(v));
            double rhs = flux[last] * v[last] - trapezoid(g, flux.cwiseProduct(v1));
            return std::abs(lhs - rhs);
        }
    }
    return 0.0;
}

double discrete_green_defect(const DiscreteGenerator& gen, const Eigen::VectorXd& u_free, const Eigen::VectorXd& v_free) {
    const double lhs = v_free.dot(gen.mass.cwiseProduct(gen.stiffness * u_free));
    const Eigen::VectorXd u = gen.expand(u_free), v = gen.expand(v_free);
    double rhs = 0.0;
    for (const auto& r : elastic_rows(gen)) rhs += r.w * r.apply(u) * r.apply(v);
    const double tu = gen.trace_value.dot(u_free), tv = gen.trace_value.dot(v_free);
    const double su = gen.trace_slope.dot(u_free), sv = gen.trace_slope.dot(v_free);
    switch (gen.kind) {
        case OperatorKind::BeamNonDiv:
        case OperatorKind::BeamDiv: rhs += gen.bc.beta * tu * tv + gen.bc.gamma * su * sv; break;
        case OperatorKind::WaveNonDiv: rhs += gen.bc.beta * tu * tv; break;
        case OperatorKind::WaveDiv: rhs += gen.bc.beta * gen.profile.a(1.0) * tu * tv; break;
    }
    return std::abs(lhs - rhs);
}

double beam_curvature_norm(const Grid& grid, const Eigen::VectorXd& u) {
    double s = 0.0;
    for (const auto& r : curvature_rows(grid, true, false, nullptr)) {
        double c = r.apply(u);
        s += r.w * c * c;
    }
    return std::sqrt(s);
}

double spectral_abscissa(const Eigen::MatrixXd& A) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    if (es.info() != Eigen::Success) fail(ErrorCode::EigSolveFailure, "eigenvalue computation did not converge");
    return es.eigenvalues().real().maxCoeff();
}

std::vector<double> fd_weights(double z, const std::vector<double>& xs, int k) {
    // Fornberg, "Generation of finite difference formulas on arbitrarily spaced grids" (1988).
    const int n = static_cast<int>(xs.size()) - 1;
    std::vector<std::vector<double>> c(n + 1, std::vector<double>(k + 1, 0.0));
    double c1 = 1.0, c4 = xs[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        int mn = std::min(i, k);
        double c2 = 1.0, c5 = c4;
        c4 = xs[i] - z;
        for (int j = 0; j < i; ++j) {
            double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int s = mn; s >= 1; --s) c[i][s] = c1 * (s * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int s = mn; s >= 1; --s) c[j][s] = (c4 * c[j][s] - s * c[j][s - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n + 1);
    for (int i = 0; i <= n; ++i) w[i] = c[i][k];
    return w;
}

void write_matrix_market(std::ostream& os, const Eigen::MatrixXd& A) {
    long nnz = 0;
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            if (A(i, j) != 0.0) ++nnz;
    os << "%%MatrixMarket matrix coordinate real general\n" << A.rows() << ' ' << A.cols() << ' ' << nnz << '\n';
    for (int j = 0; j < A.cols(); ++j)
        for (int i = 0; i < A.rows(); ++i)
            if (A(i, j) != 0.0) os << i + 1 << ' ' << j + 1 << ' ' << format_number(A(i, j)) << '\n';
}

}  // namespace degstab
