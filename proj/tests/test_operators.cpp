#include <doctest.h>

#include <cmath>
#include <sstream>

#include "degstab/errors.hpp"
#include "degstab/operators.hpp"
#include "test_support.hpp"

using namespace degstab;
using degstab::testing::random_state;
using degstab::testing::Rng;

namespace {

DiscreteGenerator make(OperatorKind kind, double alpha, double beta, double gamma, int n) {
    Grid g = Grid::uniform(n);
    return assemble(kind, classify(CoefficientSpec::power_law(alpha), g), BoundaryParams{beta, gamma}, g);
}

struct Case {
    OperatorKind kind;
    double alpha, beta, gamma;
};

std::vector<Case> admissible_cases() {
    std::vector<Case> out;
    for (double alpha : {0.5, 1.5}) {
        for (double beta : {0.0, 1.0})
            for (double gamma : {0.0, 1.0}) out.push_back({OperatorKind::BeamNonDiv, alpha, beta, gamma});
        for (double beta : {0.0, 1.0}) out.push_back({OperatorKind::WaveNonDiv, alpha, beta, 0.0});
        out.push_back({OperatorKind::BeamDiv, alpha, 1.0, 1.0});
        out.push_back({OperatorKind::WaveDiv, alpha, 1.0, 0.0});
    }
    out.push_back({OperatorKind::BeamDiv, 0.5, 0.0, 0.0});
    out.push_back({OperatorKind::WaveDiv, 0.5, 2.0, 0.0});
    return out;
}

Eigen::VectorXd on_grid(const Grid& g, double (*f)(double)) {
    Eigen::VectorXd u(g.n);
    for (int i = 0; i < g.n; ++i) u[i] = f(g.x[i]);
    return u;
}

}  // namespace

TEST_CASE("generator is dissipative on random states") {
    Rng rng(11);
    for (const auto& c : admissible_cases()) {
        for (int n : {16, 48}) {
            DiscreteGenerator gen = make(c.kind, c.alpha, c.beta, c.gamma, n);
            for (int s = 0; s < 200; ++s) {
                Eigen::VectorXd Y = random_state(gen, rng);
                double nrm2 = state_inner(gen, Y, Y);
                CHECK(dissipation_form(gen, Y) <= 1e-10 * nrm2);
            }
        }
    }
}

TEST_CASE("dissipation equals minus the boundary damping") {
    // <AY, Y> = -v'Rv exactly: the interior part of A is skew in the state inner product.
    Rng rng(5);
    for (const auto& c : admissible_cases()) {
        DiscreteGenerator gen = make(c.kind, c.alpha, c.beta, c.gamma, 24);
        for (int s = 0; s < 50; ++s) {
            Eigen::VectorXd Y = random_state(gen, rng);
            double d = dissipation_form(gen, Y);
            double r = boundary_dissipation(gen, Y.tail(gen.m()));
            CHECK(std::abs(d + r) <= 1e-10 * state_inner(gen, Y, Y));
        }
    }
}

TEST_CASE("wave_div energy derivative is -a(1) v(1)^2") {
    DiscreteGenerator gen = make(OperatorKind::WaveDiv, 0.5, 1.0, 0.0, 64);
    Rng rng(3);
    for (int s = 0; s < 50; ++s) {
        Eigen::VectorXd Y = random_state(gen, rng);
        double v1 = gen.trace_value.dot(Y.tail(gen.m()));
        double expect = -gen.profile.a(1.0) * v1 * v1;
        CHECK(dissipation_form(gen, Y) == doctest::Approx(expect).epsilon(1e-9).scale(state_inner(gen, Y, Y)));
    }
}

TEST_CASE("zero state maps to zero") {
    for (const auto& c : admissible_cases()) {
        DiscreteGenerator gen = make(c.kind, c.alpha, c.beta, c.gamma, 16);
        Eigen::VectorXd Y = Eigen::VectorXd::Zero(gen.dim());
        CHECK((gen.system_matrix * Y).norm() == 0.0);
        CHECK(weighted_norm(gen, Y) == 0.0);
    }
}

TEST_CASE("system matrix block structure") {
    for (const auto& c : admissible_cases()) {
        DiscreteGenerator gen = make(c.kind, c.alpha, c.beta, c.gamma, 16);
        const int m = gen.m();
        const auto& A = gen.system_matrix;
        CHECK(A.topLeftCorner(m, m).norm() == 0.0);
        CHECK((A.topRightCorner(m, m) - Eigen::MatrixXd::Identity(m, m)).norm() == 0.0);
        CHECK((A.bottomLeftCorner(m, m) + gen.stiffness).norm() == 0.0);
        // damping only acts through the traces at x = 1
        Eigen::MatrixXd D = A.bottomRightCorner(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (gen.free_nodes[j] < gen.grid.n - 3) CHECK(D(i, j) == 0.0);
    }
}

TEST_CASE("beam_nondiv norm of x^2 is 4") {
    DiscreteGenerator gen = make(OperatorKind::BeamNonDiv, 1.0, 0.0, 0.0, 32);
    Eigen::VectorXd u = on_grid(gen.grid, [](double x) { return x * x; });
    Eigen::VectorXd Y = gen.pack(u, Eigen::VectorXd::Zero(gen.grid.n));
    double nrm = weighted_norm(gen, Y);
    CHECK(nrm * nrm == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(beam_curvature_norm(gen.grid, u) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("beam_nondiv springs add beta u(1)^2 + gamma u'(1)^2") {
    DiscreteGenerator gen = make(OperatorKind::BeamNonDiv, 1.0, 0.7, 0.3, 32);
    Eigen::VectorXd u = on_grid(gen.grid, [](double x) { return x * x; });
    Eigen::VectorXd Y = gen.pack(u, Eigen::VectorXd::Zero(gen.grid.n));
    double nrm = weighted_norm(gen, Y);
    CHECK(nrm * nrm == doctest::Approx(4.0 + 0.7 * 1.0 + 0.3 * 4.0).epsilon(1e-10));
}

TEST_CASE("wave_nondiv kinetic quadrature of v = x with a = x") {
    DiscreteGenerator gen = make(OperatorKind::WaveNonDiv, 1.0, 0.0, 0.0, 256);
    Eigen::VectorXd v = on_grid(gen.grid, [](double x) { return x; });
    Eigen::VectorXd Y = gen.pack(Eigen::VectorXd::Zero(gen.grid.n), v);
    double nrm = weighted_norm(gen, Y);
    CHECK(std::abs(nrm * nrm - 0.5) <= 1e-3);
}

TEST_CASE("inverse weight quadrature converges for singular 1/a") {
    // int_0^1 x^2 / x^0.5 = 2/5 and int_0^1 x^2 / x^1.5 = 2/3.
    for (auto [alpha, exact] : {std::pair{0.5, 0.4}, std::pair{1.5, 2.0 / 3.0}}) {
        double prev_err = 1.0;
        for (int n : {32, 64, 128, 256}) {
            Grid g = Grid::uniform(n);
            Eigen::VectorXd w = inverse_weight_quadrature(g, classify(CoefficientSpec::power_law(alpha), g));
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += w[i] * g.x[i] * g.x[i];
            double err = std::abs(s - exact);
            CHECK(err < prev_err);
            prev_err = err;
        }
        CHECK(prev_err <= 1e-3);
    }
}

TEST_CASE("discrete Green identity holds to rounding") {
    Rng rng(7);
    for (const auto& c : admissible_cases()) {
        DiscreteGenerator gen = make(c.kind, c.alpha, c.beta, c.gamma, 32);
        for (int s = 0; s < 20; ++s) {
            Eigen::VectorXd u = testing::random_free(gen, rng), v = testing::random_free(gen, rng);
            double scale = std::sqrt(u.dot(gen.elastic * u) + 1.0) * std::sqrt(v.dot(gen.elastic * v) + 1.0);
            CHECK(discrete_green_defect(gen, u, v) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("Gauss-Green residual is exact on quadratics") {
    DiscreteGenerator gen = make(OperatorKind::BeamNonDiv, 0.5, 0.0, 0.0, 32);
    Eigen::VectorXd u = on_grid(gen.grid, [](double x) { return x * x; });
    CHECK(gauss_green_residual(gen, u, u) <= 1e-10);
    CHECK(gauss_green_residual(gen, Eigen::VectorXd::Zero(32), u) == 0.0);
}

TEST_CASE("Gauss-Green residual converges at second order") {
    auto bump = [](double x) { return x * x * (1.0 - x) * (1.0 - x); };
    auto slope = [](double x) { return x * (1.0 - x) * (1.0 + x); };
    struct Kcase {
        OperatorKind kind;
        double (*f)(double);
    };
    for (Kcase kc : {Kcase{OperatorKind::BeamNonDiv, +bump}, Kcase{OperatorKind::BeamDiv, +bump},
                     Kcase{OperatorKind::WaveNonDiv, +slope}, Kcase{OperatorKind::WaveDiv, +slope}}) {
        std::vector<double> res;
        for (int n : {33, 65, 129}) {
            DiscreteGenerator gen = make(kc.kind, 0.5, 1.0, 1.0, n);
            Eigen::VectorXd u = on_grid(gen.grid, kc.f);
            res.push_back(gauss_green_residual(gen, u, u));
        }
        INFO(kind_name(kc.kind), " residuals ", res[0], " ", res[1], " ", res[2]);
        CHECK(res[0] / res[1] == doctest::Approx(4.0).epsilon(0.125));
        CHECK(res[1] / res[2] == doctest::Approx(4.0).epsilon(0.125));
    }
}

TEST_CASE("spectral abscissa is negative for stabilizing boundary parameters") {
    for (int n : {32, 64}) {
        CHECK(spectral_abscissa(make(OperatorKind::BeamNonDiv, 1.0, 0.0, 0.0, n).system_matrix) < 0.0);
        CHECK(spectral_abscissa(make(OperatorKind::BeamNonDiv, 0.5, 1.0, 1.0, n).system_matrix) < 0.0);
        CHECK(spectral_abscissa(make(OperatorKind::BeamDiv, 1.5, 1.0, 1.0, n).system_matrix) < 0.0);
        CHECK(spectral_abscissa(make(OperatorKind::WaveNonDiv, 1.5, 1.0, 0.0, n).system_matrix) < 0.0);
        CHECK(spectral_abscissa(make(OperatorKind::WaveDiv, 0.5, 1.0, 0.0, n).system_matrix) < 0.0);
    }
}

TEST_CASE("x=0 condition follows the degeneracy class") {
    auto origin = [](OperatorKind k, double alpha) { return make(k, alpha, 1.0, 1.0, 16).origin; };
    CHECK(origin(OperatorKind::BeamNonDiv, 0.5) == OriginCondition::Clamped);
    CHECK(origin(OperatorKind::BeamNonDiv, 1.5) == OriginCondition::Clamped);
    CHECK(origin(OperatorKind::BeamDiv, 0.5) == OriginCondition::Clamped);
    CHECK(origin(OperatorKind::BeamDiv, 1.5) == OriginCondition::Natural);
    CHECK(origin(OperatorKind::WaveDiv, 0.5) == OriginCondition::Dirichlet);
    CHECK(origin(OperatorKind::WaveDiv, 1.5) == OriginCondition::Natural);
    CHECK(origin(OperatorKind::WaveNonDiv, 1.5) == OriginCondition::Dirichlet);
}

TEST_CASE("assembly errors") {
    Grid g = Grid::uniform(16);
    auto wd = classify(CoefficientSpec::power_law(0.5), g);
    auto sd = classify(CoefficientSpec::power_law(1.5), g);
    auto code = [](auto f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    CHECK(code([&] { assemble(OperatorKind::BeamDiv, sd, {1, 1}, g, OriginCondition::Clamped); }) ==
          ErrorCode::InconsistentBC);
    CHECK(code([&] { assemble(OperatorKind::WaveDiv, wd, {1, 0}, g, OriginCondition::Natural); }) ==
          ErrorCode::InconsistentBC);
    Grid tiny = Grid::uniform(6);
    CHECK(code([&] {
              assemble(OperatorKind::BeamNonDiv, classify(CoefficientSpec::power_law(0.5), tiny), {0, 0}, tiny);
          }) == ErrorCode::GridTooCoarse);
}

TEST_CASE("finite-difference weights") {
    auto w = fd_weights(0.0, {-1.0, 0.0, 1.0}, 2);
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(-2.0));
    CHECK(w[2] == doctest::Approx(1.0));
    auto w1 = fd_weights(1.0, {1.0, 0.0, -1.0}, 1);  // one-sided second order
    CHECK(w1[0] == doctest::Approx(1.5));
    CHECK(w1[1] == doctest::Approx(-2.0));
    CHECK(w1[2] == doctest::Approx(0.5));
}

TEST_CASE("matrix market dump lists every nonzero") {
    Eigen::MatrixXd A(2, 2);
    A << 1.0, 0.0, -2.5, 3.0;
    std::ostringstream os;
    write_matrix_market(os, A);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line.rfind("%%MatrixMarket", 0) == 0);
    while (std::getline(is, line) && line[0] == '%') {
    }
    int r, c, nnz;
    std::istringstream(line) >> r >> c >> nnz;
    CHECK(r == 2);
    CHECK(c == 2);
    CHECK(nnz == 3);
}
