#include "degstab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "degstab/csv.hpp"
#include "degstab/errors.hpp"

namespace degstab {

int Scenario::steps() const { return static_cast<int>(std::lround(t_end / dt)); }

FeedbackOperator state_feedback(const DiscreteGenerator& gen, const Subdomain& sub) {
    Eigen::VectorXd w = gen.expand(gen.mass);
    for (int i : sub.nodes)
        if (!(w[i] > 0.0)) fail(ErrorCode::SubdomainNotAligned, "subdomain touches a fixed node");
    return make_feedback(sub, w, w);
}

double kernel_sup(const KernelSpec& k) {
    if (k.kind == KernelKind::Tabulated) {
        double s = 0.0;
        for (const auto& [t, v] : k.steps) s = std::max(s, std::abs(v));
        return s;
    }
    return std::abs(k.k0);
}

Scenario make_scenario(DiscreteGenerator gen, KernelSpec kernel, const Subdomain& sub, SourceSpec source,
                       Eigen::VectorXd y0, Eigen::VectorXd y1, HistoryFn history, double dt, double t_end) {
    const int n = gen.grid.n;
    if (y0.size() != n || y1.size() != n) fail(ErrorCode::InvalidArgument, "initial data must be given on the grid");
    if (!(t_end > 0.0)) fail(ErrorCode::InvalidArgument, "t_end must be positive");
    steps_per_delay(kernel.tau, dt);
    double r = t_end / dt;
    if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r))
        fail(ErrorCode::InvalidArgument, "dt must divide t_end");
    if (dt * kernel_sup(kernel) > 1.0)
        fail(ErrorCode::InvalidArgument, "dt * sup|k| = " + format_number(dt * kernel_sup(kernel)) +
                                             " exceeds 1; the explicit delay term needs a smaller step");

    Eigen::VectorXd free_mask = gen.expand(Eigen::VectorXd::Ones(gen.m()));
    const double scale = std::max({1.0, y0.cwiseAbs().maxCoeff(), y1.cwiseAbs().maxCoeff()});
    for (int i = 0; i < n; ++i)
        if (free_mask[i] == 0.0 && (std::abs(y0[i]) > 1e-12 * scale || std::abs(y1[i]) > 1e-12 * scale))
            fail(ErrorCode::InvalidArgument, "initial data violate the condition at x=0");

    Scenario sc;
    sc.feedback = state_feedback(gen, sub);
    sc.gen = std::move(gen);
    sc.kernel = std::move(kernel);
    sc.source = source;
    sc.y0 = std::move(y0);
    sc.y1 = std::move(y1);
    sc.history = history ? std::move(history) : zero_history(sub.size());
    sc.dt = dt;
    sc.t_end = t_end;
    return sc;
}

namespace {

Eigen::VectorXd mode_state(const DiscreteGenerator& gen, int j, bool by_decay) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(gen.system_matrix);
    if (es.info() != Eigen::Success) fail(ErrorCode::EigSolveFailure, "eigenvalue computation did not converge");
    const auto& ev = es.eigenvalues();
    std::vector<int> idx;
    for (int i = 0; i < ev.size(); ++i)
        if (ev[i].imag() >= 0.0) idx.push_back(i);
    if (by_decay)
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return ev[a].real() > ev[b].real(); });
    else
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(ev[a]) < std::abs(ev[b]); });
    if (j < 1 || j > static_cast<int>(idx.size()))
        fail(ErrorCode::InvalidArgument, "mode index out of range 1.." + std::to_string(idx.size()));
    const std::complex<double> lambda = ev[idx[j - 1]];
    Eigen::VectorXcd v = es.eigenvectors().col(idx[j - 1]);

    // Two steps of shifted inverse iteration: the QR eigenvectors carry ~1e-9 residuals, enough to
    // seed weakly damped modes that then dominate the late-time norm.
    const int d = gen.dim();
    const std::complex<double> shift = lambda + std::complex<double>(1e-9 * (1.0 + std::abs(lambda)), 0.0);
    Eigen::MatrixXcd S = gen.system_matrix.cast<std::complex<double>>();
    S -= shift * Eigen::MatrixXcd::Identity(d, d);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(S);
    for (int it = 0; it < 2; ++it) {
        v = lu.solve(v);
        v /= v.norm();
    }
    Eigen::Index k;
    v.cwiseAbs().maxCoeff(&k);
    v *= std::conj(v[k]) / std::abs(v[k]);
    Eigen::VectorXd Y = v.real();
    return scale_state(gen, Y, 1.0);
}

}  // namespace

Eigen::VectorXd eigenmode_state(const DiscreteGenerator& gen, int j) { return mode_state(gen, j, false); }

Eigen::VectorXd slowest_mode_state(const DiscreteGenerator& gen, int j) { return mode_state(gen, j, true); }

Eigen::VectorXd polynomial_state(const DiscreteGenerator& gen) {
    const auto& x = gen.grid.x;
    Eigen::VectorXd u = is_beam(gen.kind) ? Eigen::VectorXd(x.cwiseAbs2()) : Eigen::VectorXd(x);
    return gen.pack(u, Eigen::VectorXd::Zero(gen.grid.n));
}

Eigen::VectorXd scale_state(const DiscreteGenerator& gen, const Eigen::VectorXd& Y, double norm) {
    double cur = weighted_norm(gen, Y);
    if (!(cur > 0.0)) {
        if (norm == 0.0) return Y;
        fail(ErrorCode::InvalidArgument, "cannot rescale the zero state");
    }
    return Y * (norm / cur);
}

HistoryFn zero_history(int width) {
    return [width](double) { return Eigen::VectorXd::Zero(width); };
}

HistoryFn constant_history(int width, double c) {
    return [width, c](double) { return Eigen::VectorXd::Constant(width, c); };
}

HistoryFn velocity_history(const FeedbackOperator& B, const Eigen::VectorXd& y1_grid) {
    Eigen::VectorXd g = B.apply_Bstar(y1_grid);
    return [g](double) { return g; };
}

}  // namespace degstab
