#include "degstab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "degstab/csv.hpp"
#include "degstab/errors.hpp"

namespace degstab {

namespace {

// A in the coordinates Z = L' Y, G = L L', where the G-norm is Euclidean.
Eigen::MatrixXd to_euclidean(const Eigen::MatrixXd& A, const Eigen::MatrixXd& G) {
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) fail(ErrorCode::InvalidArgument, "state Gram matrix is not positive definite");
    Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd At = L.triangularView<Eigen::Lower>().solve(A.transpose() * L);
    return At.transpose();
}

double spectral_norm(const Eigen::MatrixXd& P) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(P);
    return svd.singularValues()(0);
}

}  // namespace

SemigroupCertificate semigroup_constants(const Eigen::MatrixXd& A, const Eigen::MatrixXd& gram, double horizon,
                                         int samples) {
    const double s = spectral_abscissa(A);
    if (s >= -1e-12)
        fail(ErrorCode::NotExponentiallyStable, "spectral abscissa " + format_number(s) + " is not negative");
    if (samples < 1) fail(ErrorCode::InvalidArgument, "need at least one sample");
    SemigroupCertificate c;
    c.abscissa = s;
    c.omega = kOmegaSafety * (-s);
    c.horizon = horizon > 0.0 ? horizon : 10.0 / (-s);
    c.samples = samples;

    const Eigen::MatrixXd At = to_euclidean(A, gram);
    const int d = static_cast<int>(At.rows());
    const double step = c.horizon / samples;
    const Eigen::MatrixXd E = (step * At).exp();
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d);
    double M = 1.0;
    for (int k = 1; k <= samples; ++k) {
        P = E * P;
        M = std::max(M, spectral_norm(P) * std::exp(c.omega * k * step));
    }
    constexpr int extra = 50;
    for (int j = 0; j < extra; ++j) {
        double t = 2.0 * c.horizon * (j + 0.5) / extra;
        Eigen::MatrixXd Pt = (t * At).exp();
        M = std::max(M, spectral_norm(Pt) * std::exp(c.omega * t));
    }
    c.M = M;
    std::ostringstream note;
    note << "spectral norm of exp(tA) in the energy norm at " << samples << " steps on [0, " << c.horizon
         << "], re-checked at " << extra << " points on (0, " << 2.0 * c.horizon << ")";
    c.method_note = note.str();
    return c;
}

SemigroupCertificate semigroup_constants(const DiscreteGenerator& gen, double horizon, int samples) {
    return semigroup_constants(gen.system_matrix, gen.gram(), horizon, samples);
}

double semigroup_norm(const Eigen::MatrixXd& A, const Eigen::MatrixXd& gram, double t) {
    return spectral_norm((t * to_euclidean(A, gram)).exp());
}

Integrator::Integrator(const Scenario& sc) : sc_(sc) {
    const Eigen::MatrixXd& A = sc.gen.system_matrix;
    const int d = static_cast<int>(A.rows());
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    lhs_.compute(I - 0.5 * sc.dt * A);
    if (!(lhs_.rcond() > 1e-14)) fail(ErrorCode::LinearSolveFailure, "implicit step matrix is singular");
    rhs_ = I + 0.5 * sc.dt * A;
    Y_ = sc.initial_state();
    buf_ = HistoryBuffer(sc.kernel.tau, sc.dt, sc.feedback.sub.size());
    buf_.initialize(sc.history);
}

Eigen::VectorXd Integrator::delay_forcing(double t) const {
    const double k = sc_.kernel.value(t);
    if (k == 0.0) return Eigen::VectorXd::Zero(sc_.gen.m());
    Eigen::VectorXd trace = buf_.sample(t - sc_.kernel.tau);
    return -k * sc_.gen.restrict_to_free(sc_.feedback.apply_B(trace, sc_.gen.grid.n));
}

Eigen::VectorXd Integrator::source_forcing(const Eigen::VectorXd& Y) const {
    if (sc_.source.kind == SourceKind::None) return Eigen::VectorXd::Zero(sc_.gen.m());
    Eigen::VectorXd u = sc_.gen.displacement(Y);
    return sc_.gen.restrict_to_free(eval_f(sc_.source, u, sc_.gen.grid));
}

void Integrator::step() {
    const int m = sc_.gen.m();
    const double t = time();
    Eigen::VectorXd forcing = 0.5 * (delay_forcing(t) + delay_forcing(t + sc_.dt)) + source_forcing(Y_);
    Eigen::VectorXd b = rhs_ * Y_;
    b.tail(m) += sc_.dt * forcing;
    Eigen::VectorXd next = lhs_.solve(b);
    if (!next.allFinite())
        fail(ErrorCode::NonFiniteState, "state became non-finite at t = " + format_number(t + sc_.dt));
    const double nrm = weighted_norm(sc_.gen, next);
    if (!(nrm <= kBlowUpNorm))
        fail(ErrorCode::NonFiniteState, "state norm " + format_number(nrm) + " exceeds the blow-up threshold at t = " +
                                            format_number(t + sc_.dt));
    Y_ = std::move(next);
    buf_.push(sc_.feedback.apply_Bstar(sc_.gen.velocity(Y_)));
    ++n_;
}

namespace {

void record(Trajectory& tr, const Scenario& sc, const Integrator& it) {
    const auto& gen = sc.gen;
    const Eigen::VectorXd& Y = it.state();
    const int m = gen.m();
    tr.times.push_back(it.time());
    tr.states.push_back(Y);
    tr.energy.push_back(energy(sc, Y, it.buffer()));
    tr.state_norm.push_back(weighted_norm(gen, Y));
    tr.y_at_1.push_back(gen.trace_value.dot(Y.head(m)));
    tr.yt_at_1.push_back(gen.trace_value.dot(Y.tail(m)));
    tr.yxt_at_1.push_back(gen.trace_slope.dot(Y.tail(m)));
    tr.boundary_dissipation.push_back(boundary_dissipation(gen, Y.tail(m)));
}

}  // namespace

Trajectory simulate(const Scenario& sc) {
    Trajectory tr;
    Integrator it(sc);
    record(tr, sc, it);
    const int N = sc.steps();
    for (int k = 0; k < N; ++k) {
        try {
            it.step();
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NonFiniteState) throw;
            tr.blow_up = true;
            tr.blow_up_message = e.what();
            break;
        }
        record(tr, sc, it);
    }
    return tr;
}

double energy_identity_residual(const Trajectory& tr) {
    double worst = 0.0;
    for (size_t k = 0; k + 1 < tr.size(); ++k) {
        double dt = tr.times[k + 1] - tr.times[k];
        double r = (tr.energy[k + 1].total - tr.energy[k].total) / dt +
                   0.5 * (tr.boundary_dissipation[k] + tr.boundary_dissipation[k + 1]);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

DuhamelReport duhamel_residual(const Scenario& sc, const Trajectory& tr) {
    if (sc.source.kind != SourceKind::None) fail(ErrorCode::InvalidArgument, "the Duhamel check needs a linear scenario");
    const auto& gen = sc.gen;
    const int mtau = steps_per_delay(sc.kernel.tau, sc.dt);
    const double dt = sc.dt;
    const Eigen::MatrixXd G = gen.gram();
    const Eigen::MatrixXd E = (dt * gen.system_matrix).exp();
    const int m = gen.m();

    auto forcing = [&](int j) -> Eigen::VectorXd {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(gen.dim());
        const double t = j * dt;
        const double k = sc.kernel.value(t);
        if (k == 0.0) return g;
        Eigen::VectorXd trace = j - mtau <= 0 ? sc.history(t - sc.kernel.tau)
                                              : sc.feedback.apply_Bstar(gen.velocity(tr.states[j - mtau]));
        g.tail(m) = -k * gen.restrict_to_free(sc.feedback.apply_B(trace, gen.grid.n));
        return g;
    };
    auto gnorm = [&](const Eigen::VectorXd& v) { return std::sqrt(std::max(0.0, v.dot(G * v))); };

    DuhamelReport rep;
    Eigen::VectorXd free_part = tr.states.front();  // S(t_j) Y0
    Eigen::VectorXd acc = forcing(0);               // Simpson running sum
    for (int j = 1; j < static_cast<int>(tr.size()); ++j) {
        free_part = E * free_part;
        Eigen::VectorXd gj = forcing(j);
        acc = E * acc + (j % 2 == 1 ? 4.0 : 2.0) * gj;
        if (j % 2 != 0) continue;
        Eigen::VectorXd oracle = free_part + (dt / 3.0) * (acc - gj);
        double denom = gnorm(oracle);
        double diff = gnorm(oracle - tr.states[j]);
        double rel = denom > 0.0 ? diff / denom : diff;
        ++rep.checked;
        if (rel > rep.max_relative) {
            rep.max_relative = rel;
            rep.worst_time = tr.times[j];
        }
    }
    return rep;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << kTrajectoryHeader << "\n";
    for (size_t k = 0; k < tr.size(); ++k) {
        const auto& e = tr.energy[k];
        os << format_number(tr.times[k]) << ',' << format_number(e.total) << ',' << format_number(e.kinetic) << ','
           << format_number(e.elastic) << ',' << format_number(e.boundary) << ',' << format_number(e.source) << ','
           << format_number(e.history) << ',' << format_number(tr.state_norm[k]) << ',' << format_number(tr.y_at_1[k])
           << ',' << format_number(tr.yt_at_1[k]) << "\n";
    }
}

}  // namespace degstab
