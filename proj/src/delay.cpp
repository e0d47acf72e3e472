#include "degstab/delay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "degstab/csv.hpp"
#include "degstab/errors.hpp"

namespace degstab {

namespace {

void check_tau(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorCode::InvalidArgument, "delay tau must be positive");
}

}  // namespace

const char* kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::Constant: return "constant";
        case KernelKind::ExpDecay: return "exp_decay";
        case KernelKind::L1Pulse: return "l1_pulse";
        case KernelKind::Tabulated: return "tabulated";
    }
    return "?";
}

KernelSpec KernelSpec::constant(double k0, double tau) {
    check_tau(tau);
    if (!std::isfinite(k0)) fail(ErrorCode::NotLocallyIntegrable, "kernel value is not finite");
    KernelSpec k;
    k.kind = KernelKind::Constant;
    k.k0 = k0;
    k.tau = tau;
    return k;
}

KernelSpec KernelSpec::exp_decay(double k0, double rate, double tau) {
    check_tau(tau);
    if (!std::isfinite(k0)) fail(ErrorCode::NotLocallyIntegrable, "kernel value is not finite");
    // k0 e^{-rate t} with rate <= 0 is locally integrable but never in L1; we only model decaying gains
    if (!(rate > 0.0)) fail(ErrorCode::NotLocallyIntegrable, "exp_decay kernel needs rate > 0");
    KernelSpec k;
    k.kind = KernelKind::ExpDecay;
    k.k0 = k0;
    k.rate = rate;
    k.tau = tau;
    return k;
}

KernelSpec KernelSpec::l1_pulse(double k0, double support, double tau) {
    check_tau(tau);
    if (!std::isfinite(k0)) fail(ErrorCode::NotLocallyIntegrable, "kernel value is not finite");
    if (!(support > 0.0) || !std::isfinite(support)) fail(ErrorCode::InvalidArgument, "pulse support must be positive");
    KernelSpec k;
    k.kind = KernelKind::L1Pulse;
    k.k0 = k0;
    k.support = support;
    k.tau = tau;
    return k;
}

KernelSpec KernelSpec::tabulated(std::vector<std::pair<double, double>> steps, double tau) {
    check_tau(tau);
    if (steps.empty()) fail(ErrorCode::InvalidArgument, "tabulated kernel needs at least one sample");
    if (std::abs(steps.front().first) > 1e-14) fail(ErrorCode::InvalidArgument, "tabulated kernel must start at t=0");
    for (size_t j = 0; j < steps.size(); ++j) {
        if (!std::isfinite(steps[j].second) || !std::isfinite(steps[j].first))
            fail(ErrorCode::NotLocallyIntegrable, "tabulated kernel value is not finite");
        if (j > 0 && !(steps[j].first > steps[j - 1].first))
            fail(ErrorCode::InvalidArgument, "tabulated kernel times must be strictly ascending");
    }
    steps.front().first = 0.0;
    KernelSpec k;
    k.kind = KernelKind::Tabulated;
    k.steps = std::move(steps);
    k.tau = tau;
    return k;
}

KernelSpec KernelSpec::from_csv(const std::string& path, double tau) {
    CsvTable t = read_csv(path, 2);
    std::vector<std::pair<double, double>> s;
    for (auto& r : t.rows) s.emplace_back(r[0], r[1]);
    return tabulated(std::move(s), tau);
}

double KernelSpec::value(double t) const {
    if (t < 0.0) return 0.0;
    switch (kind) {
        case KernelKind::Constant: return k0;
        case KernelKind::ExpDecay: return k0 * std::exp(-rate * t);
        case KernelKind::L1Pulse: return t < support ? k0 : 0.0;
        case KernelKind::Tabulated: {
            auto it = std::upper_bound(steps.begin(), steps.end(), t,
                                       [](double v, const auto& p) { return v < p.first; });
            return (it - 1)->second;
        }
    }
    return 0.0;
}

double KernelSpec::abs_integral(double t) const {
    if (t <= 0.0) return 0.0;
    const double a = std::abs(k0);
    switch (kind) {
        case KernelKind::Constant: return a * t;
        case KernelKind::ExpDecay: return a * (-std::expm1(-rate * t)) / rate;
        case KernelKind::L1Pulse: return a * std::min(t, support);
        case KernelKind::Tabulated: {
            double s = 0.0;
            for (size_t j = 0; j < steps.size(); ++j) {
                double lo = steps[j].first;
                if (lo >= t) break;
                double hi = j + 1 < steps.size() ? std::min(steps[j + 1].first, t) : t;
                s += std::abs(steps[j].second) * (hi - lo);
            }
            return s;
        }
    }
    return 0.0;
}

bool KernelSpec::integrable() const {
    switch (kind) {
        case KernelKind::Constant: return k0 == 0.0;
        case KernelKind::Tabulated: return steps.back().second == 0.0;
        default: return true;
    }
}

double KernelSpec::l1_norm() const {
    if (!integrable()) return std::numeric_limits<double>::infinity();
    switch (kind) {
        case KernelKind::Constant: return 0.0;
        case KernelKind::ExpDecay: return std::abs(k0) / rate;
        case KernelKind::L1Pulse: return std::abs(k0) * support;
        case KernelKind::Tabulated: return abs_integral(steps.back().first);
    }
    return 0.0;
}

std::vector<double> KernelSpec::breakpoints() const {
    std::vector<double> b;
    if (kind == KernelKind::L1Pulse) b.push_back(support);
    if (kind == KernelKind::Tabulated)
        for (size_t j = 1; j < steps.size(); ++j) b.push_back(steps[j].first);
    return b;
}

std::string KernelSpec::describe() const {
    std::ostringstream os;
    os << kernel_kind_name(kind);
    switch (kind) {
        case KernelKind::Constant: os << "(k0=" << k0 << ")"; break;
        case KernelKind::ExpDecay: os << "(k0=" << k0 << ", rate=" << rate << ")"; break;
        case KernelKind::L1Pulse: os << "(k0=" << k0 << ", support=" << support << ")"; break;
        case KernelKind::Tabulated: os << "(" << steps.size() << " steps)"; break;
    }
    os << ", tau=" << tau;
    return os.str();
}

double kernel_window_bound(const KernelSpec& k) {
    const double tau = k.tau;
    const double a = std::abs(k.k0);
    switch (k.kind) {
        case KernelKind::Constant: return a * tau;
        case KernelKind::ExpDecay: return a * (-std::expm1(-k.rate * tau)) / k.rate;
        case KernelKind::L1Pulse: return a * std::min(k.support, tau);
        case KernelKind::Tabulated: {
            // The window integral is piecewise linear in t with kinks at t_j and t_j + tau.
            auto window = [&](double t) { return k.abs_integral(t) - k.abs_integral(t - tau); };
            double best = std::abs(k.steps.back().second) * tau;  // t -> inf
            for (const auto& [tj, kj] : k.steps) {
                best = std::max(best, window(tj));
                best = std::max(best, window(tj + tau));
            }
            return best;
        }
    }
    return 0.0;
}

GrowthCertificate kernel_growth_check(const KernelSpec& k, double M, double omega, double b) {
    if (!(M >= 1.0) || !(omega > 0.0) || !(b > 0.0))
        fail(ErrorCode::InvalidArgument, "growth check needs M >= 1, omega > 0, b > 0");
    const double factor = M * b * b * std::exp(omega * k.tau);
    GrowthCertificate g;
    if (k.integrable()) {
        g.alpha = factor * k.l1_norm();
        return g;
    }
    if (k.kind == KernelKind::Constant) {
        g.omega_prime = factor * std::abs(k.k0);
    } else {
        // Tabulated with a nonzero tail c: phi(t) = int_tau^{t+tau} |k| - c t is piecewise linear
        // with kinks at t_j - tau and constant past the last one.
        const double c = std::abs(k.steps.back().second);
        auto phi = [&](double t) { return k.abs_integral(t + k.tau) - k.abs_integral(k.tau) - c * t; };
        double best = 0.0;
        for (const auto& [tj, kj] : k.steps)
            if (tj - k.tau > 0.0) best = std::max(best, phi(tj - k.tau));
        g.alpha = factor * best;
        g.omega_prime = factor * c;
    }
    if (g.omega_prime >= omega)
        fail(ErrorCode::Infeasible, "kernel growth omega' = " + format_number(g.omega_prime) +
                                        " is not below omega = " + format_number(omega));
    return g;
}

Subdomain snap_subdomain(double p0, double p1, const Grid& grid) {
    if (!(p0 > 0.0 && p0 < p1 && p1 < 1.0))
        fail(ErrorCode::InvalidArgument, "subdomain needs 0 < p0 < p1 < 1");
    Subdomain s;
    s.p0 = p0;
    s.p1 = p1;
    const double h = grid.h;
    int i0 = static_cast<int>(std::lround(p0 / h));
    int i1 = static_cast<int>(std::lround(p1 / h));
    s.p0_snapped = grid.x[i0];
    s.p1_snapped = grid.x[i1];
    const double tol = 1e-12;
    s.snap_warning = std::abs(s.p0_snapped - p0) > tol || std::abs(s.p1_snapped - p1) > tol;
    if (i0 <= 0 || i1 >= grid.n - 1 || i1 <= i0)
        fail(ErrorCode::SubdomainNotAligned, "subdomain (" + format_number(p0) + ", " + format_number(p1) +
                                                 ") does not cover an interior node range on this grid");
    for (int i = i0; i < i1; ++i) s.nodes.push_back(i);
    return s;
}

Eigen::VectorXd FeedbackOperator::apply_B(const Eigen::VectorXd& v_sub, int grid_n) const {
    if (v_sub.size() != sub.size()) fail(ErrorCode::SubdomainNotAligned, "trace length does not match the subdomain");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(grid_n);
    for (int j = 0; j < sub.size(); ++j) out[sub.nodes[j]] = v_sub[j];
    return out;
}

Eigen::VectorXd FeedbackOperator::apply_Bstar(const Eigen::VectorXd& v_grid) const {
    Eigen::VectorXd out(sub.size());
    for (int j = 0; j < sub.size(); ++j) {
        if (sub.nodes[j] >= v_grid.size()) fail(ErrorCode::SubdomainNotAligned, "grid function is too short");
        out[j] = v_grid[sub.nodes[j]];
    }
    return out;
}

FeedbackOperator make_feedback(const Subdomain& sub, const Eigen::VectorXd& state_weights_grid,
                               const Eigen::VectorXd& h_weights_grid) {
    FeedbackOperator B;
    B.sub = sub;
    B.h_weights.resize(sub.size());
    B.state_weights.resize(sub.size());
    B.b = 0.0;
    for (int j = 0; j < sub.size(); ++j) {
        int i = sub.nodes[j];
        B.h_weights[j] = h_weights_grid[i];
        B.state_weights[j] = state_weights_grid[i];
        B.b = std::max(B.b, std::sqrt(B.state_weights[j] / B.h_weights[j]));
    }
    return B;
}

int steps_per_delay(double tau, double dt) {
    if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "dt must be positive");
    double r = tau / dt;
    long m = std::lround(r);
    if (m < 1 || std::abs(r - static_cast<double>(m)) > 1e-9 * std::max(1.0, r))
        fail(ErrorCode::InvalidArgument, "dt = " + format_number(dt) + " does not divide tau = " + format_number(tau));
    return static_cast<int>(m);
}

HistoryBuffer::HistoryBuffer(double tau, double dt, int width)
    : tau_(tau), dt_(dt), m_(steps_per_delay(tau, dt)), width_(width),
      ring_(m_ + 1, Eigen::VectorXd::Zero(width)) {}

void HistoryBuffer::initialize(const std::function<Eigen::VectorXd(double)>& g) {
    steps_ = 0;
    head_ = 0;
    for (int j = 0; j <= m_; ++j) {
        double s = -tau_ + j * dt_;
        if (j == m_) s = 0.0;
        Eigen::VectorXd v = g(s);
        if (v.size() != width_) fail(ErrorCode::InvalidArgument, "history sample has the wrong length");
        ring_[j] = v;
    }
}

void HistoryBuffer::push(const Eigen::VectorXd& trace) {
    if (trace.size() != width_) fail(ErrorCode::InvalidArgument, "history trace has the wrong length");
    // oldest slot becomes the newest
    ring_[head_] = trace;
    head_ = (head_ + 1) % (m_ + 1);
    ++steps_;
}

Eigen::VectorXd HistoryBuffer::sample(double t_query) const {
    const double t = time();
    const double lo = t - tau_;
    const double eps = 1e-9 * dt_;
    if (t_query < lo - eps || t_query > t + eps)
        fail(ErrorCode::QueryOutOfWindow, "query time " + format_number(t_query) + " is outside [" +
                                              format_number(lo) + ", " + format_number(t) + "]");
    double r = (t_query - lo) / dt_;
    long j = std::lround(r);
    if (std::abs(r - static_cast<double>(j)) <= 1e-9) return slot(static_cast<int>(std::clamp<long>(j, 0, m_)));
    int j0 = std::clamp(static_cast<int>(std::floor(r)), 0, m_ - 1);
    double w = r - j0;
    return (1.0 - w) * slot(j0) + w * slot(j0 + 1);
}

}  // namespace degstab
