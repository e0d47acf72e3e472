#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "degstab/grid.hpp"

namespace degstab {

enum class KernelKind { Constant, ExpDecay, L1Pulse, Tabulated };

/// Damping gain k(t) on [0, inf), zero for t < 0, with delay tau.
struct KernelSpec {
    KernelKind kind = KernelKind::Constant;
    double k0 = 0.0;
    double rate = 1.0;     // ExpDecay
    double support = 1.0;  // L1Pulse: k = k0 on [0, support)
    std::vector<std::pair<double, double>> steps;  // Tabulated: k = k_j on [t_j, t_{j+1}), last value held
    double tau = 1.0;

    static KernelSpec constant(double k0, double tau);
    static KernelSpec exp_decay(double k0, double rate, double tau);
    static KernelSpec l1_pulse(double k0, double support, double tau);
    static KernelSpec tabulated(std::vector<std::pair<double, double>> steps, double tau);
    static KernelSpec from_csv(const std::string& path, double tau);

    double value(double t) const;
    /// int_0^t |k|, exact.
    double abs_integral(double t) const;
    double abs_integral(double t0, double t1) const { return abs_integral(t1) - abs_integral(t0); }
    bool integrable() const;
    /// ||k||_{L1(0,inf)}; +inf when not integrable.
    double l1_norm() const;
    /// Points where k or |k| may jump, beyond t = 0.
    std::vector<double> breakpoints() const;
    std::string describe() const;
};

const char* kernel_kind_name(KernelKind k);

/// sup over t >= 0 of int_{t-tau}^t |k|.
double kernel_window_bound(const KernelSpec& k);

struct GrowthCertificate {
    double alpha = 0.0;
    double omega_prime = 0.0;
};

/// Smallest (alpha, omega') with M b^2 e^{omega tau} int_0^t |k(s+tau)| ds <= alpha + omega' t.
/// Throws Infeasible when omega' would reach omega.
GrowthCertificate kernel_growth_check(const KernelSpec& k, double M, double omega, double b);

/// Delay subdomain P snapped to grid nodes; P holds the nodes p0 <= x_i < p1 of the snapped interval.
struct Subdomain {
    double p0 = 0.25, p1 = 0.75;         // requested
    double p0_snapped = 0.25, p1_snapped = 0.75;
    std::vector<int> nodes;
    bool snap_warning = false;

    int size() const { return static_cast<int>(nodes.size()); }
    double measure() const { return p1_snapped - p0_snapped; }
};

Subdomain snap_subdomain(double p0, double p1, const Grid& grid);

/// B: functions on P -> grid functions, with H weighted by w_H and the state velocity space by w_state.
struct FeedbackOperator {
    Subdomain sub;
    Eigen::VectorXd h_weights;      // per P node
    Eigen::VectorXd state_weights;  // per P node
    double b = 1.0;                 // ||B||

    Eigen::VectorXd apply_B(const Eigen::VectorXd& v_sub, int grid_n) const;
    Eigen::VectorXd apply_Bstar(const Eigen::VectorXd& v_grid) const;
    double h_norm_sq(const Eigen::VectorXd& v_sub) const { return h_weights.dot(v_sub.cwiseAbs2()); }
};

/// H carries the given weights on P; b = max over P of sqrt(state weight / H weight).
FeedbackOperator make_feedback(const Subdomain& sub, const Eigen::VectorXd& state_weights_grid,
                               const Eigen::VectorXd& h_weights_grid);

/// Delayed traces B* v(s) for s in [t - tau, t] on m + 1 slots, m dt = tau.
class HistoryBuffer {
public:
    HistoryBuffer() = default;
    HistoryBuffer(double tau, double dt, int width);

    /// Fills the window [-tau, 0] from g sampled at the slot times.
    void initialize(const std::function<Eigen::VectorXd(double)>& g);
    /// Appends the trace at t + dt and drops the oldest slot.
    void push(const Eigen::VectorXd& trace);
    /// Exact on slot times, linear in between.
    Eigen::VectorXd sample(double t_query) const;

    double time() const { return static_cast<double>(steps_) * dt_; }
    double tau() const { return tau_; }
    double dt() const { return dt_; }
    int m() const { return m_; }
    int width() const { return width_; }
    /// j = 0 is the oldest slot (time t - tau), j = m the newest (time t).
    const Eigen::VectorXd& slot(int j) const { return ring_[(head_ + j) % (m_ + 1)]; }
    double slot_time(int j) const { return time() - tau_ + j * dt_; }

private:
    double tau_ = 1.0, dt_ = 1.0;
    int m_ = 1, width_ = 0;
    long steps_ = 0;
    int head_ = 0;
    std::vector<Eigen::VectorXd> ring_;
};

/// Number of steps per delay window; throws InvalidArgument unless dt divides tau.
int steps_per_delay(double tau, double dt);

}  // namespace degstab
