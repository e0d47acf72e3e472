#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "degstab/delay.hpp"
#include "degstab/nonlinearity.hpp"
#include "degstab/operators.hpp"

namespace degstab {

/// History g(s), s in [-tau, 0], as traces on P.
using HistoryFn = std::function<Eigen::VectorXd(double)>;

struct Scenario {
    DiscreteGenerator gen;
    KernelSpec kernel;
    FeedbackOperator feedback;
    SourceSpec source;
    Eigen::VectorXd y0, y1;  // full-grid displacement and velocity
    HistoryFn history;
    double dt = 0.01;
    double t_end = 1.0;

    Eigen::VectorXd initial_state() const { return gen.pack(y0, y1); }
    /// Velocity mass weights on the full grid (zero on fixed nodes).
    Eigen::VectorXd mass_grid() const { return gen.expand(gen.mass); }
    int steps() const;
};

/// Feedback whose H pairing is the state velocity weights on P.
FeedbackOperator state_feedback(const DiscreteGenerator& gen, const Subdomain& sub);

/// Checks dt | tau, data lengths, x=0 conditions and the explicit-delay step bound dt * sup|k| <= 1.
Scenario make_scenario(DiscreteGenerator gen, KernelSpec kernel, const Subdomain& sub, SourceSpec source,
                       Eigen::VectorXd y0, Eigen::VectorXd y1, HistoryFn history, double dt, double t_end);

double kernel_sup(const KernelSpec& k);

/// Real part of the j-th eigenvector of the system matrix, phase-aligned so the largest entry is
/// real. Only eigenvalues with Im >= 0 count; eigenmode_state orders them by |lambda| (j = 1 is the
/// lowest frequency), slowest_mode_state by decreasing real part (j = 1 sits on the abscissa).
Eigen::VectorXd eigenmode_state(const DiscreteGenerator& gen, int j);
Eigen::VectorXd slowest_mode_state(const DiscreteGenerator& gen, int j);

/// x^2 (beams, satisfies the clamped and natural conditions) or x (waves), zero velocity.
Eigen::VectorXd polynomial_state(const DiscreteGenerator& gen);

/// Rescales a nonzero state to the given state norm.
Eigen::VectorXd scale_state(const DiscreteGenerator& gen, const Eigen::VectorXd& Y, double norm);

HistoryFn zero_history(int width);
HistoryFn constant_history(int width, double c);
/// g(s) = B* y1 for all s.
HistoryFn velocity_history(const FeedbackOperator& B, const Eigen::VectorXd& y1_grid);

}  // namespace degstab
