#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "degstab/diagnostics.hpp"
#include "degstab/scenario.hpp"

namespace degstab {

struct SemigroupCertificate {
    double M = 1.0;
    double omega = 0.0;
    double abscissa = 0.0;
    double horizon = 0.0;
    int samples = 0;
    std::string method_note;
};

inline constexpr double kOmegaSafety = 0.9;

/// (M, omega) with ||e^{tA}|| <= M e^{-omega t} in the norm |Y|^2 = Y' G Y, sampled on [0, horizon]
/// and re-verified at 50 more times on (0, 2 horizon). horizon <= 0 picks 10 / |abscissa|.
SemigroupCertificate semigroup_constants(const Eigen::MatrixXd& A, const Eigen::MatrixXd& gram, double horizon = 0.0,
                                         int samples = 200);
SemigroupCertificate semigroup_constants(const DiscreteGenerator& gen, double horizon = 0.0, int samples = 200);

/// Spectral norm of e^{tA} in the G-norm, by a direct matrix exponential.
double semigroup_norm(const Eigen::MatrixXd& A, const Eigen::MatrixXd& gram, double t);

inline constexpr double kBlowUpNorm = 1e8;

/// Crank-Nicolson for the linear part; the delay term is averaged over the step from buffer
/// values, the source is taken at the start of the step.
class Integrator {
public:
    explicit Integrator(const Scenario& sc);

    /// Throws NonFiniteState when the state leaves the finite range or exceeds kBlowUpNorm.
    void step();

    const Eigen::VectorXd& state() const { return Y_; }
    const HistoryBuffer& buffer() const { return buf_; }
    double time() const { return static_cast<double>(n_) * sc_.dt; }
    long step_count() const { return n_; }

    /// Velocity block of -k(t) B B* v(t - tau) on the free nodes, read from the buffer.
    Eigen::VectorXd delay_forcing(double t) const;
    /// Velocity block of f(u) on the free nodes.
    Eigen::VectorXd source_forcing(const Eigen::VectorXd& Y) const;

private:
    const Scenario& sc_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lhs_;
    Eigen::MatrixXd rhs_;
    Eigen::VectorXd Y_;
    HistoryBuffer buf_;
    long n_ = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<EnergyBreakdown> energy;
    std::vector<double> state_norm;
    std::vector<double> y_at_1, yt_at_1, yxt_at_1;
    std::vector<double> boundary_dissipation;  // v' R v
    bool blow_up = false;
    std::string blow_up_message;

    size_t size() const { return times.size(); }
};

Trajectory simulate(const Scenario& sc);

/// max_k |(E_{k+1} - E_k)/dt + (D_k + D_{k+1})/2| with D the boundary dissipation.
double energy_identity_residual(const Trajectory& tr);

struct DuhamelReport {
    double max_relative = 0.0;
    double worst_time = 0.0;
    int checked = 0;
};

/// Compares the trajectory with S(t)Y0 - int_0^t S(t-s) k(s) B Y(s - tau) ds, using a dense
/// exponential and Simpson's rule on the trajectory times. Requires source none and dt | tau.
DuhamelReport duhamel_residual(const Scenario& sc, const Trajectory& tr);

inline const char* kTrajectoryHeader =
    "t,E_total,E_kinetic,E_elastic,E_boundary,E_source,E_history,state_norm,y_at_1,yt_at_1";

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace degstab
