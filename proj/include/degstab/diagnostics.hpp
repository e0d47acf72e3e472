#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "degstab/scenario.hpp"

namespace degstab {

struct Trajectory;

struct EnergyBreakdown {
    double kinetic = 0.0;
    double elastic = 0.0;
    double boundary = 0.0;
    double source = 0.0;   // -int F
    double history = 0.0;  // 1/2 int_{t-tau}^t |k(s+tau)| |B* v(s)|_H^2 ds
    double total = 0.0;
};

/// Energy of state Y with the delay window held in buf (time buf.time()).
EnergyBreakdown energy(const Scenario& sc, const Eigen::VectorXd& Y, const HistoryBuffer& buf);

/// Trapezoid sum over the buffer slots; exact for piecewise-linear integrands in s.
double history_energy(const KernelSpec& k, const FeedbackOperator& B, const HistoryBuffer& buf);

/// C(t) = exp(2 b^2 int_0^t (|k(s)| + |k(s + tau)|) ds).
double growth_envelope_C(const KernelSpec& k, double b, double t);

/// Inputs for the lower bound E > |Y|^2 / 4: the function h and the seminorm of y0.
struct LowerBoundInputs {
    std::function<double(double)> h;
    double y0_seminorm = 0.0;
};

struct BoundMargin {
    double t = 0.0;
    double E = 0.0;
    double envelope = 0.0;    // C(t) E(0)
    bool premise = true;      // E >= |v|^2 / 4
    double lower_margin = std::numeric_limits<double>::quiet_NaN();  // E - |Y|^2 / 4 when checked
};

struct BoundCheckReport {
    int checked = 0;
    int excluded = 0;
    bool upper_holds = true;
    double worst_ratio = 0.0;  // max E / (C(t) E(0)) over included steps
    double worst_time = 0.0;
    bool lower_checked = false;
    bool lower_holds = true;
    double worst_lower_margin = std::numeric_limits<double>::infinity();
    double tol = 0.05;
    std::vector<BoundMargin> rows;
};

/// E(t) <= (1 + tol) C(t) E(0) on every step where E >= |v|^2 / 4, and E > |Y|^2 / 4 when the
/// lower-bound hypotheses hold. strict = true throws BoundViolated at the worst step.
BoundCheckReport energy_bound_check(const Trajectory& tr, const KernelSpec& k, double b, double tol = 0.05,
                                    const LowerBoundInputs* lower = nullptr, bool strict = false);

void write_bound_margins_csv(std::ostream& os, const BoundCheckReport& r);

struct ThresholdInputs {
    double M = 1.0;
    double omega = 0.0;
    double Lambda = 0.0;
    double alpha = 0.0;
    double omega_prime = 0.0;
    double b = 1.0;
    KernelSpec kernel;
    SourceSpec source;
    NonlinearityConstants constants;
    bool lipschitz_available = true;  // L(r) and h known for this operator kind
};

struct ThresholdCertificate {
    double T = 0.0;
    double C_of_T = 0.0;
    double rho = 0.0;
    double C_rho = 0.0;
    double L_at_C_rho = 0.0;
    double predicted_rate = 0.0;
    double C_T_condition = 0.0;
    int shrink_steps = 0;
    bool feasible = false;
    std::string reason;
};

double c_T_condition(const ThresholdInputs& in, double T);

/// Log grid of 601 points on [1, 1e3].
std::vector<double> default_T_grid();

ThresholdCertificate threshold_certificate(const ThresholdInputs& in, const std::vector<double>& T_grid = default_T_grid());

struct DecayFit {
    double rate = 0.0;
    double r2 = 0.0;
    int points = 0;
};

inline constexpr double kFitWindow = 0.6;

/// Least-squares slope of -log|Y| over the last 60% of the samples. Samples below 1e-12 of the
/// peak norm are left out as round-off.
DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& norm, double window = kFitWindow);
DecayFit decay_fit(const Trajectory& tr, double window = kFitWindow);

struct HypothesisReport {
    std::string kind;
    std::string degeneracy_class;
    double K = 0.0;
    double abscissa = 0.0;
    double M = 1.0;
    double omega = 0.0;
    double b = 1.0;
    double Lambda = 0.0;
    double alpha = 0.0;
    double omega_prime = 0.0;
    double C_HP = 0.0;
    bool growth_feasible = false;
    ThresholdCertificate threshold;
    bool feasible = false;
    std::string reason;
};

/// Full certificate chain for a scenario: semigroup constants, kernel bounds, threshold.
/// NotExponentiallyStable propagates; an infeasible chain is reported, not thrown.
HypothesisReport certify(const Scenario& sc, double horizon = 0.0, int samples = 200);

void write_hypothesis_report(std::ostream& os, const HypothesisReport& r);

}  // namespace degstab
