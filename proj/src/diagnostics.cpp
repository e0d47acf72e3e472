#include "degstab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "degstab/csv.hpp"
#include "degstab/errors.hpp"
#include "degstab/evolution.hpp"

namespace degstab {

double history_energy(const KernelSpec& k, const FeedbackOperator& B, const HistoryBuffer& buf) {
    const int m = buf.m();
    const double t = buf.time();
    double s = 0.0;
    for (int j = 0; j <= m; ++j) {
        double w = (j == 0 || j == m) ? 0.5 : 1.0;
        double kj = std::abs(k.value(t + j * buf.dt()));
        if (kj == 0.0) continue;
        s += w * kj * B.h_norm_sq(buf.slot(j));
    }
    return 0.5 * buf.dt() * s;
}

EnergyBreakdown energy(const Scenario& sc, const Eigen::VectorXd& Y, const HistoryBuffer& buf) {
    const auto& gen = sc.gen;
    const int m = gen.m();
    const auto u = Y.head(m);
    const auto v = Y.tail(m);
    EnergyBreakdown e;
    e.kinetic = 0.5 * v.dot(gen.mass.cwiseProduct(v));
    e.elastic = 0.5 * u.dot(gen.elastic * u);
    e.boundary = 0.5 * u.dot(gen.boundary * u);
    e.source = -eval_F_functional(sc.source, gen.displacement(Y), gen.grid, sc.mass_grid());
    e.history = history_energy(sc.kernel, sc.feedback, buf);
    e.total = e.kinetic + e.elastic + e.boundary + e.source + e.history;
    return e;
}

double growth_envelope_C(const KernelSpec& k, double b, double t) {
    if (t <= 0.0) return 1.0;
    double I = k.abs_integral(t) + (k.abs_integral(t + k.tau) - k.abs_integral(k.tau));
    return std::exp(2.0 * b * b * I);
}

BoundCheckReport energy_bound_check(const Trajectory& tr, const KernelSpec& k, double b, double tol,
                                    const LowerBoundInputs* lower, bool strict) {
    BoundCheckReport r;
    r.tol = tol;
    if (tr.size() == 0) return r;
    const double E0 = tr.energy.front().total;
    const double slack = 1e-14 * std::max(std::abs(E0), 1e-300);

    if (lower && lower->h) {
        const double T = tr.times.back();
        const double CT = growth_envelope_C(k, b, T);
        r.lower_checked = E0 >= 0.0 && lower->h(lower->y0_seminorm) < 0.5 && lower->h(2.0 * std::sqrt(CT * E0)) < 0.5;
    }

    for (size_t i = 0; i < tr.size(); ++i) {
        const auto& e = tr.energy[i];
        BoundMargin row;
        row.t = tr.times[i];
        row.E = e.total;
        row.envelope = growth_envelope_C(k, b, row.t) * E0;
        // E >= |v|^2/4 with |v|^2 = 2 * kinetic
        row.premise = e.total >= 0.5 * e.kinetic;
        if (row.premise) {
            ++r.checked;
            double ratio = row.envelope > 0.0 ? row.E / row.envelope : (row.E > slack ? INFINITY : 0.0);
            if (ratio > r.worst_ratio) {
                r.worst_ratio = ratio;
                r.worst_time = row.t;
            }
            if (row.E > (1.0 + tol) * row.envelope + slack) r.upper_holds = false;
        } else {
            ++r.excluded;
        }
        if (r.lower_checked) {
            row.lower_margin = e.total - 0.25 * tr.state_norm[i] * tr.state_norm[i];
            r.worst_lower_margin = std::min(r.worst_lower_margin, row.lower_margin);
            if (!(row.lower_margin > 0.0) && tr.state_norm[i] > 0.0) r.lower_holds = false;
        }
        r.rows.push_back(row);
    }
    if (strict && !r.upper_holds)
        fail(ErrorCode::BoundViolated, "E(t) exceeds (1+tol) C(t) E(0) by the ratio " + format_number(r.worst_ratio) +
                                           " at t = " + format_number(r.worst_time));
    if (strict && !r.lower_holds)
        fail(ErrorCode::BoundViolated, "E(t) > |Y|^2/4 fails, worst margin " + format_number(r.worst_lower_margin));
    return r;
}

void write_bound_margins_csv(std::ostream& os, const BoundCheckReport& r) {
    os << "t,E_total,envelope,margin,premise,lower_margin\n";
    for (const auto& row : r.rows)
        os << format_number(row.t) << ',' << format_number(row.E) << ',' << format_number(row.envelope) << ','
           << format_number(row.envelope - row.E) << ',' << (row.premise ? 1 : 0) << ','
           << format_number(row.lower_margin) << "\n";
}

double c_T_condition(const ThresholdInputs& in, double T) {
    const double tau = in.kernel.tau;
    const double b2 = in.b * in.b;
    return 2.0 * in.M * in.M * std::exp(2.0 * in.alpha) * (1.0 + in.Lambda * std::exp(in.omega * tau) * b2) *
           (1.0 + in.Lambda * std::exp(2.0 * in.omega * tau) * b2) * std::exp(-(in.omega - in.omega_prime) * T);
}

std::vector<double> default_T_grid() {
    std::vector<double> g(601);
    for (int i = 0; i <= 600; ++i) g[i] = std::pow(10.0, 3.0 * i / 600.0);
    return g;
}

ThresholdCertificate threshold_certificate(const ThresholdInputs& in, const std::vector<double>& T_grid) {
    ThresholdCertificate c;
    const double gap = in.omega - in.omega_prime;
    c.predicted_rate = 0.5 * gap;
    if (!(gap > 0.0)) {
        c.reason = "omega' is not below omega";
        return c;
    }
    bool found = false;
    for (double T : T_grid) {
        double cond = c_T_condition(in, T);
        if (cond <= 1.0) {
            c.T = T;
            c.C_T_condition = cond;
            found = true;
            break;
        }
    }
    if (!found) {
        c.C_T_condition = T_grid.empty() ? INFINITY : c_T_condition(in, T_grid.back());
        c.reason = "no T on the search grid gives C_T <= 1";
        return c;
    }
    c.C_of_T = growth_envelope_C(in.kernel, in.b, c.T);

    if (in.source.kind == SourceKind::None) {
        c.rho = INFINITY;
        c.C_rho = INFINITY;
        c.L_at_C_rho = 0.0;
        c.feasible = true;
        c.reason = "linear problem, no smallness needed";
        return c;
    }
    if (!in.lipschitz_available) {
        c.reason = "L(r) and h are only available for beam_nondiv";
        return c;
    }
    const double target = gap / (2.0 * in.M);
    c.rho = h_inverse(in.source, in.constants, 0.5) / (2.0 * std::sqrt(c.C_of_T));
    for (;;) {
        c.C_rho = 2.0 * std::sqrt(c.C_of_T) * c.rho;
        c.L_at_C_rho = lipschitz_bound(in.source, in.constants, c.C_rho);
        if (c.L_at_C_rho < target) break;
        c.rho *= 0.5;
        ++c.shrink_steps;
        if (c.rho < 1e-12) {
            c.reason = "rho fell below 1e-12 before L(C_rho) < (omega - omega')/(2M)";
            return c;
        }
    }
    c.feasible = true;
    c.reason = "ok";
    return c;
}

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& norm, double window) {
    if (t.size() != norm.size() || t.size() < 3) fail(ErrorCode::DegenerateFit, "need at least 3 samples");
    double peak = 0.0;
    for (double v : norm)
        if (std::isfinite(v)) peak = std::max(peak, v);
    if (!(peak >= 1e-14)) fail(ErrorCode::DegenerateFit, "state norm is below 1e-14 everywhere");
    const double t0 = t.front() + (1.0 - window) * (t.back() - t.front());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int n = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 - 1e-12 || !(norm[i] > 1e-12 * peak) || !std::isfinite(norm[i])) continue;
        double x = t[i], y = std::log(norm[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++n;
    }
    if (n < 3) fail(ErrorCode::DegenerateFit, "fewer than 3 usable samples in the fit window");
    const double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
    if (!(cxx > 0.0)) fail(ErrorCode::DegenerateFit, "fit window has no time spread");
    DecayFit f;
    const double slope = cxy / cxx;
    f.rate = -slope;
    f.r2 = cyy > 0.0 ? (cxy * cxy) / (cxx * cyy) : 1.0;
    f.points = n;
    return f;
}

DecayFit decay_fit(const Trajectory& tr, double window) { return decay_fit(tr.times, tr.state_norm, window); }

HypothesisReport certify(const Scenario& sc, double horizon, int samples) {
    HypothesisReport r;
    const auto& gen = sc.gen;
    r.kind = kind_name(gen.kind);
    r.degeneracy_class = class_name(gen.profile.cls);
    r.K = gen.profile.K;

    SemigroupCertificate sg = semigroup_constants(gen, horizon, samples);
    r.abscissa = sg.abscissa;
    r.M = sg.M;
    r.omega = sg.omega;
    r.b = sc.feedback.b;
    r.Lambda = kernel_window_bound(sc.kernel);
    NonlinearityConstants nc = make_constants(sc.source, gen.grid, gen.profile);
    r.C_HP = nc.C_HP;

    try {
        GrowthCertificate g = kernel_growth_check(sc.kernel, r.M, r.omega, r.b);
        r.alpha = g.alpha;
        r.omega_prime = g.omega_prime;
        r.growth_feasible = true;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::Infeasible) throw;
        r.reason = e.what();
        r.threshold.reason = r.reason;
        return r;
    }

    ThresholdInputs in;
    in.M = r.M;
    in.omega = r.omega;
    in.Lambda = r.Lambda;
    in.alpha = r.alpha;
    in.omega_prime = r.omega_prime;
    in.b = r.b;
    in.kernel = sc.kernel;
    in.source = sc.source;
    in.constants = nc;
    in.lipschitz_available = gen.kind == OperatorKind::BeamNonDiv;
    r.threshold = threshold_certificate(in);
    r.feasible = r.threshold.feasible;
    r.reason = r.threshold.reason;
    return r;
}

void write_hypothesis_report(std::ostream& os, const HypothesisReport& r) {
    auto line = [&](const char* key, double v) { os << key << ": " << format_number(v) << "\n"; };
    os << "kind: " << r.kind << "\n";
    os << "class: " << r.degeneracy_class << "\n";
    line("K", r.K);
    line("spectral_abscissa", r.abscissa);
    line("M", r.M);
    line("omega", r.omega);
    line("b", r.b);
    line("Lambda", r.Lambda);
    line("alpha", r.alpha);
    line("omega_prime", r.omega_prime);
    line("C_HP", r.C_HP);
    line("T", r.threshold.T);
    line("C_of_T", r.threshold.C_of_T);
    line("C_T_condition", r.threshold.C_T_condition);
    line("rho", r.threshold.rho);
    line("C_rho", r.threshold.C_rho);
    line("L_at_C_rho", r.threshold.L_at_C_rho);
    line("predicted_rate", r.threshold.predicted_rate);
    os << "rho_shrink_steps: " << r.threshold.shrink_steps << "\n";
    os << "feasible: " << (r.feasible ? "true" : "false") << "\n";
    os << "reason: " << r.reason << "\n";
}

}  // namespace degstab
