#include "degstab/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "degstab/config.hpp"
#include "degstab/csv.hpp"
#include "degstab/diagnostics.hpp"
#include "degstab/errors.hpp"
#include "degstab/evolution.hpp"

namespace degstab {

Command parse_command(const std::string& s) {
    if (s == "simulate") return Command::Simulate;
    if (s == "certify") return Command::Certify;
    if (s == "sweep") return Command::Sweep;
    fail(ErrorCode::ConfigError, "command must be simulate, certify or sweep, got '" + s + "'");
}

const char* command_name(Command c) {
    switch (c) {
        case Command::Simulate: return "simulate";
        case Command::Certify: return "certify";
        case Command::Sweep: return "sweep";
    }
    return "?";
}

namespace {

struct SimSummary {
    Trajectory tr;
    BoundCheckReport bounds;
    bool fit_ok = false;
    DecayFit fit;
    std::string fit_note;
};

SimSummary run_simulation(const Scenario& sc) {
    SimSummary s;
    s.tr = simulate(sc);
    const auto& gen = sc.gen;

    LowerBoundInputs lower;
    const bool h_known = sc.source.kind == SourceKind::None || gen.kind == OperatorKind::BeamNonDiv;
    if (h_known) {
        NonlinearityConstants nc = make_constants(sc.source, gen.grid, gen.profile);
        SourceSpec src = sc.source;
        lower.h = [src, nc](double x) { return h_eval(src, nc, x); };
        lower.y0_seminorm = seminorm(gen, gen.restrict_to_free(sc.y0));
    }
    s.bounds = energy_bound_check(s.tr, sc.kernel, sc.feedback.b, 0.05, h_known ? &lower : nullptr, false);
    try {
        s.fit = decay_fit(s.tr);
        s.fit_ok = true;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateFit) throw;
        s.fit_note = e.what();
    }
    return s;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p);
    if (!f) fail(ErrorCode::IoError, "cannot write " + p.string());
    f << text;
    if (!f) fail(ErrorCode::IoError, "write failed for " + p.string());
}

std::string scenario_header(const BuiltScenario& b, Command c) {
    const Scenario& sc = b.scenario;
    const auto& sub = sc.feedback.sub;
    std::ostringstream os;
    os << "command: " << command_name(c) << "\n";
    os << "kind: " << kind_name(sc.gen.kind) << "\n";
    os << "origin: " << origin_name(sc.gen.origin) << "\n";
    os << "coefficient: " << sc.gen.profile.spec.describe() << "\n";
    os << "kernel: " << sc.kernel.describe() << "\n";
    os << "source: " << sc.source.describe() << "\n";
    os << "n: " << sc.gen.grid.n << "\n";
    os << "dt: " << format_number(sc.dt) << "\n";
    os << "t_end: " << format_number(sc.t_end) << "\n";
    os << "subdomain: " << format_number(sub.p0_snapped) << " " << format_number(sub.p1_snapped) << "\n";
    os << "snap_warning: " << (sub.snap_warning ? "true" : "false") << "\n";
    os << "initial: " << b.initial_preset << "\n";
    os << "history: " << b.history_preset << "\n";
    os << "amplitude: " << format_number(b.amplitude) << "\n";
    return os.str();
}

std::string simulation_report(const BuiltScenario& b, const SimSummary& s) {
    const Scenario& sc = b.scenario;
    const Trajectory& tr = s.tr;
    std::ostringstream os;
    os << scenario_header(b, Command::Simulate);
    os << "class: " << class_name(sc.gen.profile.cls) << "\n";
    os << "K: " << format_number(sc.gen.profile.K) << "\n";
    os << "b: " << format_number(sc.feedback.b) << "\n";
    os << "steps: " << tr.size() - 1 << "\n";
    os << "E_initial: " << format_number(tr.energy.front().total) << "\n";
    os << "E_final: " << format_number(tr.energy.back().total) << "\n";
    os << "state_norm_initial: " << format_number(tr.state_norm.front()) << "\n";
    os << "state_norm_final: " << format_number(tr.state_norm.back()) << "\n";
    if (s.fit_ok) {
        os << "fitted_rate: " << format_number(s.fit.rate) << "\n";
        os << "fit_r2: " << format_number(s.fit.r2) << "\n";
        os << "fit_points: " << s.fit.points << "\n";
    } else {
        os << "fitted_rate: nan\n";
        os << "fit_note: " << s.fit_note << "\n";
    }
    if (kernel_sup(sc.kernel) == 0.0 && sc.source.kind == SourceKind::None)
        os << "energy_identity_residual: " << format_number(energy_identity_residual(tr)) << "\n";
    os << "bound_checked_steps: " << s.bounds.checked << "\n";
    os << "bound_excluded_steps: " << s.bounds.excluded << "\n";
    os << "bound_worst_ratio: " << format_number(s.bounds.worst_ratio) << "\n";
    os << "bound_worst_time: " << format_number(s.bounds.worst_time) << "\n";
    os << "bound_upper_holds: " << (s.bounds.upper_holds ? "true" : "false") << "\n";
    os << "lower_bound_checked: " << (s.bounds.lower_checked ? "true" : "false") << "\n";
    if (s.bounds.lower_checked) {
        os << "lower_bound_holds: " << (s.bounds.lower_holds ? "true" : "false") << "\n";
        os << "lower_bound_worst_margin: " << format_number(s.bounds.worst_lower_margin) << "\n";
    }
    os << "blow_up: " << (tr.blow_up ? "true" : "false") << "\n";
    if (tr.blow_up) os << "blow_up_message: " << tr.blow_up_message << "\n";
    return os.str();
}

int do_simulate(const BuiltScenario& b, const std::filesystem::path& dir, bool quiet, std::ostream& out) {
    SimSummary s = run_simulation(b.scenario);
    std::ostringstream traj, margins;
    write_trajectory_csv(traj, s.tr);
    write_bound_margins_csv(margins, s.bounds);
    const std::string report = simulation_report(b, s);
    write_file(dir / "trajectory.csv", traj.str());
    write_file(dir / "bound_margins.csv", margins.str());
    write_file(dir / "report.txt", report);
    if (!quiet) out << report;
    return s.tr.blow_up ? exit_code::blow_up : exit_code::ok;
}

int do_certify(const BuiltScenario& b, const std::filesystem::path& dir, bool quiet, std::ostream& out) {
    HypothesisReport rep = b.certificate ? *b.certificate : certify(b.scenario, b.run.horizon, b.run.samples);
    std::ostringstream os;
    os << scenario_header(b, Command::Certify);
    write_hypothesis_report(os, rep);
    write_file(dir / "certificate.txt", os.str());
    if (!quiet) out << os.str();
    return rep.feasible ? exit_code::ok : exit_code::infeasible;
}

int do_sweep(const ScenarioConfig& cfg, const RunSettings& run, const std::filesystem::path& dir, bool quiet,
             std::ostream& out) {
    if (run.sweep_key.empty() || run.sweep_values.empty())
        fail(ErrorCode::ConfigError, "sweep needs run.sweep_key and a nonempty run.sweep_values");
    std::ostringstream os;
    os << kSweepHeader << "\n";
    for (const auto& value : run.sweep_values) {
        ScenarioConfig c = cfg;
        c.set(run.sweep_key, value);
        BuiltScenario b = build_scenario(c);
        SimSummary s = run_simulation(b.scenario);

        double predicted = NAN;
        bool feasible = false;
        try {
            HypothesisReport rep = b.certificate ? *b.certificate : certify(b.scenario, b.run.horizon, b.run.samples);
            predicted = rep.threshold.predicted_rate;
            feasible = rep.feasible;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotExponentiallyStable) throw;
        }
        os << value << ',' << (s.fit_ok ? format_number(s.fit.rate) : "nan") << ','
           << (s.fit_ok ? format_number(s.fit.r2) : "nan") << ',' << format_number(predicted) << ','
           << (feasible ? 1 : 0) << ',' << format_number(s.bounds.worst_ratio) << ',' << s.bounds.excluded << ','
           << (s.tr.blow_up ? 1 : 0) << "\n";
    }
    write_file(dir / "sweep.csv", os.str());
    if (!quiet) out << os.str();
    return exit_code::ok;
}

int classify_error(const Error& e, Command c) {
    switch (e.code()) {
        case ErrorCode::Infeasible:
        case ErrorCode::NotExponentiallyStable:
            return c == Command::Sweep ? exit_code::config : exit_code::infeasible;
        case ErrorCode::IoError:
        case ErrorCode::EigSolveFailure:
        case ErrorCode::LinearSolveFailure:
        case ErrorCode::BoundViolated:
            return exit_code::internal;
        default:
            return exit_code::config;
    }
}

}  // namespace

int run(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        ScenarioConfig cfg = load_config(opts.config);
        const std::filesystem::path dir(opts.out_dir.empty() ? "." : opts.out_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) fail(ErrorCode::IoError, "cannot create output directory " + dir.string());

        if (opts.command == Command::Sweep) return do_sweep(cfg, read_run_settings(cfg), dir, opts.quiet, out);

        BuiltScenario b = build_scenario(cfg);
        if (!opts.dump_generator.empty()) {
            std::ostringstream mm;
            write_matrix_market(mm, b.scenario.gen.system_matrix);
            write_file(opts.dump_generator, mm.str());
        }
        if (opts.command == Command::Certify) return do_certify(b, dir, opts.quiet, out);
        return do_simulate(b, dir, opts.quiet, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return classify_error(e, opts.command);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::internal;
    }
}

}  // namespace degstab
