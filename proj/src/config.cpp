#include "degstab/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "degstab/csv.hpp"
#include "degstab/errors.hpp"

namespace degstab {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (t.empty() || pos != t.size() || !std::isfinite(v))
        fail(ErrorCode::ConfigError, "key " + key + ": '" + text + "' is not a finite number");
    return v;
}

ScenarioConfig from_ptree(const boost::property_tree::ptree& pt, const std::string& base_dir) {
    ScenarioConfig cfg;
    cfg.base_dir = base_dir;
    for (const auto& [section, body] : pt) {
        if (body.empty()) fail(ErrorCode::ConfigError, "key '" + section + "' is outside any [section]");
        for (const auto& [key, node] : body) cfg.values[section + "." + key] = trim(node.data());
    }
    const auto& known = known_config_keys();
    for (const auto& [key, value] : cfg.values)
        if (std::find(known.begin(), known.end(), key) == known.end())
            fail(ErrorCode::ConfigError, "unknown key " + key);
    return cfg;
}

void require(const ScenarioConfig& cfg, const std::string& key) {
    if (!cfg.has(key)) fail(ErrorCode::ConfigError, "missing required key " + key);
}

CoefficientSpec read_coefficient(const ScenarioConfig& cfg) {
    require(cfg, "coefficient.kind");
    const std::string kind = cfg.get("coefficient.kind");
    if (kind == "power") {
        require(cfg, "coefficient.alpha");
        return CoefficientSpec::power_law(cfg.number("coefficient.alpha"));
    }
    if (kind == "tabulated") {
        require(cfg, "coefficient.file");
        return CoefficientSpec::from_csv(cfg.resolve_path(cfg.get("coefficient.file")));
    }
    if (kind == "closed_form") {
        require(cfg, "coefficient.name");
        return CoefficientSpec::named(cfg.get("coefficient.name"));
    }
    fail(ErrorCode::ConfigError, "coefficient.kind must be power, tabulated or closed_form, got '" + kind + "'");
}

KernelSpec read_kernel(const ScenarioConfig& cfg) {
    const double tau = cfg.number_or("kernel.tau", 1.0);
    const std::string kind = cfg.get_or("kernel.kind", "none");
    if (kind == "none") return KernelSpec::constant(0.0, tau);
    if (kind == "constant") {
        require(cfg, "kernel.k0");
        return KernelSpec::constant(cfg.number("kernel.k0"), tau);
    }
    if (kind == "exp_decay") {
        require(cfg, "kernel.k0");
        require(cfg, "kernel.rate");
        return KernelSpec::exp_decay(cfg.number("kernel.k0"), cfg.number("kernel.rate"), tau);
    }
    if (kind == "l1_pulse") {
        require(cfg, "kernel.k0");
        require(cfg, "kernel.support");
        return KernelSpec::l1_pulse(cfg.number("kernel.k0"), cfg.number("kernel.support"), tau);
    }
    if (kind == "tabulated") {
        require(cfg, "kernel.file");
        return KernelSpec::from_csv(cfg.resolve_path(cfg.get("kernel.file")), tau);
    }
    fail(ErrorCode::ConfigError,
         "kernel.kind must be none, constant, exp_decay, l1_pulse or tabulated, got '" + kind + "'");
}

SourceSpec read_source(const ScenarioConfig& cfg) {
    const std::string kind = cfg.get_or("source.kind", "none");
    if (kind == "none") return SourceSpec::none();
    if (kind == "power") {
        require(cfg, "source.q");
        return SourceSpec::power(cfg.number("source.q"));
    }
    if (kind == "nonlocal") {
        require(cfg, "source.p");
        return SourceSpec::nonlocal(cfg.number("source.p"));
    }
    fail(ErrorCode::ConfigError, "source.kind must be none, power or nonlocal, got '" + kind + "'");
}

int mode_index(const std::string& preset, const std::string& word) {
    std::istringstream is(preset.substr(word.size()));
    int j = 0;
    std::string rest;
    if (!(is >> j) || (is >> rest))
        fail(ErrorCode::ConfigError, "initial.preset '" + preset + "' needs one integer after '" + word + "'");
    return j;
}

// Unit-free initial state before amplitude scaling.
Eigen::VectorXd read_initial(const ScenarioConfig& cfg, const DiscreteGenerator& gen, const std::string& preset) {
    if (preset == "polynomial") return polynomial_state(gen);
    if (preset == "zero") return Eigen::VectorXd::Zero(gen.dim());
    if (preset.rfind("eigenmode", 0) == 0) return eigenmode_state(gen, mode_index(preset, "eigenmode"));
    if (preset.rfind("slowest", 0) == 0) return slowest_mode_state(gen, mode_index(preset, "slowest"));
    if (preset.rfind("csv:", 0) == 0) {
        CsvTable t = read_csv(cfg.resolve_path(trim(preset.substr(4))), 3);
        const auto& x = gen.grid.x;
        if (static_cast<int>(t.rows.size()) != gen.grid.n)
            fail(ErrorCode::ConfigError, "initial csv needs one row per grid node (" + std::to_string(gen.grid.n) + ")");
        Eigen::VectorXd y0(gen.grid.n), y1(gen.grid.n);
        for (int i = 0; i < gen.grid.n; ++i) {
            if (std::abs(t.rows[i][0] - x[i]) > 1e-9)
                fail(ErrorCode::ConfigError, "initial csv row " + std::to_string(i) + " is not at x = " + format_number(x[i]));
            y0[i] = t.rows[i][1];
            y1[i] = t.rows[i][2];
        }
        Eigen::VectorXd free_mask = gen.expand(Eigen::VectorXd::Ones(gen.m()));
        for (int i = 0; i < gen.grid.n; ++i)
            if (free_mask[i] == 0.0 && (y0[i] != 0.0 || y1[i] != 0.0))
                fail(ErrorCode::ConfigError, "initial csv violates the condition at x = " + format_number(x[i]));
        return gen.pack(y0, y1);
    }
    fail(ErrorCode::ConfigError,
         "initial.preset must be 'eigenmode j', 'slowest j', 'polynomial', 'zero' or 'csv:<path>', got '" + preset + "'");
}

HistoryFn read_history(const std::string& preset, const FeedbackOperator& B, const Eigen::VectorXd& y1) {
    if (preset == "zero") return zero_history(B.sub.size());
    if (preset == "velocity") return velocity_history(B, y1);
    if (preset.rfind("constant", 0) == 0) {
        std::string rest = trim(preset.substr(8));
        return constant_history(B.sub.size(), parse_number("initial.history", rest));
    }
    fail(ErrorCode::ConfigError, "initial.history must be zero, velocity or 'constant c', got '" + preset + "'");
}

}  // namespace

const std::string& ScenarioConfig::get(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) fail(ErrorCode::ConfigError, "missing required key " + key);
    return it->second;
}

std::string ScenarioConfig::get_or(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

double ScenarioConfig::number(const std::string& key) const { return parse_number(key, get(key)); }

double ScenarioConfig::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

int ScenarioConfig::integer(const std::string& key) const {
    double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(ErrorCode::ConfigError, "key " + key + " must be an integer");
    return static_cast<int>(v);
}

int ScenarioConfig::integer_or(const std::string& key, int fallback) const {
    return has(key) ? integer(key) : fallback;
}

std::string ScenarioConfig::resolve_path(const std::string& p) const {
    std::filesystem::path path(p);
    if (path.is_absolute()) return p;
    return (std::filesystem::path(base_dir) / path).string();
}

const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys = {
        "coefficient.kind", "coefficient.alpha", "coefficient.file", "coefficient.name",
        "operator.kind",    "operator.beta",     "operator.gamma",   "operator.n",
        "operator.origin",  "kernel.kind",       "kernel.k0",        "kernel.rate",
        "kernel.support",   "kernel.file",       "kernel.tau",       "kernel.p0",
        "kernel.p1",        "source.kind",       "source.q",         "source.p",
        "initial.preset",   "initial.amplitude", "initial.history",  "run.dt",
        "run.t_end",        "run.horizon",       "run.samples",      "run.sweep_key",
        "run.sweep_values",
    };
    return keys;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ConfigError, "cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string dir = std::filesystem::path(path).parent_path().string();
    return parse_config(ss.str(), dir.empty() ? "." : dir);
}

ScenarioConfig parse_config(const std::string& text, const std::string& base_dir) {
    boost::property_tree::ptree pt;
    std::istringstream is(text);
    try {
        boost::property_tree::ini_parser::read_ini(is, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        fail(ErrorCode::ConfigError, std::string("malformed config: ") + e.what());
    }
    return from_ptree(pt, base_dir);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

RunSettings read_run_settings(const ScenarioConfig& cfg) {
    RunSettings r;
    require(cfg, "run.dt");
    require(cfg, "run.t_end");
    r.dt = cfg.number("run.dt");
    r.t_end = cfg.number("run.t_end");
    if (!(r.dt > 0.0) || !(r.t_end > 0.0)) fail(ErrorCode::ConfigError, "run.dt and run.t_end must be positive");
    r.horizon = cfg.number_or("run.horizon", 0.0);
    r.samples = cfg.integer_or("run.samples", 200);
    r.sweep_key = cfg.get_or("run.sweep_key", "");
    r.sweep_values = split_list(cfg.get_or("run.sweep_values", ""));
    if (!r.sweep_key.empty()) {
        const auto& known = known_config_keys();
        if (std::find(known.begin(), known.end(), r.sweep_key) == known.end() || r.sweep_key.rfind("run.sweep", 0) == 0)
            fail(ErrorCode::ConfigError, "run.sweep_key names no sweepable key: " + r.sweep_key);
    }
    return r;
}

BuiltScenario build_scenario(const ScenarioConfig& cfg) {
    BuiltScenario out;
    out.run = read_run_settings(cfg);

    require(cfg, "operator.kind");
    require(cfg, "operator.n");
    const Grid grid = Grid::uniform(cfg.integer("operator.n"));
    const CoefficientProfile profile = classify(read_coefficient(cfg), grid);
    BoundaryParams bc;
    bc.beta = cfg.number_or("operator.beta", 0.0);
    bc.gamma = cfg.number_or("operator.gamma", 0.0);
    DiscreteGenerator gen = assemble(parse_kind(cfg.get("operator.kind")), profile, bc, grid,
                                     parse_origin(cfg.get_or("operator.origin", "auto")));

    KernelSpec kernel = read_kernel(cfg);
    SourceSpec source = read_source(cfg);
    Subdomain sub = snap_subdomain(cfg.number_or("kernel.p0", 0.25), cfg.number_or("kernel.p1", 0.75), grid);

    out.initial_preset = cfg.get_or("initial.preset", "polynomial");
    out.history_preset = cfg.get_or("initial.history", "zero");
    const Eigen::VectorXd base = read_initial(cfg, gen, out.initial_preset);
    const std::string amp = cfg.get_or("initial.amplitude", "");

    auto assemble_with = [&](const Eigen::VectorXd& Y) {
        Eigen::VectorXd y0 = gen.displacement(Y), y1 = gen.velocity(Y);
        FeedbackOperator B = state_feedback(gen, sub);
        HistoryFn g = read_history(out.history_preset, B, y1);
        return make_scenario(gen, kernel, sub, source, y0, y1, g, out.run.dt, out.run.t_end);
    };

    Eigen::VectorXd Y = base;
    if (amp == "auto") {
        Scenario probe = assemble_with(base);
        HypothesisReport rep = certify(probe, out.run.horizon, out.run.samples);
        if (!rep.feasible)
            fail(ErrorCode::Infeasible, "initial.amplitude = auto needs a feasible certificate: " + rep.reason);
        const double a = std::isfinite(rep.threshold.rho) ? 0.5 * rep.threshold.rho : 1.0;
        Y = scale_state(gen, base, a);
        out.certificate = rep;
    } else if (!amp.empty()) {
        const double a = parse_number("initial.amplitude", amp);
        if (a < 0.0) fail(ErrorCode::ConfigError, "initial.amplitude must be nonnegative");
        Y = scale_state(gen, base, a);
    }
    out.amplitude = weighted_norm(gen, Y);
    out.scenario = assemble_with(Y);
    return out;
}

}  // namespace degstab
