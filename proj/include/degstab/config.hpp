#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "degstab/diagnostics.hpp"
#include "degstab/scenario.hpp"

namespace degstab {

/// Flat INI config: values keyed "section.key", raw text kept until a builder reads them.
struct ScenarioConfig {
    std::map<std::string, std::string> values;
    std::string base_dir = ".";  // relative file paths resolve against this

    bool has(const std::string& key) const { return values.count(key) > 0; }
    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    int integer(const std::string& key) const;
    int integer_or(const std::string& key, int fallback) const;
    void set(const std::string& key, const std::string& value) { values[key] = value; }
    std::string resolve_path(const std::string& p) const;
};

ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text, const std::string& base_dir = ".");

/// Every key the builder understands. Anything else is rejected as a typo.
const std::vector<std::string>& known_config_keys();

struct RunSettings {
    double dt = 0.0;
    double t_end = 0.0;
    double horizon = 0.0;  // 0 picks 10/|abscissa|
    int samples = 200;
    std::string sweep_key;
    std::vector<std::string> sweep_values;
};

struct BuiltScenario {
    Scenario scenario;
    RunSettings run;
    std::string initial_preset;
    std::string history_preset;
    double amplitude = 0.0;                         // state norm of (y0, y1)
    std::optional<HypothesisReport> certificate;    // filled when amplitude = auto
};

RunSettings read_run_settings(const ScenarioConfig& cfg);

/// Parses numbers out of a comma separated list ("0.1, 0.2").
std::vector<std::string> split_list(const std::string& s);

/// Validates keys and assembles the scenario. Module errors (KOutOfRange, ...) propagate unchanged;
/// missing or malformed keys raise ConfigError.
BuiltScenario build_scenario(const ScenarioConfig& cfg);

}  // namespace degstab
