#pragma once

#include <ostream>
#include <string>

namespace degstab {

enum class Command { Simulate, Certify, Sweep };

Command parse_command(const std::string& s);
const char* command_name(Command c);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int infeasible = 2;
inline constexpr int config = 3;
inline constexpr int blow_up = 4;
}  // namespace exit_code

struct CliOptions {
    std::string config;
    std::string out_dir = ".";
    Command command = Command::Simulate;
    bool quiet = false;
    std::string dump_generator;  // Matrix Market path for the system matrix, empty to skip
};

/// Runs one command. Files go to out_dir:
///   simulate -> trajectory.csv, bound_margins.csv, report.txt
///   certify  -> certificate.txt
///   sweep    -> sweep.csv
/// The report is echoed to `out` unless quiet; errors go to `err`.
int run(const CliOptions& opts, std::ostream& out, std::ostream& err);

inline constexpr const char* kSweepHeader =
    "value,fitted_rate,fit_r2,predicted_rate,feasible,bound_worst_ratio,bound_excluded,blow_up";

}  // namespace degstab
