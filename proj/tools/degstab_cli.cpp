#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "degstab/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"degstab: degenerate beam and wave equations with delayed damping"};
    degstab::CliOptions opts;
    std::string command = "simulate";
    app.add_option("--config", opts.config, "scenario INI file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    app.add_option("--command", command, "simulate, certify or sweep")
        ->check(CLI::IsMember({"simulate", "certify", "sweep"}))
        ->capture_default_str();
    app.add_flag("--quiet", opts.quiet, "do not echo the report");
    app.add_option("--dump-generator", opts.dump_generator, "write the system matrix in Matrix Market format");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : degstab::exit_code::config;
    }
    opts.command = degstab::parse_command(command);
    return degstab::run(opts, std::cout, std::cerr);
}
