#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "varcond/driver.hpp"

// varcond: derive Euler-Lagrange systems, assemble the second-variation
// matrix, and classify candidate extremals of variational problems.
//
// Exit codes: 0 success; 2 usage or parse failure; 3 numeric failure;
// 4 classify reached INCONCLUSIVE without --allow-inconclusive.

namespace {

struct Cli {
    std::string path;
    varcond::DriverOptions opts;
};

void add_common(CLI::App* cmd, Cli& cli) {
    cmd->add_option("problem", cli.path, "problem file")->required();
    auto* machine = cmd->add_flag("--machine", cli.opts.machine,
                                  "emit the machine-readable JSON report");
    cmd->add_flag("--text", "emit the plain-text report (default)")->excludes(machine);
    cmd->add_flag("--no-timestamp", cli.opts.no_timestamp,
                  "omit the generation timestamp (byte-stable output)");
    cmd->add_option_function<double>(
        "--tol", [&cli](const double& v) { cli.opts.tol = v; },
        "override the definiteness tolerance");
    cmd->add_option("--grid-scale", cli.opts.grid_scale,
                    "scale every grid resolution by this factor");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&cli](const std::uint64_t& v) { cli.opts.seed = v; },
        "override the bump-placement seed");
    cmd->add_flag("--allow-inconclusive", cli.opts.allow_inconclusive,
                  "exit 0 even when classify is inconclusive");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"variational extremum conditions: Euler-Lagrange systems, "
                 "second-variation matrices, Legendre checks, classification"};
    app.require_subcommand(1);

    Cli cli;
    CLI::App* jet = app.add_subcommand("jet", "print the jet coordinate layout");
    CLI::App* el = app.add_subcommand(
        "el", "print the Euler-Lagrange residuals (and constraint machinery)");
    CLI::App* hessian =
        app.add_subcommand("hessian", "print the symbolic second-variation matrix");
    CLI::App* classify = app.add_subcommand(
        "classify", "run the full pipeline and classify the candidate");
    CLI::App* verify =
        app.add_subcommand("verify", "cross-check symbolic results against quadrature "
                                     "and finite differences");
    for (CLI::App* cmd : {jet, el, hessian, classify, verify}) add_common(cmd, cli);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : varcond::kExitUsage;
    }

    varcond::Command cmd = varcond::Command::Jet;
    if (el->parsed()) cmd = varcond::Command::El;
    else if (hessian->parsed()) cmd = varcond::Command::Hessian;
    else if (classify->parsed()) cmd = varcond::Command::Classify;
    else if (verify->parsed()) cmd = varcond::Command::Verify;

    try {
        varcond::ProblemFile pf = varcond::load(cli.path);
        const varcond::RunResult res = varcond::run(cmd, std::move(pf), cli.opts);
        std::cout << res.output;
        return res.exit_code;
    } catch (const varcond::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return varcond::kExitUsage;
    } catch (const varcond::FileError& e) {
        std::cerr << "error: " << cli.path << ": " << e.what() << "\n";
        return varcond::kExitUsage;
    } catch (const varcond::ArityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return varcond::kExitUsage;
    } catch (const varcond::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return varcond::kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return varcond::kExitNumeric;
    }
}
