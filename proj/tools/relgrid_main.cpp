// Command-line front end: evaluate | vqe | sweep, each driven by a JSON
// config. Prints a one-line summary on success; on failure prints a
// machine-readable error object to stderr and exits 2 (bad config),
// 3 (computation failed) or 4 (I/O failed).

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "relgrid/errors.hpp"
#include "relgrid/run.hpp"
#include "relgrid/version.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::optional<long long> seed;
    std::optional<int> workers;
    bool oracle_check = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Path to the JSON run configuration")
        ->required();
    cmd->add_option("--out", args.out_path,
                    "Path for the JSON result (falls back to 'output' in the config)");
    cmd->add_option("--seed", args.seed, "Override the RNG seed from the config");
    cmd->add_option("--workers", args.workers, "Override the worker count from the config");
    cmd->add_flag("--oracle-check", args.oracle_check,
                  "Attach a dense-solver comparison block to the result");
}

int execute(relgrid::Task task, const CommonArgs& args) {
    const nlohmann::json doc = relgrid::load_config_file(args.config_path);
    relgrid::RunConfig rc = relgrid::parse_run_config(doc, task);
    if (args.seed) {
        if (*args.seed < 0) throw relgrid::ConfigError("--seed must be >= 0");
        rc.seed = static_cast<std::uint64_t>(*args.seed);
    }
    if (args.workers) {
        if (*args.workers < 0) throw relgrid::ConfigError("--workers must be >= 0");
        rc.workers = *args.workers;
    }
    if (args.oracle_check) rc.oracle_check = true;

    const std::string out_path = !args.out_path.empty() ? args.out_path : rc.output;
    if (out_path.empty()) {
        throw relgrid::ConfigError("no output path: pass --out or set 'output' in the config");
    }

    const relgrid::RunOutcome outcome = relgrid::run(rc);
    relgrid::write_outcome(outcome, out_path);
    std::cout << outcome.summary << "\n";
    return 0;
}

void print_error(const char* type, const std::exception& e) {
    const nlohmann::json err{{"error", {{"type", type}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid-based energy estimation for a particle on 2^L points"};
    app.set_version_flag("--version", std::string(relgrid::kVersion));
    app.require_subcommand(1);

    CommonArgs evaluate_args, vqe_args, sweep_args;
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "Energy breakdown of a fixed state fixture");
    add_common(evaluate, evaluate_args);
    CLI::App* vqe = app.add_subcommand("vqe", "Variational ground-state search");
    add_common(vqe, vqe_args);
    CLI::App* sweep =
        app.add_subcommand("sweep", "Evaluate along one configuration axis, with CSV output");
    add_common(sweep, sweep_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (evaluate->parsed()) return execute(relgrid::Task::Evaluate, evaluate_args);
        if (vqe->parsed()) return execute(relgrid::Task::Vqe, vqe_args);
        return execute(relgrid::Task::Sweep, sweep_args);
    } catch (const relgrid::ConfigError& e) {
        print_error("config_invalid", e);
        return 2;
    } catch (const relgrid::IoError& e) {
        print_error("io_error", e);
        return 4;
    } catch (const std::exception& e) {
        print_error("compute_error", e);
        return 3;
    }
}
