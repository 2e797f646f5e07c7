#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bornchain/cli.hpp"
#include "bornchain/errors.hpp"

namespace {

struct Invocation {
    std::string config_path;
    bornchain::cli::CommandOptions options;
};

void add_common_flags(CLI::App* command, Invocation& invocation) {
    command->add_option("--config", invocation.config_path, "experiment config (JSON)")
        ->required();
    command->add_option("--out", invocation.options.out_override,
                        "output path prefix (overrides config \"out\")");
    command->add_option("--threads", invocation.options.threads,
                        "worker threads; affects speed only, never results")
        ->check(CLI::PositiveNumber);
    command->add_flag("--check", invocation.options.check,
                      "apply statistical acceptance thresholds (exit 4 on failure)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bornchain: serial intensity-exchange measurement model — "
                 "simulator, exact chain solver, and closed-form predictions"};
    app.require_subcommand(1);

    Invocation invocation;
    CLI::App* run = app.add_subcommand("run", "Monte Carlo ensemble run");
    CLI::App* predict = app.add_subcommand("predict", "closed-form predictions");
    CLI::App* oracle = app.add_subcommand("oracle", "exact chain solution over all states");
    CLI::App* validate =
        app.add_subcommand("validate-model", "exhaustive model admissibility check");
    for (CLI::App* command : {run, predict, oracle, validate}) {
        add_common_flags(command, invocation);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const bornchain::cli::ExperimentConfig config =
            bornchain::cli::load_config(invocation.config_path);
        if (run->parsed()) return bornchain::cli::cmd_run(config, invocation.options);
        if (predict->parsed()) return bornchain::cli::cmd_predict(config, invocation.options);
        if (oracle->parsed()) return bornchain::cli::cmd_oracle(config, invocation.options);
        if (validate->parsed()) {
            return bornchain::cli::cmd_validate_model(config, invocation.options);
        }
    } catch (const bornchain::guard_error& e) {
        std::cerr << "guard refusal: " << e.what() << "\n";
        return bornchain::cli::kGuardRefusal;
    } catch (const bornchain::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return bornchain::cli::kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bornchain::cli::kFailure;
    }
    return bornchain::cli::kOk;
}
