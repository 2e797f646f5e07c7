#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bornchain/model.hpp"
#include "bornchain/state.hpp"

namespace bornchain::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,       // I/O or internal errors
    kConfigError = 2,
    kGuardRefusal = 3,
    kCheckFailure = 4,  // statistical acceptance thresholds not met
};

/// A fully resolved experiment description. Parsed from strict JSON: unknown
/// keys are rejected, missing required keys are reported together.
struct ExperimentConfig {
    std::string model_kind;    // "uniform" | "linear" | "custom"
    std::string weights_path;  // required for custom models
    std::vector<std::int64_t> a;
    std::int64_t trials = 0;   // required by `run`
    std::uint64_t seed = 0;
    std::string mode = "absorb";  // "absorb" | "partial"
    std::int64_t k = 0;           // steps per trial in partial mode
    std::int64_t max_steps = 0;   // 0 = engine default guard
    std::string out;              // output path prefix ("" = stdout summary)
    bool per_trial_csv = false;

    std::int64_t total() const;
    IntensityState state() const { return IntensityState::of(a); }
};

/// Parses and validates a config document. Throws config_error with every
/// missing required key listed in one message.
ExperimentConfig parse_config(const std::string& json_text);

/// parse_config() on the contents of a file, then applies the BORNCHAIN_SEED
/// environment override if set.
ExperimentConfig load_config(const std::string& path);

/// Overrides config.seed from the BORNCHAIN_SEED environment variable when it
/// is set. Returns true if an override was applied; throws config_error on an
/// unparsable value.
bool apply_seed_env(ExperimentConfig& config);

/// Instantiates the transition model named by the config, loading the weight
/// table for custom models. `unchecked` skips admissibility rejection so that
/// validate-model can report violations instead.
TransitionModel model_from_config(const ExperimentConfig& config, bool unchecked = false);

struct CommandOptions {
    std::string out_override;  // --out
    int threads = 1;           // --threads
    bool check = false;        // --check
};

/// Ensemble run: writes `<out>.summary.json` (or stdout) and, when requested,
/// `<out>.trials.csv` with per-trial rows `trial,winner,total_steps,
/// nontrivial_steps` (winner is 1-based; 0 marks an unfinished trial).
int cmd_run(const ExperimentConfig& config, const CommandOptions& options);

/// Closed-form predictions for the configured state and model.
int cmd_predict(const ExperimentConfig& config, const CommandOptions& options);

/// Exact chain solution: writes `<out>.oracle.csv` with one row per state
/// (`state,absorb_1..absorb_M,expected_total,expected_nontrivial`, doubles at
/// 17 significant digits) plus `<out>.oracle.json` with residual diagnostics.
int cmd_oracle(const ExperimentConfig& config, const CommandOptions& options);

/// Exhaustive admissibility check of the configured model; exit kOk when
/// valid, kCheckFailure when violations are found.
int cmd_validate_model(const ExperimentConfig& config, const CommandOptions& options);

}  // namespace bornchain::cli
