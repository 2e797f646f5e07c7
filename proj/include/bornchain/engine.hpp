#pragma once

#include <cstdint>
#include <vector>

#include "bornchain/model.hpp"
#include "bornchain/rng.hpp"
#include "bornchain/state.hpp"
#include "bornchain/stats.hpp"

namespace bornchain {

/// One elementary exchange. Null when donor and recipient coincide, in which
/// case the configuration is unchanged.
struct TransactionOutcome {
    int donor = -1;
    int recipient = -1;
    bool is_null = false;
};

/// Applies one elementary exchange in place. Donor and recipient are drawn
/// independently (donor first) from the selection distribution of the
/// pre-transaction configuration; when they differ one unit moves from donor
/// to recipient. The intensity total is conserved and empty components are
/// never selected.
TransactionOutcome step(IntensityState& state, const TransitionModel& model, Rng& rng);

/// Outcome of a single trial. When `finished` is false the guard was hit (or,
/// for partial runs, the state is still mixed) and `final_state` carries the
/// configuration reached so far.
struct EvolutionResult {
    bool finished = false;
    int winner = -1;
    std::int64_t total_steps = 0;
    std::int64_t nontrivial_steps = 0;
    /// Per component, the number of steps that changed that component; each
    /// nontrivial step changes exactly two.
    std::vector<std::int64_t> change_counts;
    IntensityState final_state;
};

/// Termination guard used when no explicit bound is given: 100x the predicted
/// mean step count for this state and model, floored at one million.
std::int64_t default_max_steps(const IntensityState& state, const TransitionModel& model);

/// Runs the exchange process until one component holds the full intensity or
/// `max_steps` is exceeded. A state that is already pure finishes in zero
/// steps.
EvolutionResult evolve(IntensityState state, const TransitionModel& model, SeedSpec seed,
                       std::int64_t max_steps);

/// Interrupted evolution: applies exactly `steps` elementary exchanges (null
/// steps included) and returns the resulting, possibly mixed, configuration.
IntensityState evolve_partial(IntensityState state, const TransitionModel& model, SeedSpec seed,
                              std::int64_t steps);

enum class RunMode { ToAbsorption, Partial };

struct EnsembleOptions {
    std::int64_t trials = 1;
    std::uint64_t master_seed = 0;
    RunMode mode = RunMode::ToAbsorption;
    /// Steps per trial in partial mode.
    std::int64_t partial_steps = 0;
    /// 0 selects default_max_steps() (absorption mode only).
    std::int64_t max_steps = 0;
    /// Worker threads; affects wall time only, never results.
    int threads = 1;
    /// Retain one record per trial (for per-trial CSV output).
    bool keep_trial_records = false;
};

/// One per-trial row. winner is -1 when the trial did not reach a pure state.
struct TrialRecord {
    std::int32_t winner = -1;
    std::int64_t total_steps = 0;
    std::int64_t nontrivial_steps = 0;
};

struct EnsembleResult {
    stats::EnsembleSummary summary;
    std::vector<TrialRecord> records;  // only with keep_trial_records
};

/// Runs `trials` independent trials. Trial t uses the stream
/// (master_seed, t), and aggregation is performed in trial order, so the
/// result is identical for any thread count.
EnsembleResult run_ensemble(const IntensityState& start, const TransitionModel& model,
                            const EnsembleOptions& options);

}  // namespace bornchain
