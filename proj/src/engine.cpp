#include "bornchain/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "bornchain/analytic.hpp"

namespace bornchain {

namespace {

constexpr std::int64_t kMaxStepsFloor = 1'000'000;

struct TrialOutcome {
    EvolutionResult result;
    std::int64_t null_steps = 0;
};

// Draw-and-transfer core shared by step() and the trial loop; the caller owns
// the selection buffer so trials run allocation free.
TransactionOutcome step_with_buffer(IntensityState& state, const TransitionModel& model,
                                    Rng& rng, std::vector<double>& selection) {
    probabilities_into(model, state, selection);
    TransactionOutcome outcome;
    outcome.donor = draw_index(selection, rng.next_u01());
    outcome.recipient = draw_index(selection, rng.next_u01());
    outcome.is_null = outcome.donor == outcome.recipient;
    if (!outcome.is_null) {
        --state.a[static_cast<std::size_t>(outcome.donor)];
        ++state.a[static_cast<std::size_t>(outcome.recipient)];
    }
    return outcome;
}

// Shared trial loop. In absorption mode `step_budget` is the guard; in
// partial mode it is the exact number of steps to execute.
TrialOutcome run_trial(IntensityState state, const TransitionModel& model, SeedSpec seed,
                       std::int64_t step_budget, bool partial, bool track_changes) {
    TrialOutcome trial;
    EvolutionResult& result = trial.result;
    if (track_changes) result.change_counts.assign(state.a.size(), 0);

    Rng rng(seed);
    std::vector<double> selection;
    int pure = state.pure_index();

    while (result.total_steps < step_budget && pure < 0) {
        const TransactionOutcome outcome = step_with_buffer(state, model, rng, selection);
        ++result.total_steps;
        if (outcome.is_null) {
            ++trial.null_steps;
            continue;
        }
        ++result.nontrivial_steps;
        if (track_changes) {
            ++result.change_counts[static_cast<std::size_t>(outcome.donor)];
            ++result.change_counts[static_cast<std::size_t>(outcome.recipient)];
        }
        if (state.a[static_cast<std::size_t>(outcome.recipient)] == state.total) {
            pure = outcome.recipient;
        }
    }

    if (partial && result.total_steps < step_budget) {
        // A pure state only exchanges with itself; the remaining steps are
        // null by construction and need no draws.
        trial.null_steps += step_budget - result.total_steps;
        result.total_steps = step_budget;
    }

    result.finished = pure >= 0;
    result.winner = pure;
    result.final_state = std::move(state);
    return trial;
}

}  // namespace

TransactionOutcome step(IntensityState& state, const TransitionModel& model, Rng& rng) {
    std::vector<double> selection;
    return step_with_buffer(state, model, rng, selection);
}

std::int64_t default_max_steps(const IntensityState& state, const TransitionModel& model) {
    const double predicted = analytic::mean_total_steps(state, model);
    const double guard = std::ceil(100.0 * predicted);
    if (guard >= 9e18) return std::int64_t{9'000'000'000'000'000'000};
    return std::max<std::int64_t>(kMaxStepsFloor, static_cast<std::int64_t>(guard));
}

EvolutionResult evolve(IntensityState state, const TransitionModel& model, SeedSpec seed,
                       std::int64_t max_steps) {
    if (max_steps <= 0) {
        throw std::invalid_argument("max_steps must be positive");
    }
    return run_trial(std::move(state), model, seed, max_steps, false, true).result;
}

IntensityState evolve_partial(IntensityState state, const TransitionModel& model, SeedSpec seed,
                              std::int64_t steps) {
    if (steps < 0) {
        throw std::invalid_argument("step count must be nonnegative");
    }
    return run_trial(std::move(state), model, seed, steps, true, false).result.final_state;
}

EnsembleResult run_ensemble(const IntensityState& start, const TransitionModel& model,
                            const EnsembleOptions& options) {
    if (options.trials < 1) {
        throw std::invalid_argument("trials must be at least 1");
    }
    if (options.mode == RunMode::Partial && options.partial_steps < 0) {
        throw std::invalid_argument("partial step count must be nonnegative");
    }

    const bool partial = options.mode == RunMode::Partial;
    const std::int64_t step_budget =
        partial ? options.partial_steps
                : (options.max_steps > 0 ? options.max_steps : default_max_steps(start, model));

    const auto trials = static_cast<std::size_t>(options.trials);
    const std::size_t components = start.components();

    std::vector<TrialRecord> records(trials);
    std::vector<std::int64_t> null_steps(trials);
    std::vector<std::vector<std::int64_t>> finals;
    if (partial) finals.resize(trials);

    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            TrialOutcome trial = run_trial(start, model, {options.master_seed, t}, step_budget,
                                           partial, false);
            records[t].winner = trial.result.finished ? trial.result.winner : -1;
            records[t].total_steps = trial.result.total_steps;
            records[t].nontrivial_steps = trial.result.nontrivial_steps;
            null_steps[t] = trial.null_steps;
            if (partial) finals[t] = std::move(trial.result.final_state.a);
        }
    };

    const int thread_count = std::max(1, options.threads);
    if (thread_count == 1 || trials < 2) {
        worker(0, trials);
    } else {
        std::vector<std::thread> pool;
        const std::size_t block = (trials + static_cast<std::size_t>(thread_count) - 1) /
                                  static_cast<std::size_t>(thread_count);
        for (int w = 0; w < thread_count; ++w) {
            const std::size_t begin = static_cast<std::size_t>(w) * block;
            const std::size_t end = std::min(trials, begin + block);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& thread : pool) thread.join();
    }

    // Deterministic reduction in trial order, independent of scheduling.
    EnsembleResult output;
    stats::EnsembleSummary& summary = output.summary;
    summary.trials = options.trials;
    summary.winner_counts.assign(components, 0);

    for (std::size_t t = 0; t < trials; ++t) {
        if (records[t].winner >= 0) {
            ++summary.winner_counts[static_cast<std::size_t>(records[t].winner)];
        } else {
            ++summary.unfinished;
        }
        summary.total_steps_sum += records[t].total_steps;
        summary.null_steps_sum += null_steps[t];
    }
    summary.null_fraction =
        summary.total_steps_sum > 0
            ? static_cast<double>(summary.null_steps_sum) / static_cast<double>(summary.total_steps_sum)
            : 0.0;

    const double n = static_cast<double>(trials);
    double total_mean = 0.0;
    double nontrivial_mean = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        total_mean += static_cast<double>(records[t].total_steps);
        nontrivial_mean += static_cast<double>(records[t].nontrivial_steps);
    }
    total_mean /= n;
    nontrivial_mean /= n;
    summary.step_mean = total_mean;
    summary.nontrivial_mean = nontrivial_mean;
    if (trials > 1) {
        double total_ss = 0.0;
        double nontrivial_ss = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const double dt = static_cast<double>(records[t].total_steps) - total_mean;
            const double dn = static_cast<double>(records[t].nontrivial_steps) - nontrivial_mean;
            total_ss += dt * dt;
            nontrivial_ss += dn * dn;
        }
        summary.step_variance = total_ss / (n - 1.0);
        summary.nontrivial_variance = nontrivial_ss / (n - 1.0);
    }

    if (partial) {
        summary.final_intensity_mean.assign(components, 0.0);
        summary.final_intensity_variance.assign(components, 0.0);
        for (std::size_t t = 0; t < trials; ++t) {
            ++summary.final_state_counts[finals[t]];
            for (std::size_t i = 0; i < components; ++i) {
                summary.final_intensity_mean[i] += static_cast<double>(finals[t][i]);
            }
        }
        for (std::size_t i = 0; i < components; ++i) summary.final_intensity_mean[i] /= n;
        if (trials > 1) {
            for (std::size_t t = 0; t < trials; ++t) {
                for (std::size_t i = 0; i < components; ++i) {
                    const double d =
                        static_cast<double>(finals[t][i]) - summary.final_intensity_mean[i];
                    summary.final_intensity_variance[i] += d * d;
                }
            }
            for (std::size_t i = 0; i < components; ++i) {
                summary.final_intensity_variance[i] /= (n - 1.0);
            }
        }
    }

    if (options.keep_trial_records) {
        output.records = std::move(records);
    }
    return output;
}

}  // namespace bornchain
