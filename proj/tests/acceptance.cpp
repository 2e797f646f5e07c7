// Acceptance suite: every release gate in one binary, one [PASS]/[FAIL] line
// per criterion. Run with no arguments for the full gate or with a criterion
// number (1..9) for a single check. Exit status 0 only when everything holds.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bornchain/analytic.hpp"
#include "bornchain/cli.hpp"
#include "bornchain/engine.hpp"
#include "bornchain/model.hpp"
#include "bornchain/oracle.hpp"
#include "bornchain/stats.hpp"

using namespace bornchain;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kAcceptanceSeed = 20250810;

double elapsed_seconds(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

int worker_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 4u));
}

std::vector<double> quadratic_table(std::int64_t total) {
    std::vector<double> weights(static_cast<std::size_t>(total) + 1, 0.0);
    for (std::size_t a = 1; a < weights.size(); ++a) {
        weights[a] = static_cast<double>(a) * static_cast<double>(a);
    }
    return weights;
}

// The admissible family exercised throughout: equal weights, proportional
// weights, and a configuration-sensitive nonlinear rule.
TransitionModel model_for(int which, std::int64_t total) {
    switch (which) {
        case 0: return TransitionModel::uniform();
        case 1: return TransitionModel::linear();
        default: return TransitionModel::custom(quadratic_table(total));
    }
}

const char* model_name(int which) {
    switch (which) {
        case 0: return "uniform";
        case 1: return "linear";
        default: return "w(a)=a^2";
    }
}

// 1. Exact absorption probabilities equal the intensity shares for the whole
//    model family, two and three components, totals up to 10.
bool criterion_born_exact(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int which = 0; which < 3; ++which) {
        for (int components = 2; components <= 3; ++components) {
            for (std::int64_t total = 1; total <= 10; ++total) {
                const oracle::StateSpace space = oracle::enumerate_states(components, total);
                const TransitionModel model = model_for(which, total);
                const Eigen::MatrixXd absorb =
                    oracle::absorption_probabilities(oracle::build_chain(model, space), space);
                for (std::size_t s = 0; s < space.size(); ++s) {
                    for (int i = 0; i < components; ++i) {
                        const double share =
                            static_cast<double>(space.states[s][static_cast<std::size_t>(i)]) /
                            static_cast<double>(total);
                        worst = std::max(
                            worst,
                            std::abs(absorb(static_cast<Eigen::Index>(s), i) - share));
                    }
                }
            }
        }
    }
    const double seconds = elapsed_seconds(start);
    std::ostringstream os;
    os << "max |absorb - a/N| = " << worst << " over M in {2,3}, N <= 10, three models; "
       << seconds << " s";
    detail = os.str();
    return worst <= 1e-9 && seconds < 30.0;
}

// 2. Two-component absorption probabilities are linear in the count for every
//    model: vanishing second differences up to N = 30.
bool criterion_p_independence(std::string& detail) {
    double worst = 0.0;
    for (int which = 0; which < 3; ++which) {
        for (std::int64_t total = 1; total <= 30; ++total) {
            const oracle::StateSpace space = oracle::enumerate_states(2, total);
            const TransitionModel model = model_for(which, total);
            const Eigen::MatrixXd absorb =
                oracle::absorption_probabilities(oracle::build_chain(model, space), space);
            worst = std::max(worst, oracle::second_difference_check(absorb, space));
        }
    }
    std::ostringstream os;
    os << "max second difference = " << worst << " for N <= 30, three models";
    detail = os.str();
    return worst <= 1e-9;
}

// 3. Uniform two-component mean completion time equals 2 a (N - a) exactly.
bool criterion_uniform_steps(std::string& detail) {
    double worst = 0.0;
    for (std::int64_t total = 1; total <= 20; ++total) {
        const oracle::StateSpace space = oracle::enumerate_states(2, total);
        const Eigen::VectorXd expected = oracle::expected_steps(
            oracle::build_chain(TransitionModel::uniform(), space), space, true);
        for (std::int64_t a = 0; a <= total; ++a) {
            const double target = static_cast<double>(2 * a * (total - a));
            const double actual =
                expected(static_cast<Eigen::Index>(space.index_of({a, total - a})));
            const double scale = std::max(1.0, std::abs(target));
            worst = std::max(worst, std::abs(actual - target) / scale);
        }
    }
    std::ostringstream os;
    os << "max relative error vs 2a(N-a) = " << worst << " for N <= 20";
    detail = os.str();
    return worst <= 1e-8;
}

// 4. The summed closed form agrees with exact hitting times for the linear
//    and quadratic rules.
bool criterion_closed_form_consistency(std::string& detail) {
    double worst = 0.0;
    for (int which = 1; which < 3; ++which) {
        for (std::int64_t total = 2; total <= 20; ++total) {
            const oracle::StateSpace space = oracle::enumerate_states(2, total);
            const TransitionModel model = model_for(which, total);
            const Eigen::VectorXd expected =
                oracle::expected_steps(oracle::build_chain(model, space), space, true);
            for (std::int64_t a = 0; a <= total; ++a) {
                const double target = analytic::mean_steps_single(model, a, total);
                const double actual =
                    expected(static_cast<Eigen::Index>(space.index_of({a, total - a})));
                const double scale = std::max(1.0, std::abs(target));
                worst = std::max(worst, std::abs(actual - target) / scale);
            }
        }
    }
    std::ostringstream os;
    os << "max relative error of summed closed form vs exact = " << worst
       << " (linear, w(a)=a^2, N <= 20)";
    detail = os.str();
    return worst <= 1e-8;
}

// 5. Expected intensity-changing steps equal sum_{i<j} a_i a_j for every
//    model and state, with the documented maximum at the equal split.
bool criterion_nontrivial_steps(std::string& detail) {
    double worst = 0.0;
    double worst_max_gap = 0.0;
    for (int which = 0; which < 3; ++which) {
        for (int components = 2; components <= 3; ++components) {
            for (std::int64_t total = 1; total <= 10; ++total) {
                const oracle::StateSpace space = oracle::enumerate_states(components, total);
                const TransitionModel model = model_for(which, total);
                const Eigen::VectorXd nontrivial = oracle::expected_steps(
                    oracle::build_chain(model, space), space, false);
                const double cap = analytic::max_nontrivial(components, total);
                double observed_max = 0.0;
                for (std::size_t s = 0; s < space.size(); ++s) {
                    IntensityState state;
                    state.a = space.states[s];
                    state.total = total;
                    const double target = analytic::mean_nontrivial_steps(state);
                    const double actual = nontrivial(static_cast<Eigen::Index>(s));
                    worst = std::max(worst, std::abs(actual - target));
                    observed_max = std::max(observed_max, actual);
                    if (actual > cap + 1e-8) {
                        detail = "state exceeds the theoretical maximum";
                        return false;
                    }
                }
                if (total % components == 0) {
                    const std::vector<std::int64_t> equal(
                        static_cast<std::size_t>(components), total / components);
                    const double at_equal =
                        nontrivial(static_cast<Eigen::Index>(space.index_of(equal)));
                    worst_max_gap = std::max(worst_max_gap, std::abs(at_equal - cap));
                }
            }
        }
    }
    std::ostringstream os;
    os << "max |nontrivial - sum a_i a_j| = " << worst
       << "; max |equal-split - (M-1)N^2/2M| = " << worst_max_gap;
    detail = os.str();
    return worst <= 1e-8 && worst_max_gap <= 1e-8;
}

// 6. Monte Carlo winner frequencies reproduce the intensity share for the
//    proportional rule at (6, 14).
bool criterion_statistical_born(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    EnsembleOptions options;
    options.trials = 200000;
    options.master_seed = kAcceptanceSeed;
    options.threads = worker_threads();
    const EnsembleResult result =
        run_ensemble(IntensityState::of({6, 14}), TransitionModel::linear(), options);
    const auto& summary = result.summary;
    const double seconds = elapsed_seconds(start);

    const std::int64_t finished = summary.trials - summary.unfinished;
    if (finished == 0) {
        detail = "no finished trials";
        return false;
    }
    const auto [lo, hi] =
        stats::proportion_interval(summary.winner_counts[0], finished, 0.999);
    const stats::GoodnessOfFit fit =
        stats::chi_square_gof(summary.winner_counts, {0.3, 0.7}, finished);

    std::ostringstream os;
    os << "winner-1 frequency = "
       << static_cast<double>(summary.winner_counts[0]) / static_cast<double>(finished)
       << ", 99.9% interval [" << lo << ", " << hi << "] vs 0.3, chi-square p = " << fit.p_value
       << ", unfinished = " << summary.unfinished << "; " << seconds << " s";
    detail = os.str();
    return lo <= 0.3 && 0.3 <= hi && fit.p_value > 0.001 && summary.unfinished == 0 &&
           seconds < 60.0;
}

// 7. Monte Carlo step counts land on the closed forms for uniform (3, 7):
//    total 42, nontrivial 21, null fraction one half.
bool criterion_statistical_steps(std::string& detail) {
    EnsembleOptions options;
    options.trials = 100000;
    options.master_seed = kAcceptanceSeed;
    options.threads = worker_threads();
    const EnsembleResult result =
        run_ensemble(IntensityState::of({3, 7}), TransitionModel::uniform(), options);
    const auto& summary = result.summary;

    const double z_total = stats::mean_z_test(summary.step_mean,
                                              std::sqrt(summary.step_variance),
                                              summary.trials, 42.0);
    const double z_nontrivial = stats::mean_z_test(summary.nontrivial_mean,
                                                   std::sqrt(summary.nontrivial_variance),
                                                   summary.trials, 21.0);
    // Null indicators are fair coin flips here, so the pooled step count
    // carries a binomial standard error.
    const double null_se = std::sqrt(0.25 / static_cast<double>(summary.total_steps_sum));
    const double null_gap = summary.null_fraction - 0.5;

    std::ostringstream os;
    os << "z(total vs 42) = " << z_total << ", z(nontrivial vs 21) = " << z_nontrivial
       << ", null fraction = " << summary.null_fraction << " (" << null_gap / null_se
       << " SE from 1/2), unfinished = " << summary.unfinished;
    detail = os.str();
    return std::abs(z_total) <= 3.0 && std::abs(z_nontrivial) <= 3.0 &&
           std::abs(null_gap) <= 3.0 * null_se && summary.unfinished == 0;
}

// 8. Interrupted evolution conserves the mean intensity: linear rule from
//    (10, 10), fifty steps.
bool criterion_partial_martingale(std::string& detail) {
    EnsembleOptions options;
    options.trials = 100000;
    options.master_seed = kAcceptanceSeed;
    options.mode = RunMode::Partial;
    options.partial_steps = 50;
    options.threads = worker_threads();
    const EnsembleResult result =
        run_ensemble(IntensityState::of({10, 10}), TransitionModel::linear(), options);
    const auto& summary = result.summary;

    const double se = std::sqrt(summary.final_intensity_variance[0] /
                                static_cast<double>(summary.trials));
    const double gap = summary.final_intensity_mean[0] - 10.0;
    const std::size_t mixed_finals = summary.final_state_counts.size();

    std::ostringstream os;
    os << "mean a_1 after 50 steps = " << summary.final_intensity_mean[0] << " (" << gap / se
       << " SE from 10), distinct final states = " << mixed_finals;
    detail = os.str();
    return std::abs(gap) <= 3.0 * se && mixed_finals > 1;
}

// 9. Identical config and seed give byte-identical outputs whatever the
//    thread count.
bool criterion_determinism(std::string& detail) {
    static std::mt19937_64 salt(std::random_device{}());
    const fs::path dir =
        fs::temp_directory_path() / ("bornchain-acceptance-" + std::to_string(salt()));
    fs::create_directories(dir);

    nlohmann::json doc = {{"model", "linear"}, {"a", {3, 7}},  {"trials", 20000},
                          {"seed", kAcceptanceSeed}, {"per_trial_csv", true}};
    const cli::ExperimentConfig config = cli::parse_config(doc.dump());

    auto read_file = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    };

    cli::CommandOptions single;
    single.threads = 1;
    single.out_override = (dir / "one").string();
    cli::CommandOptions quad;
    quad.threads = 4;
    quad.out_override = (dir / "four").string();

    bool ok = cli::cmd_run(config, single) == cli::kOk &&
              cli::cmd_run(config, quad) == cli::kOk;
    const std::string csv_one = read_file(dir / "one.trials.csv");
    const std::string csv_four = read_file(dir / "four.trials.csv");
    const std::string json_one = read_file(dir / "one.summary.json");
    const std::string json_four = read_file(dir / "four.summary.json");
    ok = ok && !csv_one.empty() && csv_one == csv_four && !json_one.empty() &&
         json_one == json_four;

    std::ostringstream os;
    os << "CSV bytes " << csv_one.size() << " vs " << csv_four.size() << ", JSON bytes "
       << json_one.size() << " vs " << json_four.size() << ", threads 1 vs 4";
    detail = os.str();
    fs::remove_all(dir);
    return ok;
}

struct Criterion {
    int id;
    const char* title;
    std::function<bool(std::string&)> run;
};

const Criterion kCriteria[] = {
    {1, "Born rule, exact chain solution", criterion_born_exact},
    {2, "absorption independent of the selection rule", criterion_p_independence},
    {3, "uniform mean steps closed form", criterion_uniform_steps},
    {4, "summed closed form vs exact hitting times", criterion_closed_form_consistency},
    {5, "expected nontrivial steps and their maximum", criterion_nontrivial_steps},
    {6, "statistical Born rule at (6,14)", criterion_statistical_born},
    {7, "statistical step counts at (3,7)", criterion_statistical_steps},
    {8, "partial evolution conserves mean intensity", criterion_partial_martingale},
    {9, "byte-identical outputs across thread counts", criterion_determinism},
};

}  // namespace

int main(int argc, char** argv) {
    int selected = 0;
    if (argc > 1) {
        selected = std::atoi(argv[1]);
        if (selected < 1 || selected > 9) {
            std::fprintf(stderr, "usage: %s [criterion 1..9]\n", argv[0]);
            return 2;
        }
    }

    int failures = 0;
    for (const Criterion& criterion : kCriteria) {
        if (selected != 0 && criterion.id != selected) continue;
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %d: %s — %s\n", ok ? "PASS" : "FAIL", criterion.id,
                    criterion.title, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
