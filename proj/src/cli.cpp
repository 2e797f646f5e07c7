#include "bornchain/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "bornchain/analytic.hpp"
#include "bornchain/engine.hpp"
#include "bornchain/errors.hpp"
#include "bornchain/oracle.hpp"
#include "bornchain/rng.hpp"
#include "bornchain/stats.hpp"

namespace bornchain::cli {

namespace {

using nlohmann::json;

const char* kKnownKeys[] = {"model", "weights", "a",        "trials",       "seed", "mode",
                            "k",     "max_steps", "out",    "per_trial_csv"};

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

json config_to_json(const ExperimentConfig& config) {
    json out;
    out["model"] = config.model_kind;
    if (!config.weights_path.empty()) out["weights"] = config.weights_path;
    out["a"] = config.a;
    out["trials"] = config.trials;
    out["seed"] = config.seed;
    out["mode"] = config.mode;
    if (config.mode == "partial") out["k"] = config.k;
    out["max_steps"] = config.max_steps;
    if (!config.out.empty()) out["out"] = config.out;
    out["per_trial_csv"] = config.per_trial_csv;
    return out;
}

std::string output_prefix(const ExperimentConfig& config, const CommandOptions& options) {
    return options.out_override.empty() ? config.out : options.out_override;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file for writing: " + path);
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

void emit_json(const json& document, const std::string& path) {
    const std::string text = document.dump(2) + "\n";
    if (path.empty()) {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

struct CheckResult {
    json report = json::array();
    bool passed = true;

    void add(const std::string& name, double value, const std::string& requirement, bool ok) {
        report.push_back({{"name", name}, {"value", value}, {"requirement", requirement},
                          {"passed", ok}});
        passed = passed && ok;
    }
};

}  // namespace

std::int64_t ExperimentConfig::total() const {
    return std::accumulate(a.begin(), a.end(), std::int64_t{0});
}

ExperimentConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw config_error("config must be a JSON object");
    }

    for (const auto& [key, value] : doc.items()) {
        (void)value;
        bool known = false;
        for (const char* candidate : kKnownKeys) {
            if (key == candidate) { known = true; break; }
        }
        if (!known) {
            throw config_error("unknown config key \"" + key + "\"");
        }
    }

    ExperimentConfig config;

    if (doc.contains("model")) {
        if (!doc["model"].is_string()) throw config_error("\"model\" must be a string");
        config.model_kind = doc["model"].get<std::string>();
        if (config.model_kind != "uniform" && config.model_kind != "linear" &&
            config.model_kind != "custom") {
            throw config_error("\"model\" must be one of uniform, linear, custom");
        }
    }
    if (doc.contains("weights")) {
        if (!doc["weights"].is_string()) throw config_error("\"weights\" must be a file path");
        config.weights_path = doc["weights"].get<std::string>();
    }
    if (doc.contains("a")) {
        if (!doc["a"].is_array() || doc["a"].empty()) {
            throw config_error("\"a\" must be a nonempty array of integers");
        }
        for (const auto& entry : doc["a"]) {
            if (!entry.is_number_integer()) {
                throw config_error("\"a\" entries must be integers");
            }
            const auto value = entry.get<std::int64_t>();
            if (value < 0) {
                throw config_error("negative intensities rejected");
            }
            config.a.push_back(value);
        }
    }
    if (doc.contains("trials")) {
        if (!doc["trials"].is_number_integer() || doc["trials"].get<std::int64_t>() < 1) {
            throw config_error("\"trials\" must be a positive integer");
        }
        config.trials = doc["trials"].get<std::int64_t>();
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() ||
            (doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned() &&
             doc["seed"].get<std::int64_t>() < 0)) {
            throw config_error("\"seed\" must be a nonnegative integer");
        }
        config.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("mode")) {
        if (!doc["mode"].is_string()) throw config_error("\"mode\" must be a string");
        config.mode = doc["mode"].get<std::string>();
        if (config.mode != "absorb" && config.mode != "partial") {
            throw config_error("\"mode\" must be \"absorb\" or \"partial\"");
        }
    }
    if (doc.contains("k")) {
        if (!doc["k"].is_number_integer() || doc["k"].get<std::int64_t>() < 0) {
            throw config_error("\"k\" must be a nonnegative integer");
        }
        config.k = doc["k"].get<std::int64_t>();
    }
    if (doc.contains("max_steps")) {
        if (!doc["max_steps"].is_number_integer() || doc["max_steps"].get<std::int64_t>() < 1) {
            throw config_error("\"max_steps\" must be a positive integer");
        }
        config.max_steps = doc["max_steps"].get<std::int64_t>();
    }
    if (doc.contains("out")) {
        if (!doc["out"].is_string()) throw config_error("\"out\" must be a path");
        config.out = doc["out"].get<std::string>();
    }
    if (doc.contains("per_trial_csv")) {
        if (!doc["per_trial_csv"].is_boolean()) {
            throw config_error("\"per_trial_csv\" must be a boolean");
        }
        config.per_trial_csv = doc["per_trial_csv"].get<bool>();
    }

    // Every missing required key is reported in one message.
    std::vector<std::string> missing;
    if (!doc.contains("model")) missing.push_back("model");
    if (!doc.contains("a")) missing.push_back("a");
    if (config.model_kind == "custom" && config.weights_path.empty()) missing.push_back("weights");
    if (config.mode == "partial" && !doc.contains("k")) missing.push_back("k");
    if (!missing.empty()) {
        std::ostringstream message;
        message << "missing required config key(s): ";
        for (std::size_t i = 0; i < missing.size(); ++i) {
            if (i > 0) message << ", ";
            message << missing[i];
        }
        throw config_error(message.str());
    }

    if (!config.weights_path.empty() && config.model_kind != "custom") {
        throw config_error("\"weights\" applies to custom models only");
    }

    const std::int64_t total = config.total();
    if (total == 0) {
        throw config_error("zero total intensity");
    }
    if (total > kMaxIntensityTotal) {
        throw config_error("intensity total exceeds the supported maximum (2^31)");
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    ExperimentConfig config = parse_config(buffer.str());
    apply_seed_env(config);
    return config;
}

bool apply_seed_env(ExperimentConfig& config) {
    const char* value = std::getenv("BORNCHAIN_SEED");
    if (value == nullptr) return false;
    try {
        std::size_t pos = 0;
        const std::string text(value);
        const std::uint64_t seed = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        config.seed = seed;
    } catch (const std::exception&) {
        throw config_error(std::string("BORNCHAIN_SEED is not an unsigned integer: ") + value);
    }
    return true;
}

TransitionModel model_from_config(const ExperimentConfig& config, bool unchecked) {
    if (config.model_kind == "uniform") return TransitionModel::uniform();
    if (config.model_kind == "linear") return TransitionModel::linear();
    if (config.model_kind == "custom") {
        auto weights = load_weight_table(config.weights_path, config.total());
        return unchecked ? TransitionModel::custom_unchecked(std::move(weights))
                         : TransitionModel::custom(std::move(weights));
    }
    throw config_error("unknown model kind: " + config.model_kind);
}

int cmd_run(const ExperimentConfig& config, const CommandOptions& options) {
    if (config.trials < 1) {
        throw config_error("\"trials\" is required for run");
    }
    const std::string prefix = output_prefix(config, options);
    if (config.per_trial_csv && prefix.empty()) {
        throw config_error("per_trial_csv requires an output path (\"out\" or --out)");
    }

    const IntensityState start = config.state();
    const TransitionModel model = model_from_config(config);
    const bool partial = config.mode == "partial";

    EnsembleOptions ensemble;
    ensemble.trials = config.trials;
    ensemble.master_seed = config.seed;
    ensemble.mode = partial ? RunMode::Partial : RunMode::ToAbsorption;
    ensemble.partial_steps = config.k;
    ensemble.max_steps = config.max_steps;
    ensemble.threads = options.threads;
    ensemble.keep_trial_records = config.per_trial_csv;

    const EnsembleResult result = run_ensemble(start, model, ensemble);
    const stats::EnsembleSummary& summary = result.summary;
    const std::int64_t finished = summary.trials - summary.unfinished;

    ExperimentConfig resolved = config;
    if (!partial && resolved.max_steps == 0) {
        resolved.max_steps = default_max_steps(start, model);
    }

    const std::vector<double> born = analytic::born_probabilities(start);
    const analytic::StepPrediction prediction = analytic::predict_steps(start, model);

    json results;
    results["trials"] = summary.trials;
    results["unfinished"] = summary.unfinished;

    json winners = json::array();
    for (std::size_t i = 0; i < summary.winner_counts.size(); ++i) {
        json winner;
        winner["component"] = i + 1;
        winner["count"] = summary.winner_counts[i];
        if (finished > 0) {
            winner["frequency"] = static_cast<double>(summary.winner_counts[i]) /
                                  static_cast<double>(finished);
            const auto [lo, hi] =
                stats::proportion_interval(summary.winner_counts[i], finished, 0.95);
            winner["wilson_95"] = {lo, hi};
        }
        winners.push_back(winner);
    }
    results["winners"] = winners;
    results["total_steps"] = {{"mean", summary.step_mean}, {"variance", summary.step_variance}};
    results["nontrivial_steps"] = {{"mean", summary.nontrivial_mean},
                                   {"variance", summary.nontrivial_variance}};
    results["null_fraction"] = summary.null_fraction;

    results["predicted"] = {{"born", born},
                            {"mean_total_steps", prediction.total},
                            {"total_heuristic", prediction.heuristic},
                            {"mean_nontrivial_steps", prediction.nontrivial}};

    if (!partial && finished > 0 && born.size() >= 2) {
        for (double p : born) {
            if (p > 0.0 && p * static_cast<double>(finished) < 5.0) {
                std::cerr << "warning: expected winner count below 5; "
                             "chi-square approximation is weak\n";
                break;
            }
        }
        // Zero-intensity components can never win; restrict the fit to the
        // support of the prediction.
        std::vector<std::int64_t> observed;
        std::vector<double> expected;
        for (std::size_t i = 0; i < born.size(); ++i) {
            if (born[i] > 0.0) {
                observed.push_back(summary.winner_counts[i]);
                expected.push_back(born[i]);
            }
        }
        if (observed.size() >= 2) {
            const stats::GoodnessOfFit fit = stats::chi_square_gof(observed, expected, finished);
            results["born_gof"] = {{"statistic", fit.statistic},
                                   {"dof", fit.dof},
                                   {"p_value", fit.p_value}};
        }
    }

    if (partial) {
        results["final_intensity_mean"] = summary.final_intensity_mean;
        results["final_intensity_variance"] = summary.final_intensity_variance;
        json histogram = json::array();
        for (const auto& [state, count] : summary.final_state_counts) {
            histogram.push_back({{"state", state}, {"count", count}});
        }
        results["final_state_histogram"] = histogram;
    }

    json document;
    document["config"] = config_to_json(resolved);
    document["prng"] = kPrngId;
    document["results"] = results;

    int exit_code = kOk;
    if (options.check) {
        CheckResult check;
        if (!partial) {
            if (results.contains("born_gof")) {
                const double p = results["born_gof"]["p_value"].get<double>();
                check.add("born_gof_p_value", p, "> 0.001", p > 0.001);
            }
            if (summary.nontrivial_variance > 0.0) {
                const double z = stats::mean_z_test(summary.nontrivial_mean,
                                                    std::sqrt(summary.nontrivial_variance),
                                                    summary.trials, prediction.nontrivial);
                check.add("nontrivial_mean_z", z, "|z| <= 3", std::abs(z) <= 3.0);
            }
            if (start.components() == 2 && summary.step_variance > 0.0) {
                const double z = stats::mean_z_test(summary.step_mean,
                                                    std::sqrt(summary.step_variance),
                                                    summary.trials, prediction.total);
                check.add("total_mean_z", z, "|z| <= 3", std::abs(z) <= 3.0);
            }
        } else {
            for (std::size_t i = 0; i < start.components(); ++i) {
                const double variance = summary.final_intensity_variance[i];
                const double mean = summary.final_intensity_mean[i];
                const double target = static_cast<double>(start.a[i]);
                if (variance > 0.0) {
                    const double z = stats::mean_z_test(mean, std::sqrt(variance), summary.trials,
                                                        target);
                    check.add("final_intensity_z_" + std::to_string(i + 1), z, "|z| <= 3",
                              std::abs(z) <= 3.0);
                } else {
                    check.add("final_intensity_z_" + std::to_string(i + 1), mean - target,
                              "exact when degenerate", mean == target);
                }
            }
        }
        document["check"] = {{"passed", check.passed}, {"criteria", check.report}};
        if (!check.passed) exit_code = kCheckFailure;
    }

    if (config.per_trial_csv) {
        std::ostringstream csv;
        csv << "trial,winner,total_steps,nontrivial_steps\n";
        for (std::size_t t = 0; t < result.records.size(); ++t) {
            const TrialRecord& record = result.records[t];
            csv << t << ',' << (record.winner >= 0 ? record.winner + 1 : 0) << ','
                << record.total_steps << ',' << record.nontrivial_steps << '\n';
        }
        write_text_file(prefix + ".trials.csv", csv.str());
    }
    emit_json(document, prefix.empty() ? "" : prefix + ".summary.json");
    return exit_code;
}

int cmd_predict(const ExperimentConfig& config, const CommandOptions& options) {
    const IntensityState start = config.state();
    const TransitionModel model = model_from_config(config);

    const analytic::StepPrediction prediction = analytic::predict_steps(start, model);

    json results;
    results["born"] = analytic::born_probabilities(start);
    results["per_component_mean_steps"] = prediction.per_component;
    results["mean_total_steps"] = prediction.total;
    results["total_heuristic"] = prediction.heuristic;
    results["mean_nontrivial_steps"] = prediction.nontrivial;
    results["max_nontrivial"] = analytic::max_nontrivial(
        static_cast<int>(start.components()), start.total);

    json document;
    document["config"] = config_to_json(config);
    document["prng"] = kPrngId;
    document["results"] = results;

    const std::string prefix = output_prefix(config, options);
    emit_json(document, prefix.empty() ? "" : prefix + ".predict.json");
    return kOk;
}

int cmd_oracle(const ExperimentConfig& config, const CommandOptions& options) {
    const IntensityState start = config.state();
    const auto components = static_cast<int>(start.components());
    const std::int64_t total = start.total;

    const oracle::StateSpace space = oracle::enumerate_states(components, total);
    const TransitionModel model = model_from_config(config);
    const oracle::ChainSolution solution = oracle::solve_chain(model, space);

    std::ostringstream csv;
    csv << "state";
    for (int i = 1; i <= components; ++i) csv << ",absorb_" << i;
    csv << ",expected_total,expected_nontrivial\n";
    for (std::size_t s = 0; s < space.size(); ++s) {
        for (std::size_t i = 0; i < space.states[s].size(); ++i) {
            csv << (i > 0 ? ";" : "") << space.states[s][i];
        }
        for (int i = 0; i < components; ++i) {
            csv << ',' << format_double(solution.absorb(static_cast<Eigen::Index>(s), i));
        }
        csv << ',' << format_double(solution.expected_total(static_cast<Eigen::Index>(s)));
        csv << ',' << format_double(solution.expected_nontrivial(static_cast<Eigen::Index>(s)));
        csv << '\n';
    }

    // Residual of the exact solution against the intensity-share prediction.
    double max_born_error = 0.0;
    for (std::size_t s = 0; s < space.size(); ++s) {
        for (int i = 0; i < components; ++i) {
            const double share = static_cast<double>(space.states[s][static_cast<std::size_t>(i)]) /
                                 static_cast<double>(total);
            max_born_error = std::max(
                max_born_error,
                std::abs(solution.absorb(static_cast<Eigen::Index>(s), i) - share));
        }
    }

    json results;
    results["states"] = space.size();
    results["max_born_abs_error"] = max_born_error;
    if (components == 2) {
        results["second_difference_residual"] =
            oracle::second_difference_check(solution.absorb, space);
    }

    const std::size_t start_index = space.index_of(start.a);
    const analytic::StepPrediction prediction = analytic::predict_steps(start, model);
    const double exact_total = solution.expected_total(static_cast<Eigen::Index>(start_index));
    json initial;
    initial["state"] = start.a;
    {
        json absorb_row = json::array();
        for (int i = 0; i < components; ++i) {
            absorb_row.push_back(solution.absorb(static_cast<Eigen::Index>(start_index), i));
        }
        initial["absorb"] = absorb_row;
    }
    initial["expected_total"] = exact_total;
    initial["expected_nontrivial"] =
        solution.expected_nontrivial(static_cast<Eigen::Index>(start_index));
    initial["analytic_total"] = prediction.total;
    initial["analytic_total_heuristic"] = prediction.heuristic;
    if (exact_total > 0.0) {
        initial["analytic_total_relative_difference"] =
            (prediction.total - exact_total) / exact_total;
    }
    results["initial_state"] = initial;

    json document;
    document["config"] = config_to_json(config);
    document["prng"] = kPrngId;
    document["results"] = results;

    const std::string prefix = output_prefix(config, options);
    if (prefix.empty()) {
        std::cout << csv.str();
        emit_json(document, "");
    } else {
        write_text_file(prefix + ".oracle.csv", csv.str());
        emit_json(document, prefix + ".oracle.json");
    }
    return kOk;
}

int cmd_validate_model(const ExperimentConfig& config, const CommandOptions& options) {
    constexpr std::size_t kMaxListedViolations = 1000;
    const IntensityState start = config.state();
    const TransitionModel model = model_from_config(config, /*unchecked=*/true);

    const ModelReport report =
        validate_model(model, static_cast<int>(start.components()), start.total);

    json violations = json::array();
    for (std::size_t i = 0; i < report.violations.size() && i < kMaxListedViolations; ++i) {
        violations.push_back({{"state", report.violations[i].first},
                              {"constraint", report.violations[i].second}});
    }

    json document;
    document["config"] = config_to_json(config);
    document["prng"] = kPrngId;
    document["results"] = {{"valid", report.valid},
                           {"violations_total", report.violations.size()},
                           {"violations", violations}};

    const std::string prefix = output_prefix(config, options);
    emit_json(document, prefix.empty() ? "" : prefix + ".validate.json");
    return report.valid ? kOk : kCheckFailure;
}

}  // namespace bornchain::cli
