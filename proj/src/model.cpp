#include "bornchain/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bornchain/errors.hpp"
#include "bornchain/oracle.hpp"

namespace bornchain {

namespace {

void require_finite_nonnegative(const std::vector<double>& weights) {
    if (weights.empty()) {
        throw config_error("weight table must not be empty");
    }
    for (std::size_t a = 0; a < weights.size(); ++a) {
        if (!std::isfinite(weights[a]) || weights[a] < 0.0) {
            throw config_error("weight table entry w(" + std::to_string(a) +
                               ") must be finite and nonnegative");
        }
    }
}

}  // namespace

TransitionModel TransitionModel::uniform() {
    return TransitionModel(ModelKind::Uniform, {});
}

TransitionModel TransitionModel::linear() {
    return TransitionModel(ModelKind::Linear, {});
}

TransitionModel TransitionModel::custom(std::vector<double> weights) {
    require_finite_nonnegative(weights);
    if (weights[0] != 0.0) {
        throw config_error("inadmissible weight rule: w(0) must be 0");
    }
    for (std::size_t a = 1; a < weights.size(); ++a) {
        if (weights[a] <= 0.0) {
            throw config_error("inadmissible weight rule: w(" + std::to_string(a) +
                               ") must be positive");
        }
    }
    return TransitionModel(ModelKind::CustomWeight, std::move(weights));
}

TransitionModel TransitionModel::custom_unchecked(std::vector<double> weights) {
    require_finite_nonnegative(weights);
    return TransitionModel(ModelKind::CustomWeight, std::move(weights));
}

std::string TransitionModel::name() const {
    switch (kind_) {
        case ModelKind::Uniform: return "uniform";
        case ModelKind::Linear: return "linear";
        case ModelKind::CustomWeight: return "custom";
    }
    return "unknown";
}

double TransitionModel::weight(std::int64_t intensity) const {
    switch (kind_) {
        case ModelKind::Uniform:
            return intensity > 0 ? 1.0 : 0.0;
        case ModelKind::Linear:
            return static_cast<double>(intensity);
        case ModelKind::CustomWeight:
            if (intensity < 0 || static_cast<std::size_t>(intensity) >= weights_.size()) {
                throw std::out_of_range("weight table does not cover intensity count " +
                                        std::to_string(intensity));
            }
            return weights_[static_cast<std::size_t>(intensity)];
    }
    return 0.0;
}

std::int64_t TransitionModel::max_custom_intensity() const {
    if (kind_ != ModelKind::CustomWeight) return -1;
    return static_cast<std::int64_t>(weights_.size()) - 1;
}

void probabilities_into(const TransitionModel& model, const IntensityState& state,
                        std::vector<double>& out) {
    out.resize(state.a.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < state.a.size(); ++i) {
        out[i] = model.weight(state.a[i]);
        sum += out[i];
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        throw std::logic_error("weight sum is not positive and finite for state " +
                               state.to_string());
    }
    for (double& p : out) p /= sum;
}

std::vector<double> probabilities(const TransitionModel& model, const IntensityState& state) {
    std::vector<double> p;
    probabilities_into(model, state, p);
    return p;
}

ModelReport validate_model(const TransitionModel& model, int components, std::int64_t total) {
    const oracle::StateSpace space = oracle::enumerate_states(components, total);

    ModelReport report;
    std::vector<double> p;
    for (const auto& configuration : space.states) {
        IntensityState state;
        state.a = configuration;
        state.total = total;

        bool weight_sum_ok = true;
        try {
            probabilities_into(model, state, p);
        } catch (const std::exception&) {
            report.violations.emplace_back(configuration, "weight sum not positive");
            weight_sum_ok = false;
        }
        if (!weight_sum_ok) continue;

        double sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            sum += p[i];
            if (configuration[i] == 0 && p[i] != 0.0) {
                report.violations.emplace_back(configuration, "p > 0 at zero intensity");
            }
            if (configuration[i] > 0 && !(p[i] > 0.0)) {
                report.violations.emplace_back(configuration, "p = 0 at nonzero intensity");
            }
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            report.violations.emplace_back(configuration, "probabilities do not sum to 1");
        }
    }
    report.valid = report.violations.empty();
    return report;
}

std::vector<double> parse_weight_table(const std::string& json_text, std::int64_t total) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("weight table is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw config_error("weight table must be a JSON object mapping counts to weights");
    }

    std::vector<double> weights(static_cast<std::size_t>(total) + 1, 0.0);
    std::vector<bool> present(weights.size(), false);
    for (const auto& [key, value] : doc.items()) {
        std::int64_t count = -1;
        try {
            std::size_t pos = 0;
            count = std::stoll(key, &pos);
            if (pos != key.size()) count = -1;
        } catch (const std::exception&) {
            count = -1;
        }
        if (count < 0 || count > total) {
            throw config_error("weight table key \"" + key + "\" is not an integer in 0.." +
                               std::to_string(total));
        }
        if (!value.is_number()) {
            throw config_error("weight table value for \"" + key + "\" must be a number");
        }
        weights[static_cast<std::size_t>(count)] = value.get<double>();
        present[static_cast<std::size_t>(count)] = true;
    }

    std::ostringstream missing;
    for (std::int64_t count = 0; count <= total; ++count) {
        if (!present[static_cast<std::size_t>(count)]) {
            if (missing.tellp() > 0) missing << ", ";
            missing << count;
        }
    }
    if (missing.tellp() > 0) {
        throw config_error("weight table is missing counts: " + missing.str());
    }
    return weights;
}

std::vector<double> load_weight_table(const std::string& path, std::int64_t total) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open weight table file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_weight_table(buffer.str(), total);
}

}  // namespace bornchain
