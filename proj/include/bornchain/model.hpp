#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bornchain/state.hpp"

namespace bornchain {

enum class ModelKind { Uniform, Linear, CustomWeight };

/// A transition model assigns every component a selection weight w(a) that
/// depends only on its intensity count; selection probabilities are the
/// weights normalized over the current configuration. Admissibility means
/// w(0) = 0 (an empty component can never be drawn again) and w(a) > 0 for
/// every occupied count, so occupied components always stay in play.
///
/// Built-in kinds:
///   Uniform  w(a) = 1 for a > 0   (every occupied component equally likely)
///   Linear   w(a) = a             (selection proportional to intensity)
/// CustomWeight carries an explicit table indexed by intensity count.
class TransitionModel {
public:
    static TransitionModel uniform();
    static TransitionModel linear();

    /// Builds a custom model from a weight table (weights[a] is the weight of
    /// a component holding `a` units). Rejects inadmissible tables: the table
    /// must be nonempty, finite, have weights[0] == 0 and weights[a] > 0 for
    /// all a >= 1. Throws config_error.
    static TransitionModel custom(std::vector<double> weights);

    /// Builds a custom model without admissibility checks, for diagnostic use
    /// with validate_model(). Only finiteness and nonnegativity are required.
    static TransitionModel custom_unchecked(std::vector<double> weights);

    ModelKind kind() const { return kind_; }
    std::string name() const;

    /// Selection weight of a component holding `intensity` units.
    /// For custom models, throws std::out_of_range when the table does not
    /// cover the requested count.
    double weight(std::int64_t intensity) const;

    /// Highest intensity covered by a custom table; -1 for built-in kinds
    /// (which are defined for every count).
    std::int64_t max_custom_intensity() const;

private:
    TransitionModel(ModelKind kind, std::vector<double> weights)
        : kind_(kind), weights_(std::move(weights)) {}

    ModelKind kind_;
    std::vector<double> weights_;  // CustomWeight only
};

/// Selection distribution over the components of `state`:
/// p_i = w(a_i) / sum_j w(a_j). The result sums to 1 and is zero exactly on
/// empty components.
std::vector<double> probabilities(const TransitionModel& model, const IntensityState& state);

/// Allocation-free variant for hot loops; `out` is resized to the state size.
void probabilities_into(const TransitionModel& model, const IntensityState& state,
                        std::vector<double>& out);

/// Outcome of an exhaustive admissibility check.
struct ModelReport {
    bool valid = true;
    /// (configuration, constraint name) for every violation found.
    std::vector<std::pair<std::vector<std::int64_t>, std::string>> violations;
};

/// Checks the model over every configuration of `total` units in `components`
/// parts: probabilities must form a distribution (sum within 1e-12 of 1),
/// vanish exactly on empty components, and be positive elsewhere.
/// Throws guard_error when the configuration count exceeds the enumeration
/// guard (see oracle::kMaxStates).
ModelReport validate_model(const TransitionModel& model, int components, std::int64_t total);

/// Parses a custom weight table from a JSON object mapping stringified counts
/// to weights: {"0": 0.0, "1": 1.0, ..., "N": wN}. Every count 0..total must
/// be present; unknown or non-integer keys are errors. Throws config_error.
std::vector<double> parse_weight_table(const std::string& json_text, std::int64_t total);

/// parse_weight_table() on the contents of a file.
std::vector<double> load_weight_table(const std::string& path, std::int64_t total);

}  // namespace bornchain
