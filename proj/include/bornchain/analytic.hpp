#pragma once

#include <cstdint>
#include <vector>

#include "bornchain/model.hpp"
#include "bornchain/state.hpp"

namespace bornchain::analytic {

/// Collapse probabilities predicted for the configuration: each component's
/// share a_i/N of the total intensity.
std::vector<double> born_probabilities(const IntensityState& state);

/// Inverse one-step mobility of the pooled two-component walk at count `a`:
/// q_a = 1 / (p(a) (1 - p(a))) with p(a) = w(a) / (w(a) + w(N - a)).
/// Defined for 0 < a < total only (the walk is frozen at the boundaries).
double q_value(const TransitionModel& model, std::int64_t a, std::int64_t total);

/// Mean number of steps, null exchanges included, for a pooled component
/// starting at `a` units to finish at 0 or N:
///   v_0 = v_N = 0,
///   v_1 = (1/N) sum_{i=1..N-1} (N - i) q_i,
///   v_a = a v_1 - sum_{i=1..a-1} q_i (a - i).
double mean_steps_single(const TransitionModel& model, std::int64_t a, std::int64_t total);

/// Mean steps for the whole configuration to reach a pure state:
/// half the sum of mean_steps_single over the components (each step involves
/// two component slots). Exact for two components; for more this is the
/// pooled-reduction heuristic and is flagged as such in StepPrediction.
double mean_total_steps(const IntensityState& state, const TransitionModel& model);

/// Mean number of intensity-changing steps: sum_{i<j} a_i a_j. Model
/// independent.
double mean_nontrivial_steps(const IntensityState& state);

/// Maximum of mean_nontrivial_steps over configurations of `total` units in
/// `components` parts: (M - 1) N^2 / (2 M), attained at the equal split.
double max_nontrivial(int components, std::int64_t total);

struct StepPrediction {
    std::vector<double> per_component;  // mean_steps_single per component
    double total = 0.0;
    double nontrivial = 0.0;
    /// True when the total is the pooled heuristic (more than two components).
    bool heuristic = false;
};

StepPrediction predict_steps(const IntensityState& state, const TransitionModel& model);

}  // namespace bornchain::analytic
