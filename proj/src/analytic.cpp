#include "bornchain/analytic.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bornchain::analytic {

namespace {

// Pairwise reduction; the q_i span several orders of magnitude for steep
// weight rules and naive left-to-right accumulation loses digits.
double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 32) {
        double sum = 0.0;
        for (double v : values) sum += v;
        return sum;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

// Pooled two-component selection probability at count a: the component versus
// the rest of the intensity.
double pooled_probability(const TransitionModel& model, std::int64_t a, std::int64_t total) {
    const double own = model.weight(a);
    const double rest = model.weight(total - a);
    const double sum = own + rest;
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        throw std::invalid_argument("pooled weights are not positive at count " +
                                    std::to_string(a));
    }
    return own / sum;
}

}  // namespace

std::vector<double> born_probabilities(const IntensityState& state) {
    std::vector<double> p(state.a.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = static_cast<double>(state.a[i]) / static_cast<double>(state.total);
    }
    return p;
}

double q_value(const TransitionModel& model, std::int64_t a, std::int64_t total) {
    if (a <= 0 || a >= total) {
        throw std::invalid_argument("q is defined for interior counts 0 < a < N only");
    }
    const double p = pooled_probability(model, a, total);
    return 1.0 / (p * (1.0 - p));
}

double mean_steps_single(const TransitionModel& model, std::int64_t a, std::int64_t total) {
    if (a < 0 || a > total) {
        throw std::invalid_argument("count must lie in 0..N");
    }
    if (a == 0 || a == total) return 0.0;

    // One pass over the interior q values covers both sums.
    std::vector<double> weighted_all;   // (N - i) q_i, i = 1..N-1
    std::vector<double> weighted_below; // (a - i) q_i, i = 1..a-1
    weighted_all.reserve(static_cast<std::size_t>(total - 1));
    weighted_below.reserve(static_cast<std::size_t>(a));
    for (std::int64_t i = 1; i < total; ++i) {
        const double q = q_value(model, i, total);
        weighted_all.push_back(static_cast<double>(total - i) * q);
        if (i < a) weighted_below.push_back(static_cast<double>(a - i) * q);
    }
    const double v1 = pairwise_sum(weighted_all) / static_cast<double>(total);
    return static_cast<double>(a) * v1 - pairwise_sum(weighted_below);
}

double mean_total_steps(const IntensityState& state, const TransitionModel& model) {
    double sum = 0.0;
    for (std::int64_t count : state.a) {
        sum += mean_steps_single(model, count, state.total);
    }
    return 0.5 * sum;
}

double mean_nontrivial_steps(const IntensityState& state) {
    // sum_{i<j} a_i a_j = (N^2 - sum a_i^2) / 2, exact in integer arithmetic.
    std::int64_t sum_squares = 0;
    for (std::int64_t count : state.a) sum_squares += count * count;
    return static_cast<double>((state.total * state.total - sum_squares) / 2);
}

double max_nontrivial(int components, std::int64_t total) {
    if (components < 1 || total < 1) {
        throw std::invalid_argument("components and total must be positive");
    }
    const double m = static_cast<double>(components);
    const double n = static_cast<double>(total);
    return (m - 1.0) * n * n / (2.0 * m);
}

StepPrediction predict_steps(const IntensityState& state, const TransitionModel& model) {
    StepPrediction prediction;
    prediction.per_component.reserve(state.a.size());
    for (std::int64_t count : state.a) {
        prediction.per_component.push_back(mean_steps_single(model, count, state.total));
    }
    prediction.total = 0.5 * pairwise_sum(prediction.per_component);
    prediction.nontrivial = mean_nontrivial_steps(state);
    prediction.heuristic = state.a.size() > 2;
    return prediction;
}

}  // namespace bornchain::analytic
