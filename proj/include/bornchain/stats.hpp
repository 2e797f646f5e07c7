#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace bornchain::stats {

/// Aggregate view of an ensemble run. `unfinished` counts trials that did not
/// reach a pure state: guard-hit trials in absorption mode, still-mixed final
/// states in partial mode. winner_counts sums plus unfinished always equal
/// trials.
struct EnsembleSummary {
    std::int64_t trials = 0;
    std::vector<std::int64_t> winner_counts;
    std::int64_t unfinished = 0;

    double step_mean = 0.0;
    double step_variance = 0.0;
    double nontrivial_mean = 0.0;
    double nontrivial_variance = 0.0;

    /// Fraction of all executed steps whose donor and recipient coincided.
    double null_fraction = 0.0;
    std::int64_t total_steps_sum = 0;
    std::int64_t null_steps_sum = 0;

    /// Per-component sample moments of the final intensities (partial mode).
    std::vector<double> final_intensity_mean;
    std::vector<double> final_intensity_variance;

    /// Final configuration -> trial count (partial mode only).
    std::map<std::vector<std::int64_t>, std::int64_t> final_state_counts;
};

struct GoodnessOfFit {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Wilson score interval for a binomial proportion at the given two-sided
/// confidence level (e.g. 0.95). Always contains successes/trials.
std::pair<double, double> proportion_interval(std::int64_t successes, std::int64_t trials,
                                              double level);

/// Pearson chi-square goodness of fit of observed counts against expected
/// category probabilities, scaled by `trials`. dof = #categories - 1; the
/// p-value is the regularized upper incomplete gamma Q(dof/2, statistic/2).
/// Zero expected probabilities are rejected (std::invalid_argument).
GoodnessOfFit chi_square_gof(const std::vector<std::int64_t>& observed,
                             const std::vector<double>& expected, std::int64_t trials);

/// z = (sample_mean - target) / (sample_sd / sqrt(n)). Requires n >= 2 and
/// sample_sd > 0.
double mean_z_test(double sample_mean, double sample_sd, std::int64_t n, double target);

/// Quantile of the standard normal distribution, for p in (0, 1).
double normal_quantile(double p);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a),
/// a > 0, x >= 0. Series expansion below a + 1, Lentz continued fraction
/// above; absolute accuracy well under 1e-10.
double gamma_q(double a, double x);

}  // namespace bornchain::stats
