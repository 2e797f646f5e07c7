#include "bornchain/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bornchain::stats {

namespace {

// Regularized lower incomplete gamma by series expansion (x < a + 1).
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma by modified Lentz continued fraction
// (x >= a + 1).
double gamma_q_fraction(double a, double x) {
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) {
        throw std::invalid_argument("gamma_q requires a > 0 and x >= 0");
    }
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("normal quantile requires p in (0, 1)");
    }
    // Bisection on the CDF expressed through erfc; monotone and fully
    // reproducible, and this is never on a hot path.
    auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> proportion_interval(std::int64_t successes, std::int64_t trials,
                                              double level) {
    if (trials < 1 || successes < 0 || successes > trials) {
        throw std::invalid_argument("need 0 <= successes <= trials with trials >= 1");
    }
    if (!(level > 0.0) || !(level < 1.0)) {
        throw std::invalid_argument("confidence level must lie in (0, 1)");
    }
    const double z = normal_quantile(0.5 + level / 2.0);
    const double n = static_cast<double>(trials);
    const double observed = static_cast<double>(successes) / n;
    const double z2n = z * z / n;
    const double center = (observed + z2n / 2.0) / (1.0 + z2n);
    const double half_width =
        (z / (1.0 + z2n)) * std::sqrt(observed * (1.0 - observed) / n + z2n / (4.0 * n));
    return {std::max(0.0, center - half_width), std::min(1.0, center + half_width)};
}

GoodnessOfFit chi_square_gof(const std::vector<std::int64_t>& observed,
                             const std::vector<double>& expected, std::int64_t trials) {
    if (observed.size() != expected.size() || observed.size() < 2) {
        throw std::invalid_argument("need matching observed/expected with at least 2 categories");
    }
    if (trials < 1) {
        throw std::invalid_argument("trials must be at least 1");
    }
    double expected_sum = 0.0;
    for (double e : expected) {
        if (!(e > 0.0)) {
            throw std::invalid_argument("expected probabilities must be positive");
        }
        expected_sum += e;
    }
    if (std::abs(expected_sum - 1.0) > 1e-9) {
        throw std::invalid_argument("expected probabilities must sum to 1");
    }

    GoodnessOfFit fit;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expected_count = expected[i] * static_cast<double>(trials);
        const double difference = static_cast<double>(observed[i]) - expected_count;
        fit.statistic += difference * difference / expected_count;
    }
    fit.dof = static_cast<int>(observed.size()) - 1;
    fit.p_value = gamma_q(static_cast<double>(fit.dof) / 2.0, fit.statistic / 2.0);
    return fit;
}

double mean_z_test(double sample_mean, double sample_sd, std::int64_t n, double target) {
    if (n < 2) {
        throw std::invalid_argument("z test needs at least 2 observations");
    }
    if (!(sample_sd > 0.0)) {
        throw std::invalid_argument("z test needs a positive sample standard deviation");
    }
    return (sample_mean - target) / (sample_sd / std::sqrt(static_cast<double>(n)));
}

}  // namespace bornchain::stats
