#include "mcvd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mcvd/errors.hpp"

namespace mcvd {

double quantile_sorted(std::span<const double> sorted, double f) {
    if (sorted.empty()) fail(Err::InvalidArgument, "quantile of empty data");
    if (!(f >= 0.0) || !(f <= 1.0)) fail(Err::InvalidArgument, "quantile fraction outside [0,1]");
    const double pos = f * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double w = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - w) + sorted[lo + 1] * w;
}

SummaryStats summarize(std::span<const double> values) {
    if (values.empty()) fail(Err::InvalidArgument, "summary of empty data");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    SummaryStats s;
    s.n = static_cast<int>(sorted.size());
    double sum = 0.0;
    for (double v : sorted) sum += v;
    s.mean = sum / static_cast<double>(sorted.size());
    s.median = quantile_sorted(sorted, 0.5);
    s.q25 = quantile_sorted(sorted, 0.25);
    s.q75 = quantile_sorted(sorted, 0.75);
    s.min = sorted.front();
    s.max = sorted.back();
    return s;
}

double sign_test_p(int wins, int losses) {
    if (wins < 0 || losses < 0) fail(Err::InvalidArgument, "negative counts");
    const int n = wins + losses;
    if (n == 0) return 1.0;
    // P(X >= wins) for X ~ Binomial(n, 1/2), via log binomial coefficients.
    double p = 0.0;
    for (int k = wins; k <= n; ++k) {
        const double log_term = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                std::lgamma(n - k + 1.0) - n * std::log(2.0);
        p += std::exp(log_term);
    }
    return std::min(p, 1.0);
}

}  // namespace mcvd
