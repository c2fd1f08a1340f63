#pragma once

#include <span>

namespace mcvd {

struct SummaryStats {
    int n = 0;
    double mean = 0.0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

// Linearly interpolated quantile of sorted data, f in [0, 1].
double quantile_sorted(std::span<const double> sorted, double f);

SummaryStats summarize(std::span<const double> values);

// One-sided sign test: p-value for "first < second tends to hold", i.e.
// P(Binomial(wins + losses, 1/2) >= wins) where wins counts pairs with
// first < second. Ties are dropped.
double sign_test_p(int wins, int losses);

}  // namespace mcvd
