#pragma once

#include <cstdint>
#include <vector>

namespace mcvd {

// Cumulative absorbed-molecule count for one receiver, sampled at
// t = n*sample_interval, n = 1..num_samples. counts is non-decreasing.
struct CumulativeTrace {
    int receiver_id = 0;
    std::vector<double> sample_times;
    std::vector<std::int64_t> counts;

    std::int64_t final_count() const { return counts.empty() ? 0 : counts.back(); }
};

}  // namespace mcvd
