#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mcvd/channel_models.hpp"
#include "mcvd/lm_solver.hpp"
#include "mcvd/particle_sim.hpp"
#include "mcvd/scenario.hpp"
#include "mcvd/trace.hpp"

namespace mcvd {

struct DistanceEstimate {
    int receiver_id = 0;
    double gain = 0.0;
    double distance = 0.0;
    double sse = 0.0;       // on the probability scale (counts normalized by Q)
    double r_square = 0.0;  // NaN when the trace has zero variance
    int iterations = 0;
    bool converged = false;
};

struct EstimateOptions {
    LmOptions lm{};
    double init_gain = 0.5;
    double min_distance_factor = 1.5;   // d0 floor, in receiver radii
    double max_distance_factor = 100.0; // d0 ceiling, in receiver radii
};

// Fits (gain, distance) to one cumulative trace by damped least squares on
// the normalized residuals. The distance is initialized by inverting the
// model at the final sample time and kept outside the receiver by penalty
// residuals during the search.
DistanceEstimate estimate_distance(const CumulativeTrace& trace, const ModelContext& ctx,
                                   const EstimateOptions& options = {});
DistanceEstimate estimate_distance(const CumulativeTrace& trace, const ModelContext& ctx,
                                   const LmOptions& lm_options);

struct FitQuality {
    double sse = 0.0;
    double r_square = 0.0;
};

// sse = sum of squared residuals; r_square = 1 - sse/SST with SST the total
// sum of squares of the observations around their mean. Residuals and
// observations must be on the same (probability) scale.
FitQuality goodness_of_fit(std::span<const double> fit_residuals,
                           std::span<const double> observations);

// |estimate - actual| / actual.
double normalized_distance_error(double estimated, double actual);

struct IntervalSweepCell {
    double sample_interval = 0.0;
    int receiver_id = 0;
    double mean_error = 0.0;  // mean normalized distance error over usable fits
    int fits = 0;             // usable (trial, receiver) fits behind the mean
};

struct IntervalSweepResult {
    std::vector<IntervalSweepCell> cells;
    double max_usable_interval = 0.0;  // largest interval within tolerance of the finest
};

// Simulates `trials` repeats once at options.sim_step, then re-bins the same
// events at each candidate interval and refits. A candidate is usable when
// its mean error (over receivers and trials) stays within tolerance_factor
// of the finest candidate's.
IntervalSweepResult max_sample_interval_sweep(const ValidatedScenario& scenario,
                                              double total_time,
                                              std::span<const double> candidate_intervals,
                                              const SimOptions& options, std::uint64_t master_seed,
                                              int trials, double tolerance_factor = 1.1,
                                              const EstimateOptions& fit_options = {});

}  // namespace mcvd
