#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcvd/config.hpp"
#include "mcvd/localization.hpp"
#include "mcvd/particle_sim.hpp"
#include "mcvd/stats.hpp"

namespace mcvd {

// Provenance stamped into every output file.
struct RunMeta {
    std::string config_hash;
    std::uint64_t master_seed = 0;
};

struct PipelineTrialRecord {
    int trial = -1;
    bool ok = false;
    std::string error;          // error code name when !ok
    LocalizationResult result;  // valid when ok
    double delta_p = 0.0;       // distance to the scenario transmitter
};

struct PipelineSummary {
    std::vector<PipelineTrialRecord> records;
    SummaryStats stats{};  // over successful trials
    int failures = 0;
};

// Simulate + fit + localize, per trial. A failed trial is recorded and the
// run continues.
PipelineSummary run_pipeline(const ValidatedScenario& scenario, const SamplingPlan& plan,
                             const SimOptions& sim, std::uint64_t master_seed, int trials,
                             const LocalizeOptions& loc);

// Same rollup for trials that were simulated (or loaded) elsewhere.
PipelineSummary pipeline_from_traces(const std::vector<std::vector<CumulativeTrace>>& trials,
                                     const ValidatedScenario& scenario,
                                     const LocalizeOptions& loc);

struct SweepCell {
    double axis_value = 0.0;
    Vec3 tn{};
    std::vector<double> delta_p;  // successful trials only
    int failures = 0;
};

// One cell per (axis value, TN position). Simulation-stage axes simulate a
// fresh ensemble per cell; estimation-stage axes (sample interval, subset
// size) re-derive every cell from one event set per TN, so cells differing
// only in the axis value share their underlying trials.
std::vector<SweepCell> run_sweep(const RunConfig& cfg, int n_threads);

struct ProbMapRow {
    double x = 0.0, y = 0.0, z = 0.0;
    int receiver_id = 0;
    double probability = 0.0;
    bool skipped = false;  // grid point is not a valid transmitter location
};

std::vector<ProbMapRow> run_probability_map(const RunConfig& cfg, int n_threads);

struct OracleReport {
    double sd_grid_gap = 0.0;       // max |coord diff| between SD and grid argmin
    double grid_cell = 0.0;
    double siso_rel_dev = 0.0;      // simulated vs closed-form final probability
    double jac_gain_rel = 0.0;      // analytic vs finite-difference, max relative
    double jac_dist_rel = 0.0;
    double grad_h_rel = 0.0;
    bool pass = false;
};

// Independent brute-force checks: grid search vs steepest descent, one-receiver
// simulation vs the closed form, analytic vs finite-difference derivatives.
OracleReport run_oracle(const RunConfig& cfg, int n_threads);

// --- file emission (CSV / flat key=value). Every writer stamps RunMeta. ---

void write_trace_csv(const std::string& path, const TrialEnsemble& ensemble, const RunMeta& meta);

// Reads a file written by write_trace_csv: [trial][receiver] traces.
std::vector<std::vector<CumulativeTrace>> read_trace_csv(const std::string& path);

void write_estimates_csv(const std::string& path,
                         const std::vector<std::vector<DistanceEstimate>>& per_trial,
                         const RunMeta& meta);

void write_pipeline_report(const std::string& path, const PipelineSummary& summary,
                           const RunMeta& meta);

void write_sweep_csv(const std::string& raw_path, const std::string& summary_path,
                     const RunConfig& cfg, const std::vector<SweepCell>& cells,
                     const RunMeta& meta);

void write_probmap_csv(const std::string& path, const std::vector<ProbMapRow>& rows,
                       const RunMeta& meta);

void write_oracle_report(const std::string& path, const OracleReport& report, const RunMeta& meta);

}  // namespace mcvd
