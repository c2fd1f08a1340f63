#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mcvd/rng.hpp"
#include "mcvd/scenario.hpp"
#include "mcvd/trace.hpp"

namespace mcvd {

struct MoleculeState {
    Vec3 position{};
    bool alive = true;
};

// Capture rule applied once per simulation step:
//  - EndOfStep: captured iff the end position lies inside a receiver.
//  - ChordBridge: EndOfStep, plus segment-sphere crossing, plus a
//    first-passage acceptance exp(-gap_start*gap_end / (D*dt)) for steps
//    that stay outside but graze a receiver. Corrects most of the
//    undercount that a pure end-of-step check has at finite dt.
enum class AbsorptionPolicy { EndOfStep, ChordBridge };

struct SimOptions {
    double sim_step = 1e-4;  // seconds; sample_interval must be an integer multiple
    AbsorptionPolicy policy = AbsorptionPolicy::EndOfStep;
    int n_threads = 1;       // <= 0 means hardware concurrency
};

// One capture: step_index is 1-based, so the event time is step_index * sim_step.
// receiver is the index into the scenario's receiver list.
struct AbsorptionEvent {
    std::uint32_t step_index = 0;
    std::uint16_t receiver = 0;
};

// Raw output of one trial; memory grows with captures, not with steps.
struct TrialEvents {
    std::vector<AbsorptionEvent> events;
    std::int64_t molecules = 0;
    std::uint32_t total_steps = 0;
    double sim_step = 0.0;
};

struct TrialEnsemble {
    Scenario scenario;
    SamplingPlan plan;
    std::vector<std::vector<CumulativeTrace>> trials;  // [trial][receiver index]
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> trial_seeds;
};

// One Euler-Maruyama displacement: drift plus N(0, 2 D dt) per axis.
Vec3 step_molecule(const MoleculeState& state, const Medium& medium, double dt,
                   NormalSampler& rng);

// End-of-step capture check: id of the receiver whose sphere contains `next`,
// or nullopt. `prev` is part of the step contract; this policy ignores it.
std::optional<int> detect_absorption(const Vec3& prev, const Vec3& next,
                                     std::span<const Receiver> receivers);

// Simulates molecule_budget independent molecules for plan.total_time().
// Deterministic in (scenario, plan, options.sim_step, options.policy, seed);
// thread count never changes the result.
TrialEvents simulate_trial_events(const ValidatedScenario& scenario, const SamplingPlan& plan,
                                  const SimOptions& options, std::uint64_t seed);

// Folds events into per-receiver cumulative traces on the sampling grid.
std::vector<CumulativeTrace> bin_events(const TrialEvents& events, const SamplingPlan& plan,
                                        std::span<const Receiver> receivers);

std::vector<CumulativeTrace> simulate_trial(const ValidatedScenario& scenario,
                                            const SamplingPlan& plan, const SimOptions& options,
                                            std::uint64_t seed);

// n_trials independent repeats; trial i uses derive_seed(master_seed, i).
TrialEnsemble run_trials(const ValidatedScenario& scenario, const SamplingPlan& plan,
                         const SimOptions& options, std::uint64_t master_seed, int n_trials);

struct ProbabilityMapEntry {
    Vec3 position{};
    int receiver_id = 0;
    double probability = 0.0;  // fraction of released molecules captured by total_time
};

// Re-runs the scenario with the transmitter moved to each grid position and
// reports per-receiver capture fractions averaged over trials_per_point.
// Every grid position must be a valid transmitter location.
std::vector<ProbabilityMapEntry> receiving_probability_map(
    const Scenario& base, const SamplingPlan& plan, std::span<const Vec3> grid,
    const SimOptions& options, std::uint64_t seed, int trials_per_point = 1);

}  // namespace mcvd
