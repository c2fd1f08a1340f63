#include "mcvd/particle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcvd/errors.hpp"
#include "mcvd/parallel.hpp"

namespace mcvd {
namespace {

constexpr std::size_t kMoleculeChunk = 8192;

// Integer number of simulation steps per sample instant, or an error when the
// sample interval is not an integer multiple of the step.
std::uint32_t steps_per_sample(const SamplingPlan& plan, double sim_step) {
    if (!(sim_step > 0.0) || !std::isfinite(sim_step))
        fail(Err::NonPositiveParameter, "sim_step must be > 0");
    const double ratio = plan.sample_interval / sim_step;
    const double rounded = std::nearbyint(ratio);
    if (rounded < 1.0 || std::fabs(ratio - rounded) > 1e-9 * ratio)
        fail(Err::StepNotDividingSampleInterval,
             "sample interval " + std::to_string(plan.sample_interval) +
                 " is not an integer multiple of sim_step " + std::to_string(sim_step));
    if (rounded * plan.num_samples > 4.2e9)
        fail(Err::InvalidArgument, "step count exceeds 32-bit event indexing");
    return static_cast<std::uint32_t>(rounded);
}

struct SphereView {
    Vec3 center;
    double radius;
    double radius_sq;
    double gate_sq;  // detailed checks trigger inside this radius
};

// gate = r + 6 sigma + |drift|: a step that ends farther out cannot have
// produced a capture (up to events beyond 6 sigma, which are negligible
// against the policy's own discretization error).
std::vector<SphereView> make_views(std::span<const Receiver> receivers, double sigma,
                                   double drift_len) {
    std::vector<SphereView> views;
    views.reserve(receivers.size());
    for (const Receiver& rx : receivers) {
        const double gate = rx.radius + 6.0 * sigma + drift_len;
        views.push_back({rx.center, rx.radius, rx.radius * rx.radius, gate * gate});
    }
    return views;
}

// Minimum squared distance from sphere center to the segment prev->next.
double segment_min_dist_sq(const Vec3& prev, const Vec3& next, const Vec3& center) {
    const Vec3 w{next.x - prev.x, next.y - prev.y, next.z - prev.z};
    const Vec3 rel{prev.x - center.x, prev.y - center.y, prev.z - center.z};
    const double ww = w.norm_squared();
    double s = 0.0;
    if (ww > 0.0) s = std::clamp(-dot(rel, w) / ww, 0.0, 1.0);
    const Vec3 closest{rel.x + s * w.x, rel.y + s * w.y, rel.z + s * w.z};
    return closest.norm_squared();
}

}  // namespace

Vec3 step_molecule(const MoleculeState& state, const Medium& medium, double dt,
                   NormalSampler& rng) {
    if (!(dt > 0.0)) fail(Err::NonPositiveParameter, "dt must be > 0");
    const double sigma = std::sqrt(2.0 * medium.diffusion_coefficient * dt);
    return Vec3{state.position.x + medium.flow.x * dt + sigma * rng.normal(),
                state.position.y + medium.flow.y * dt + sigma * rng.normal(),
                state.position.z + medium.flow.z * dt + sigma * rng.normal()};
}

std::optional<int> detect_absorption(const Vec3& prev, const Vec3& next,
                                     std::span<const Receiver> receivers) {
    (void)prev;
    for (const Receiver& rx : receivers) {
        if (distance_squared(next, rx.center) <= rx.radius * rx.radius) return rx.id;
    }
    return std::nullopt;
}

TrialEvents simulate_trial_events(const ValidatedScenario& scenario, const SamplingPlan& plan,
                                  const SimOptions& options, std::uint64_t seed) {
    validate_plan(plan);
    const Scenario& scen = scenario.scenario();
    const std::uint32_t per_sample = steps_per_sample(plan, options.sim_step);
    const std::uint32_t total_steps = per_sample * static_cast<std::uint32_t>(plan.num_samples);

    const double dt = options.sim_step;
    const double diffusion = scen.medium.diffusion_coefficient;
    const double sigma = std::sqrt(2.0 * diffusion * dt);
    const Vec3 drift{scen.medium.flow.x * dt, scen.medium.flow.y * dt, scen.medium.flow.z * dt};
    const std::vector<SphereView> views = make_views(scen.receivers, sigma, drift.norm());
    const std::size_t n_rx = views.size();
    const bool bridge = options.policy == AbsorptionPolicy::ChordBridge;
    const Vec3 origin = scen.transmitter;
    const std::size_t q = static_cast<std::size_t>(scen.molecule_budget);

    const std::size_t n_chunks = (q + kMoleculeChunk - 1) / kMoleculeChunk;
    std::vector<std::vector<AbsorptionEvent>> chunk_events(n_chunks);

    parallel_chunks(q, kMoleculeChunk, options.n_threads,
                    [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        std::vector<AbsorptionEvent>& out = chunk_events[chunk];
        for (std::size_t mol = begin; mol < end; ++mol) {
            NormalSampler rng(derive_seed(seed, mol));
            Vec3 pos = origin;
            for (std::uint32_t step = 1; step <= total_steps; ++step) {
                const Vec3 nxt{pos.x + drift.x + sigma * rng.normal(),
                               pos.y + drift.y + sigma * rng.normal(),
                               pos.z + drift.z + sigma * rng.normal()};
                int hit = -1;
                for (std::size_t k = 0; k < n_rx; ++k) {
                    const SphereView& sv = views[k];
                    const double d2n = distance_squared(nxt, sv.center);
                    if (d2n <= sv.radius_sq) {
                        hit = static_cast<int>(k);
                        break;
                    }
                    if (!bridge || d2n > sv.gate_sq) continue;
                    if (segment_min_dist_sq(pos, nxt, sv.center) <= sv.radius_sq) {
                        hit = static_cast<int>(k);
                        break;
                    }
                    if (diffusion > 0.0) {
                        const double gap_start = std::sqrt(distance_squared(pos, sv.center)) - sv.radius;
                        const double gap_end = std::sqrt(d2n) - sv.radius;
                        const double p_hit = std::exp(-gap_start * gap_end / (diffusion * dt));
                        if (rng.uniform01() < p_hit) {
                            hit = static_cast<int>(k);
                            break;
                        }
                    }
                }
                if (hit >= 0) {
                    out.push_back({step, static_cast<std::uint16_t>(hit)});
                    break;
                }
                pos = nxt;
            }
        }
    });

    TrialEvents out;
    out.molecules = scen.molecule_budget;
    out.total_steps = total_steps;
    out.sim_step = dt;
    std::size_t total = 0;
    for (const auto& c : chunk_events) total += c.size();
    out.events.reserve(total);
    for (const auto& c : chunk_events)
        out.events.insert(out.events.end(), c.begin(), c.end());
    return out;
}

std::vector<CumulativeTrace> bin_events(const TrialEvents& events, const SamplingPlan& plan,
                                        std::span<const Receiver> receivers) {
    validate_plan(plan);
    const std::uint32_t per_sample = steps_per_sample(plan, events.sim_step);
    const std::uint32_t needed = per_sample * static_cast<std::uint32_t>(plan.num_samples);
    if (needed > events.total_steps)
        fail(Err::InvalidArgument, "plan extends past the simulated horizon");

    const std::size_t n_rx = receivers.size();
    const std::size_t n_samples = static_cast<std::size_t>(plan.num_samples);
    std::vector<std::vector<std::int64_t>> hist(n_rx, std::vector<std::int64_t>(n_samples, 0));
    for (const AbsorptionEvent& ev : events.events) {
        if (ev.receiver >= n_rx)
            fail(Err::IndexOutOfRange, "event receiver index out of range");
        if (ev.step_index > needed) continue;  // beyond this (shorter) plan
        const std::size_t bin = (ev.step_index + per_sample - 1) / per_sample - 1;
        ++hist[ev.receiver][bin];
    }

    std::vector<CumulativeTrace> traces(n_rx);
    for (std::size_t k = 0; k < n_rx; ++k) {
        CumulativeTrace& tr = traces[k];
        tr.receiver_id = receivers[k].id;
        tr.sample_times.resize(n_samples);
        tr.counts.resize(n_samples);
        std::int64_t running = 0;
        for (std::size_t n = 0; n < n_samples; ++n) {
            tr.sample_times[n] = static_cast<double>(n + 1) * plan.sample_interval;
            running += hist[k][n];
            tr.counts[n] = running;
        }
    }
    return traces;
}

std::vector<CumulativeTrace> simulate_trial(const ValidatedScenario& scenario,
                                            const SamplingPlan& plan, const SimOptions& options,
                                            std::uint64_t seed) {
    const TrialEvents events = simulate_trial_events(scenario, plan, options, seed);
    return bin_events(events, plan, scenario.receivers());
}

TrialEnsemble run_trials(const ValidatedScenario& scenario, const SamplingPlan& plan,
                         const SimOptions& options, std::uint64_t master_seed, int n_trials) {
    if (n_trials <= 0) fail(Err::NonPositiveParameter, "trial count must be > 0");
    validate_plan(plan);

    TrialEnsemble out;
    out.scenario = scenario.scenario();
    out.plan = plan;
    out.master_seed = master_seed;
    out.trial_seeds.resize(static_cast<std::size_t>(n_trials));
    out.trials.resize(static_cast<std::size_t>(n_trials));
    for (std::size_t i = 0; i < out.trial_seeds.size(); ++i)
        out.trial_seeds[i] = derive_seed(master_seed, i);

    SimOptions inner = options;
    inner.n_threads = 1;
    parallel_items(out.trials.size(), options.n_threads, [&](std::size_t i) {
        out.trials[i] = simulate_trial(scenario, plan, inner, out.trial_seeds[i]);
    });
    return out;
}

std::vector<ProbabilityMapEntry> receiving_probability_map(
    const Scenario& base, const SamplingPlan& plan, std::span<const Vec3> grid,
    const SimOptions& options, std::uint64_t seed, int trials_per_point) {
    if (trials_per_point <= 0) fail(Err::NonPositiveParameter, "trials_per_point must be > 0");
    validate_plan(plan);

    const std::size_t n_points = grid.size();
    const std::size_t n_rx = base.receivers.size();
    const std::size_t n_trials = static_cast<std::size_t>(trials_per_point);
    std::vector<ValidatedScenario> validated(n_points);
    for (std::size_t g = 0; g < n_points; ++g) {
        Scenario moved = base;
        moved.transmitter = grid[g];
        validated[g] = validate_scenario(moved);
    }

    SimOptions inner = options;
    inner.n_threads = 1;
    std::vector<std::vector<std::vector<std::int64_t>>> finals(
        n_points, std::vector<std::vector<std::int64_t>>(n_trials));
    parallel_items(n_points * n_trials, options.n_threads, [&](std::size_t flat) {
        const std::size_t g = flat / n_trials;
        const std::size_t t = flat % n_trials;
        const std::uint64_t trial_seed = derive_seed(derive_seed(seed, g), t);
        const auto traces = simulate_trial(validated[g], plan, inner, trial_seed);
        std::vector<std::int64_t>& row = finals[g][t];
        row.resize(n_rx);
        for (std::size_t k = 0; k < n_rx; ++k) row[k] = traces[k].final_count();
    });

    const double denom = static_cast<double>(base.molecule_budget) * static_cast<double>(n_trials);
    std::vector<ProbabilityMapEntry> out;
    out.reserve(n_points * n_rx);
    for (std::size_t g = 0; g < n_points; ++g) {
        for (std::size_t k = 0; k < n_rx; ++k) {
            std::int64_t sum = 0;
            for (std::size_t t = 0; t < n_trials; ++t) sum += finals[g][t][k];
            out.push_back({grid[g], base.receivers[k].id, static_cast<double>(sum) / denom});
        }
    }
    return out;
}

}  // namespace mcvd
