#include "mcvd/distance_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mcvd/errors.hpp"
#include "mcvd/parallel.hpp"

namespace mcvd {
namespace {

constexpr double kPenaltyBase = 1e3;

std::vector<double> penalty_vector(std::size_t m, double violation) {
    return std::vector<double>(m, kPenaltyBase * (1.0 + violation));
}

}  // namespace

FitQuality goodness_of_fit(std::span<const double> fit_residuals,
                           std::span<const double> observations) {
    if (observations.size() != fit_residuals.size())
        fail(Err::LengthMismatch, "observations and residuals differ in length");
    if (observations.size() < 2) fail(Err::InvalidArgument, "need at least two observations");
    double mean = 0.0;
    for (double v : observations) mean += v;
    mean /= static_cast<double>(observations.size());
    double sst = 0.0;
    double ssr = 0.0;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        sst += (observations[i] - mean) * (observations[i] - mean);
        ssr += fit_residuals[i] * fit_residuals[i];
    }
    if (!(sst > 0.0))
        fail(Err::DegenerateVariance, "observations have zero variance");
    return {ssr, 1.0 - ssr / sst};
}

double normalized_distance_error(double estimated, double actual) {
    if (!(actual > 0.0)) fail(Err::NonPositiveParameter, "actual distance must be > 0");
    return std::fabs(estimated - actual) / actual;
}

DistanceEstimate estimate_distance(const CumulativeTrace& trace, const ModelContext& ctx,
                                   const LmOptions& lm_options) {
    EstimateOptions options;
    options.lm = lm_options;
    return estimate_distance(trace, ctx, options);
}

DistanceEstimate estimate_distance(const CumulativeTrace& trace, const ModelContext& ctx,
                                   const EstimateOptions& options) {
    if (trace.sample_times.size() != trace.counts.size())
        fail(Err::LengthMismatch, "trace times and counts differ in length");
    const std::size_t m = trace.counts.size();
    if (m < 4) fail(Err::InvalidArgument, "need at least four samples to fit two parameters");
    if (!(ctx.molecule_budget > 0.0) || !(ctx.receiver_radius > 0.0) ||
        !(ctx.diffusion_coefficient > 0.0))
        fail(Err::NonPositiveParameter, "fit requires budget, radius and diffusion > 0");
    if (!ctx.sample_times.empty()) {
        if (ctx.sample_times.size() != trace.sample_times.size())
            fail(Err::LengthMismatch, "trace does not sit on the context sampling grid");
        for (std::size_t n = 0; n < ctx.sample_times.size(); ++n)
            if (std::fabs(trace.sample_times[n] - ctx.sample_times[n]) >
                1e-12 * std::max(1.0, std::fabs(ctx.sample_times[n])))
                fail(Err::LengthMismatch, "trace does not sit on the context sampling grid");
    }
    if (trace.final_count() <= 0) fail(Err::AllZeroTrace, "trace has no captures to fit");

    const double q = ctx.molecule_budget;
    const double r = ctx.receiver_radius;
    std::vector<double> obs(m);
    for (std::size_t n = 0; n < m; ++n) obs[n] = static_cast<double>(trace.counts[n]) / q;

    const double d_floor = options.min_distance_factor * r;
    const double d_ceil = options.max_distance_factor * r;
    // Invert the model at the last sample time for d0. A far trace is nowhere
    // near its plateau there, so the long-time inversion F_end/Q ~ a * r / d
    // would start the search in the flat tail where the Jacobian vanishes.
    const double f_end = static_cast<double>(trace.final_count()) / q;
    const double t_end = trace.sample_times.back();
    auto model_at = [&](double d) { return fit_model({options.init_gain, d}, ctx, t_end) / q; };
    double d0 = d_floor;
    if (f_end < model_at(d_floor)) {
        if (f_end <= model_at(d_ceil)) {
            d0 = d_ceil;
        } else {
            double lo = d_floor;
            double hi = d_ceil;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (model_at(mid) > f_end ? lo : hi) = mid;
            }
            d0 = 0.5 * (lo + hi);
        }
    }

    // Penalties steer the search away from d <= r and unphysical gains
    // without hard walls the damping schedule could oscillate against.
    const double d_min = r * (1.0 + 1e-9);
    auto residual_fn = [&](std::span<const double> beta) -> std::vector<double> {
        const double a = beta[0];
        const double d = beta[1];
        if (!std::isfinite(a) || !std::isfinite(d)) return penalty_vector(m, 1.0);
        if (d < d_min) return penalty_vector(m, (d_min - d) / r);
        if (d > 1e3 * r) return penalty_vector(m, (d - 1e3 * r) / r);
        if (a < 0.0) return penalty_vector(m, -a);
        if (a > 10.0) return penalty_vector(m, a - 10.0);
        std::vector<double> res(m);
        for (std::size_t n = 0; n < m; ++n) {
            const double fit = fit_model({a, d}, ctx, trace.sample_times[n]);
            res[n] = obs[n] - fit / q;
        }
        return res;
    };
    auto jacobian_fn = [&](std::span<const double> beta) -> std::vector<double> {
        const double a = beta[0];
        const double d = std::max(beta[1], d_min);
        std::vector<double> jac(m * 2);
        for (std::size_t n = 0; n < m; ++n) {
            const auto grad = fit_model_jacobian({a, d}, ctx, trace.sample_times[n]);
            jac[n * 2 + 0] = -grad[0] / q;
            jac[n * 2 + 1] = -grad[1] / q;
        }
        return jac;
    };

    const double beta0[2] = {options.init_gain, d0};
    const LmResult lm = lm_minimize(residual_fn, jacobian_fn, beta0, options.lm);

    const double gain = lm.beta[0];
    const double dist = lm.beta[1];
    const bool usable = std::isfinite(gain) && std::isfinite(dist) && dist > r;
    if (!usable)
        fail(Err::NoConvergence, "fit ended at an unusable point (d=" + std::to_string(dist) + ")");

    DistanceEstimate out;
    out.receiver_id = trace.receiver_id;
    out.gain = gain;
    out.distance = dist;
    out.iterations = lm.iterations;
    out.converged = lm.converged;
    const std::vector<double> final_res = residual_fn(lm.beta);
    out.sse = 0.0;
    for (double v : final_res) out.sse += v * v;
    try {
        out.r_square = goodness_of_fit(final_res, obs).r_square;
    } catch (const Error&) {
        out.r_square = std::numeric_limits<double>::quiet_NaN();  // flat trace
    }
    return out;
}

IntervalSweepResult max_sample_interval_sweep(const ValidatedScenario& scenario,
                                              double total_time,
                                              std::span<const double> candidate_intervals,
                                              const SimOptions& options, std::uint64_t master_seed,
                                              int trials, double tolerance_factor,
                                              const EstimateOptions& fit_options) {
    if (!(total_time > 0.0)) fail(Err::NonPositiveParameter, "total_time must be > 0");
    if (candidate_intervals.empty()) fail(Err::InvalidArgument, "no candidate intervals");
    if (trials <= 0) fail(Err::NonPositiveParameter, "trial count must be > 0");
    if (!(tolerance_factor >= 1.0)) fail(Err::InvalidArgument, "tolerance_factor must be >= 1");

    // Validate candidates up front: each must tile total_time into >= 2 samples
    // and be an integer multiple of the simulation step.
    std::vector<SamplingPlan> plans;
    plans.reserve(candidate_intervals.size());
    for (double interval : candidate_intervals) {
        if (!(interval > 0.0)) fail(Err::NonPositiveParameter, "candidate interval must be > 0");
        const double n = total_time / interval;
        const double rounded = std::nearbyint(n);
        if (rounded < 2.0 || std::fabs(n - rounded) > 1e-9 * n)
            fail(Err::InvalidArgument,
                 "interval " + std::to_string(interval) + " does not tile the horizon");
        plans.push_back({interval, static_cast<int>(rounded)});
    }

    double finest = candidate_intervals[0];
    for (double v : candidate_intervals) finest = std::min(finest, v);
    const SamplingPlan base_plan{finest, static_cast<int>(std::nearbyint(total_time / finest))};

    // One event set per trial, re-binned for every candidate.
    const std::size_t n_trials = static_cast<std::size_t>(trials);
    std::vector<TrialEvents> events(n_trials);
    SimOptions inner = options;
    inner.n_threads = 1;
    parallel_items(n_trials, options.n_threads, [&](std::size_t i) {
        events[i] = simulate_trial_events(scenario, base_plan, inner, derive_seed(master_seed, i));
    });

    const auto& receivers = scenario.receivers();
    const Scenario& scen = scenario.scenario();
    IntervalSweepResult out;
    std::vector<double> interval_mean(plans.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t c = 0; c < plans.size(); ++c) {
        std::vector<double> err_sum(receivers.size(), 0.0);
        std::vector<int> err_n(receivers.size(), 0);
        for (std::size_t i = 0; i < n_trials; ++i) {
            const auto traces = bin_events(events[i], plans[c], receivers);
            for (std::size_t k = 0; k < receivers.size(); ++k) {
                ModelContext ctx{static_cast<double>(scen.molecule_budget), receivers[k].radius,
                                 scen.medium.diffusion_coefficient, {}};
                try {
                    const DistanceEstimate est = estimate_distance(traces[k], ctx, fit_options);
                    err_sum[k] += normalized_distance_error(est.distance, scenario.true_distance(k));
                    ++err_n[k];
                } catch (const Error&) {
                    // unusable trace for this candidate; skip the pair
                }
            }
        }
        double total = 0.0;
        int total_n = 0;
        for (std::size_t k = 0; k < receivers.size(); ++k) {
            IntervalSweepCell cell;
            cell.sample_interval = plans[c].sample_interval;
            cell.receiver_id = receivers[k].id;
            cell.fits = err_n[k];
            cell.mean_error = err_n[k] > 0 ? err_sum[k] / err_n[k]
                                           : std::numeric_limits<double>::quiet_NaN();
            out.cells.push_back(cell);
            total += err_sum[k];
            total_n += err_n[k];
        }
        if (total_n > 0) interval_mean[c] = total / total_n;
    }

    std::size_t finest_idx = 0;
    for (std::size_t c = 0; c < plans.size(); ++c)
        if (plans[c].sample_interval < plans[finest_idx].sample_interval) finest_idx = c;
    const double baseline = interval_mean[finest_idx];
    if (std::isfinite(baseline)) {
        for (std::size_t c = 0; c < plans.size(); ++c) {
            if (!std::isfinite(interval_mean[c])) continue;
            if (interval_mean[c] <= tolerance_factor * baseline)
                out.max_usable_interval =
                    std::max(out.max_usable_interval, plans[c].sample_interval);
        }
    }
    return out;
}

}  // namespace mcvd
