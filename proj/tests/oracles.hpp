#pragma once

// Frozen reference values and the shared property battery used by both the
// doctest suites and the acceptance binary. Reference numbers were computed
// with an arbitrary-precision library (30 significant digits) and pasted in;
// nothing here calls back into the code under test to produce expectations.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mcvd/channel_models.hpp"
#include "mcvd/distance_estimation.hpp"
#include "mcvd/lm_solver.hpp"
#include "mcvd/localization.hpp"
#include "mcvd/particle_sim.hpp"
#include "mcvd/rng.hpp"
#include "mcvd/scenario.hpp"

namespace oracles {

struct ErfcPoint {
    double x;
    double value;
};

// erfc on [-6, 27.6]; the last entry underflows double and must come back 0.
inline constexpr std::array<ErfcPoint, 28> kErfcTable{{
    {-6, 1.99999999999999997848},
    {-2, 1.99532226501895273416},
    {-1, 1.84270079294971486934},
    {-0.5, 1.52049987781304653768},
    {-0.1, 1.11246291601828489220},
    {0, 1.00000000000000000000},
    {0.05, 0.943628022202983376169},
    {0.1, 0.887537083981715107797},
    {0.1414213562373095, 0.841480581121793959313},
    {0.25, 0.723673609831763067015},
    {0.5, 0.479500122186953462317},
    {0.7, 0.322198806162581527024},
    {1, 0.157299207050285130659},
    {1.25, 0.0770998717435417698635},
    {1.5, 0.0338948535246892729330},
    {2, 0.00467773498104726583793},
    {2.4, 0.000688513896645078569745},
    {2.5, 0.000406952017444958939564},
    {2.6, 0.000236034416529349203991},
    {3, 0.0000220904969985854413728},
    {4, 1.54172579002800188522e-8},
    {5, 1.53745979442803485019e-12},
    {6, 2.15197367124989131166e-17},
    {8, 1.12242971729829270800e-29},
    {12, 1.35626116920590421278e-64},
    {20, 5.39586561160790092893e-176},
    {27, 5.23704892378925568502e-319},
    {27.6, 0.0},
}};

// Q^-1 * siso_cumulative for r=1, d=5, D=100 at t=2 s: 0.2*erfc(4/sqrt(800)).
inline constexpr double kSisoProbability = 0.168296116224358790783;

// Standard normal CDF at 0.5, 1, 2 (for sampler distribution checks).
inline constexpr double kPhiHalf = 0.691462461274013103638;
inline constexpr double kPhiOne = 0.841344746068542948585;
inline constexpr double kPhiTwo = 0.9772498680518207928;

struct PropertyOutcome {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

inline mcvd::ValidatedScenario small_scenario() {
    mcvd::Scenario s;
    s.transmitter = {0, 0, 0};
    s.receivers = {{1, {0, 5, 0}, 1.0}, {2, {0, 0, 10}, 1.0}, {3, {0, -5, 0}, 1.0},
                   {4, {10, 0, 0}, 1.0}};
    s.medium = {100.0, {0, 0, 0}};
    s.molecule_budget = 4000;
    return mcvd::validate_scenario(s);
}

inline std::vector<mcvd::CumulativeTrace> synthetic_traces(const mcvd::ValidatedScenario& scen,
                                                           const mcvd::SamplingPlan& plan,
                                                           double gain) {
    std::vector<mcvd::CumulativeTrace> traces;
    const mcvd::Scenario& s = scen.scenario();
    for (std::size_t k = 0; k < s.receivers.size(); ++k) {
        mcvd::CumulativeTrace tr;
        tr.receiver_id = s.receivers[k].id;
        mcvd::ModelContext ctx{static_cast<double>(s.molecule_budget), s.receivers[k].radius,
                               s.medium.diffusion_coefficient, {}};
        for (int n = 1; n <= plan.num_samples; ++n) {
            const double t = n * plan.sample_interval;
            tr.sample_times.push_back(t);
            // Noise-free model counts, rounded to the nearest integer so the
            // trace stays integral; the 1e-4 um bar tolerates the rounding.
            tr.counts.push_back(static_cast<std::int64_t>(
                std::llround(mcvd::fit_model({gain, scen.true_distance(k)}, ctx, t))));
        }
        traces.push_back(std::move(tr));
    }
    return traces;
}

}  // namespace detail

// The non-stochastic property battery (acceptance criterion: every item must
// pass exactly). Returns one outcome per item.
inline std::vector<PropertyOutcome> run_property_battery() {
    using namespace mcvd;
    std::vector<PropertyOutcome> out;

    // 1. conservation + monotonicity under both absorption policies
    {
        const ValidatedScenario scen = detail::small_scenario();
        const SamplingPlan plan{0.05, 20};
        bool ok = true;
        std::string detail_msg;
        for (AbsorptionPolicy policy : {AbsorptionPolicy::EndOfStep, AbsorptionPolicy::ChordBridge}) {
            const SimOptions opt{1e-3, policy, 1};
            const auto traces = simulate_trial(scen, plan, opt, 42);
            std::int64_t total = 0;
            for (const CumulativeTrace& tr : traces) {
                for (std::size_t n = 1; n < tr.counts.size(); ++n)
                    if (tr.counts[n] < tr.counts[n - 1]) ok = false;
                if (tr.counts.front() < 0) ok = false;
                total += tr.final_count();
            }
            if (total > scen.scenario().molecule_budget || total <= 0) ok = false;
            if (!ok && detail_msg.empty())
                detail_msg = "violated under policy " +
                             std::string(policy == AbsorptionPolicy::EndOfStep ? "end_of_step"
                                                                               : "chord_bridge");
        }
        out.push_back({"conservation and trace monotonicity", ok, detail_msg});
    }

    // 2. bit-exact reproducibility across thread counts
    {
        const ValidatedScenario scen = detail::small_scenario();
        const SamplingPlan plan{0.05, 20};
        bool ok = true;
        const auto base = simulate_trial(scen, plan, {1e-3, AbsorptionPolicy::ChordBridge, 1}, 7);
        for (int threads : {2, 4}) {
            const auto other =
                simulate_trial(scen, plan, {1e-3, AbsorptionPolicy::ChordBridge, threads}, 7);
            for (std::size_t k = 0; k < base.size(); ++k)
                if (base[k].counts != other[k].counts) ok = false;
        }
        out.push_back({"bit-exact across thread counts", ok, ""});
    }

    // 3. erfc against the frozen table, absolute error <= 1e-12
    {
        double worst = 0.0;
        for (const ErfcPoint& p : kErfcTable)
            worst = std::max(worst, std::fabs(mcvd::erfc(p.x) - p.value));
        out.push_back({"erfc vs frozen table", worst <= 1e-12,
                       detail::fmt("worst absolute error %.3g", worst)});
    }

    // 4. model Jacobian and gradient_H vs central finite differences
    {
        double worst = 0.0;
        const ModelContext ctx{10000.0, 1.0, 100.0, {}};
        auto rel = [](double a, double b) {
            return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-9});
        };
        for (double a : {0.2, 0.68, 1.0}) {
            for (double d : {2.0, 5.0, 10.0, 20.0}) {
                for (double t : {0.1, 1.0, 2.0}) {
                    const auto grad = fit_model_jacobian({a, d}, ctx, t);
                    const double ha = 1e-6 * std::max(1.0, std::fabs(a));
                    const double hd = 1e-6 * std::max(1.0, std::fabs(d));
                    const double fa = (fit_model({a + ha, d}, ctx, t) -
                                       fit_model({a - ha, d}, ctx, t)) / (2 * ha);
                    const double fd = (fit_model({a, d + hd}, ctx, t) -
                                       fit_model({a, d - hd}, ctx, t)) / (2 * hd);
                    worst = std::max({worst, rel(grad[0], fa), rel(grad[1], fd)});
                }
            }
        }
        std::vector<Anchor> anchors = {{{0, 5, 0}, 5.1, 1},
                                       {{0, 0, 10}, 9.8, 2},
                                       {{0, -5, 0}, 5.2, 3},
                                       {{10, 0, 0}, 10.3, 4}};
        NormalSampler rng(99);
        for (int i = 0; i < 20; ++i) {
            const Vec3 p{3.0 * rng.normal(), 3.0 * rng.normal(), 3.0 * rng.normal()};
            const Vec3 g = gradient_H(p, anchors);
            const double h = 1e-6 * std::max({1.0, std::fabs(p.x), std::fabs(p.y), std::fabs(p.z)});
            const double fx = (objective_H({p.x + h, p.y, p.z}, anchors) -
                               objective_H({p.x - h, p.y, p.z}, anchors)) / (2 * h);
            const double fy = (objective_H({p.x, p.y + h, p.z}, anchors) -
                               objective_H({p.x, p.y - h, p.z}, anchors)) / (2 * h);
            const double fz = (objective_H({p.x, p.y, p.z + h}, anchors) -
                               objective_H({p.x, p.y, p.z - h}, anchors)) / (2 * h);
            worst = std::max({worst, rel(g.x, fx), rel(g.y, fy), rel(g.z, fz)});
        }
        out.push_back({"derivatives vs finite differences", worst <= 1e-6,
                       detail::fmt("worst relative error %.3g", worst)});
    }

    // 5. multilateration exact recovery on exact distances
    {
        const Vec3 tn{1.25, -2.0, 3.5};
        std::vector<Anchor> anchors;
        const Vec3 centers[5] = {{0, 5, 0}, {0, 0, 10}, {0, -5, 0}, {10, 0, 0}, {-4, 3, -6}};
        for (int k = 0; k < 5; ++k) anchors.push_back({centers[k], distance(centers[k], tn), k});
        const Vec3 init = multilaterate_init(anchors);
        const double err = distance(init, tn);
        out.push_back({"multilateration exact recovery", err <= 1e-9,
                       detail::fmt("recovery error %.3g um", err)});
    }

    // 6. LM accepted-step SSR monotonicity on a real fit
    {
        const ModelContext base{10000.0, 1.0, 100.0, {}};
        ModelContext ctx = base;
        std::vector<double> ts, obs;
        for (int n = 1; n <= 100; ++n) {
            const double t = 0.02 * n;
            ts.push_back(t);
            // mild deterministic wobble so LM needs several iterations
            obs.push_back(fit_model({0.7, 6.0}, base, t) * (1.0 + 0.02 * std::sin(7.0 * t)));
        }
        ctx.sample_times = ts;
        CumulativeTrace tr;
        tr.receiver_id = 1;
        tr.sample_times = ts;
        for (double v : obs) tr.counts.push_back(static_cast<std::int64_t>(std::llround(v)));
        const DistanceEstimate est = estimate_distance(tr, ctx, EstimateOptions{});
        bool ok = est.converged;
        // re-run through the raw solver to inspect the trajectory
        const std::vector<double> beta0{0.5, 8.0};
        auto resid = [&](std::span<const double> beta) {
            std::vector<double> r(ts.size());
            for (std::size_t n = 0; n < ts.size(); ++n)
                r[n] = (static_cast<double>(tr.counts[n]) -
                        fit_model({beta[0], beta[1]}, base, ts[n])) / base.molecule_budget;
            return r;
        };
        auto jac = [&](std::span<const double> beta) {
            std::vector<double> J(2 * ts.size());
            for (std::size_t n = 0; n < ts.size(); ++n) {
                const auto g = fit_model_jacobian({beta[0], beta[1]}, base, ts[n]);
                J[2 * n] = -g[0] / base.molecule_budget;
                J[2 * n + 1] = -g[1] / base.molecule_budget;
            }
            return J;
        };
        const LmResult res = lm_minimize(resid, jac, beta0, LmOptions{});
        for (std::size_t i = 1; i < res.trajectory.size(); ++i)
            if (res.trajectory[i] > res.trajectory[i - 1] * (1.0 + 1e-12)) ok = false;
        out.push_back({"LM accepted-step SSR monotonicity", ok,
                       detail::fmt("iterations %.0f, final sse %.3g",
                                   static_cast<double>(res.iterations), res.sse)});
    }

    // 7. synthetic end-to-end localization, noise-free traces. A large budget
    // keeps the integer rounding of the synthetic counts far below the bar.
    {
        Scenario big = detail::small_scenario().scenario();
        big.molecule_budget = 4000000;
        const ValidatedScenario scen = validate_scenario(big);
        const SamplingPlan plan{0.02, 100};
        const auto traces = detail::synthetic_traces(scen, plan, 1.0);
        const LocalizationResult res = localize(traces, scen, LocalizeOptions{});
        const double err = location_error(res.position, scen.scenario().transmitter);
        out.push_back({"synthetic end-to-end localization", err <= 1e-4,
                       detail::fmt("position error %.3g um", err)});
    }

    // 8. steepest descent vs brute-force grid (0.05 um cells, noisy anchors)
    {
        std::vector<Anchor> anchors = {{{0, 5, 0}, 5.15, 1},
                                       {{0, 0, 10}, 9.72, 2},
                                       {{0, -5, 0}, 4.9, 3},
                                       {{10, 0, 0}, 10.2, 4}};
        const Vec3 init = multilaterate_init(anchors);
        const SdResult sd = steepest_descent(init, anchors);
        constexpr double cell = 0.05;
        constexpr int half = 30;
        Vec3 best{};
        double best_h = std::numeric_limits<double>::infinity();
        for (int ix = -half; ix <= half; ++ix)
            for (int iy = -half; iy <= half; ++iy)
                for (int iz = -half; iz <= half; ++iz) {
                    const Vec3 p{init.x + ix * cell, init.y + iy * cell, init.z + iz * cell};
                    const double h = objective_H(p, anchors);
                    if (h < best_h) {
                        best_h = h;
                        best = p;
                    }
                }
        const double gap = std::max({std::fabs(sd.position.x - best.x),
                                     std::fabs(sd.position.y - best.y),
                                     std::fabs(sd.position.z - best.z)});
        out.push_back({"steepest descent vs grid search", gap <= cell + 1e-12,
                       detail::fmt("max coordinate gap %.3g um", gap)});
    }

    return out;
}

}  // namespace oracles
