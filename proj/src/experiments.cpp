#include "mcvd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "mcvd/channel_models.hpp"
#include "mcvd/errors.hpp"
#include "mcvd/parallel.hpp"
#include "mcvd/rng.hpp"

namespace mcvd {
namespace {

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string g9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Err::Io, "cannot open output file: " + path);
    return out;
}

void stamp(std::ofstream& out, const RunMeta& meta) {
    out << "# config_hash=" << meta.config_hash << "\n";
    out << "# master_seed=" << meta.master_seed << "\n";
}

PipelineTrialRecord localize_one(int trial_idx, const std::vector<CumulativeTrace>& traces,
                                 const ValidatedScenario& scenario, const LocalizeOptions& loc) {
    PipelineTrialRecord rec;
    rec.trial = trial_idx;
    try {
        rec.result = localize(traces, scenario, loc);
        rec.delta_p = location_error(rec.result.position, scenario.scenario().transmitter);
        rec.ok = true;
    } catch (const Error& e) {
        rec.error = err_name(e.code());
    }
    return rec;
}

PipelineSummary summarize_records(std::vector<PipelineTrialRecord> records) {
    PipelineSummary out;
    out.records = std::move(records);
    std::vector<double> ok_errors;
    for (const PipelineTrialRecord& rec : out.records) {
        if (rec.ok) ok_errors.push_back(rec.delta_p);
        else ++out.failures;
    }
    if (!ok_errors.empty()) out.stats = summarize(ok_errors);
    return out;
}

const char* axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::None: return "none";
        case SweepAxis::Radius: return "radius";
        case SweepAxis::Budget: return "budget";
        case SweepAxis::Diffusion: return "diffusion";
        case SweepAxis::FlowY: return "flow_y";
        case SweepAxis::TnY: return "tn_y";
        case SweepAxis::SampleInterval: return "sample_interval";
        case SweepAxis::SubsetSize: return "subset_size";
        case SweepAxis::Topology: return "topology";
    }
    return "unknown";
}

Scenario apply_axis(const Scenario& base, SweepAxis axis, double value) {
    Scenario out = base;
    switch (axis) {
        case SweepAxis::Radius:
            for (Receiver& rx : out.receivers) rx.radius = value;
            break;
        case SweepAxis::Budget: {
            const double r = std::nearbyint(value);
            if (!(r > 0.0) || std::fabs(value - r) > 0.0)
                fail(Err::InvalidArgument, "budget sweep values must be positive integers");
            out.molecule_budget = static_cast<std::int64_t>(r);
            break;
        }
        case SweepAxis::Diffusion:
            out.medium.diffusion_coefficient = value;
            break;
        case SweepAxis::FlowY:
            out.medium.flow = {0.0, value, 0.0};
            break;
        case SweepAxis::TnY:
            out.transmitter = {0.0, value, 0.0};
            break;
        case SweepAxis::Topology:
            if (!(value > 0.0)) fail(Err::InvalidArgument, "topology scale must be > 0");
            for (Receiver& rx : out.receivers)
                rx.center = {rx.center.x * value, rx.center.y * value, rx.center.z * value};
            break;
        default:
            break;
    }
    return out;
}

double rel_gap(double a, double b) {
    return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-9});
}

}  // namespace

PipelineSummary run_pipeline(const ValidatedScenario& scenario, const SamplingPlan& plan,
                             const SimOptions& sim, std::uint64_t master_seed, int trials,
                             const LocalizeOptions& loc) {
    if (trials <= 0) fail(Err::NonPositiveParameter, "trial count must be > 0");
    std::vector<PipelineTrialRecord> records(static_cast<std::size_t>(trials));
    SimOptions inner = sim;
    inner.n_threads = 1;
    parallel_items(records.size(), sim.n_threads, [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(master_seed, i);
        PipelineTrialRecord rec;
        try {
            const auto traces = simulate_trial(scenario, plan, inner, seed);
            rec = localize_one(static_cast<int>(i), traces, scenario, loc);
        } catch (const Error& e) {
            rec.trial = static_cast<int>(i);
            rec.error = err_name(e.code());
        }
        records[i] = std::move(rec);
    });
    return summarize_records(std::move(records));
}

PipelineSummary pipeline_from_traces(const std::vector<std::vector<CumulativeTrace>>& trials,
                                     const ValidatedScenario& scenario,
                                     const LocalizeOptions& loc) {
    std::vector<PipelineTrialRecord> records;
    records.reserve(trials.size());
    for (std::size_t i = 0; i < trials.size(); ++i)
        records.push_back(localize_one(static_cast<int>(i), trials[i], scenario, loc));
    return summarize_records(std::move(records));
}

std::vector<SweepCell> run_sweep(const RunConfig& cfg, int n_threads) {
    if (cfg.sweep_axis == SweepAxis::None) fail(Err::InvalidArgument, "no sweep axis configured");
    if (cfg.sweep_values.empty()) fail(Err::InvalidArgument, "no sweep values configured");

    const std::vector<Vec3> tns = (cfg.sweep_axis == SweepAxis::TnY)
                                      ? std::vector<Vec3>{Vec3{}}
                                      : (cfg.tn_positions.empty()
                                             ? std::vector<Vec3>{cfg.scenario.transmitter}
                                             : cfg.tn_positions);
    SimOptions sim{cfg.sim_step, cfg.policy, n_threads};
    LocalizeOptions loc;
    loc.subset_size = cfg.subset_size;

    std::vector<SweepCell> cells;
    const bool estimation_stage = cfg.sweep_axis == SweepAxis::SampleInterval ||
                                  cfg.sweep_axis == SweepAxis::SubsetSize;

    if (!estimation_stage) {
        for (std::size_t a = 0; a < cfg.sweep_values.size(); ++a) {
            const double value = cfg.sweep_values[a];
            for (std::size_t j = 0; j < tns.size(); ++j) {
                SweepCell cell;
                cell.axis_value = value;
                cell.tn = cfg.sweep_axis == SweepAxis::TnY ? Vec3{0.0, value, 0.0} : tns[j];
                const std::uint64_t cell_seed = derive_seed(derive_seed(cfg.seed, a), j);
                try {
                    Scenario variant = apply_axis(cfg.scenario, cfg.sweep_axis, value);
                    variant.transmitter = cell.tn;
                    const ValidatedScenario scen = validate_scenario(variant);
                    const PipelineSummary summary =
                        run_pipeline(scen, cfg.plan, sim, cell_seed, cfg.trials, loc);
                    for (const PipelineTrialRecord& rec : summary.records)
                        if (rec.ok) cell.delta_p.push_back(rec.delta_p);
                    cell.failures = summary.failures;
                } catch (const Error&) {
                    cell.failures = cfg.trials;  // whole cell invalid (e.g. overlap at this radius)
                }
                cells.push_back(std::move(cell));
            }
        }
        return cells;
    }

    // Estimation-stage sweep: one simulated event set per (TN, trial), shared
    // across every axis value.
    const double total_time = cfg.plan.total_time();
    for (std::size_t j = 0; j < tns.size(); ++j) {
        Scenario variant = cfg.scenario;
        variant.transmitter = tns[j];
        const ValidatedScenario vs = validate_scenario(variant);
        const std::uint64_t tn_seed = derive_seed(cfg.seed, j);

        std::vector<TrialEvents> events(static_cast<std::size_t>(cfg.trials));
        SimOptions inner = sim;
        inner.n_threads = 1;
        parallel_items(events.size(), n_threads, [&](std::size_t t) {
            events[t] = simulate_trial_events(vs, cfg.plan, inner, derive_seed(tn_seed, t));
        });

        for (double value : cfg.sweep_values) {
            SweepCell cell;
            cell.axis_value = value;
            cell.tn = tns[j];

            SamplingPlan plan = cfg.plan;
            LocalizeOptions cell_loc = loc;
            if (cfg.sweep_axis == SweepAxis::SampleInterval) {
                const double n = total_time / value;
                const double rounded = std::nearbyint(n);
                if (!(value > 0.0) || rounded < 2.0 || std::fabs(n - rounded) > 1e-9 * n)
                    fail(Err::InvalidArgument, "sample interval " + std::to_string(value) +
                                                   " does not tile the horizon");
                plan = {value, static_cast<int>(rounded)};
            } else {
                const double rounded = std::nearbyint(value);
                if (std::fabs(value - rounded) > 0.0 || rounded < 0.0)
                    fail(Err::InvalidArgument, "subset size values must be integers >= 0");
                cell_loc.subset_size = static_cast<int>(rounded);
            }

            for (std::size_t t = 0; t < events.size(); ++t) {
                try {
                    const auto traces = bin_events(events[t], plan, vs.receivers());
                    const PipelineTrialRecord rec =
                        localize_one(static_cast<int>(t), traces, vs, cell_loc);
                    if (rec.ok) cell.delta_p.push_back(rec.delta_p);
                    else ++cell.failures;
                } catch (const Error&) {
                    ++cell.failures;
                }
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

std::vector<ProbMapRow> run_probability_map(const RunConfig& cfg, int n_threads) {
    const ProbMapSpec& map = cfg.map;
    if (!map.present) fail(Err::InvalidArgument, "config has no probability-map grid");
    if (map.nx < 1 || map.ny < 1) fail(Err::InvalidArgument, "map grid needs nx, ny >= 1");
    if (map.trials < 1) fail(Err::InvalidArgument, "map_trials must be >= 1");

    SimOptions sim{cfg.sim_step, cfg.policy, n_threads};
    std::vector<ProbMapRow> rows;
    for (int iy = 0; iy < map.ny; ++iy) {
        for (int ix = 0; ix < map.nx; ++ix) {
            const std::size_t point_index =
                static_cast<std::size_t>(iy) * static_cast<std::size_t>(map.nx) +
                static_cast<std::size_t>(ix);
            const double x = map.nx == 1 ? map.x0
                                         : map.x0 + (map.x1 - map.x0) * ix / (map.nx - 1);
            const double y = map.ny == 1 ? map.y0
                                         : map.y0 + (map.y1 - map.y0) * iy / (map.ny - 1);
            const Vec3 tn{x, y, map.z};

            Scenario moved = cfg.scenario;
            moved.transmitter = tn;
            bool valid = true;
            try {
                validate_scenario(moved);
            } catch (const Error&) {
                valid = false;
            }
            if (!valid) {
                for (const Receiver& rx : cfg.scenario.receivers)
                    rows.push_back({x, y, map.z, rx.id,
                                    std::numeric_limits<double>::quiet_NaN(), true});
                continue;
            }
            const Vec3 grid[1] = {tn};
            const auto entries = receiving_probability_map(
                cfg.scenario, cfg.plan, grid, sim, derive_seed(cfg.seed, point_index), map.trials);
            for (const ProbabilityMapEntry& e : entries)
                rows.push_back({x, y, map.z, e.receiver_id, e.probability, false});
        }
    }
    return rows;
}

OracleReport run_oracle(const RunConfig& cfg, int n_threads) {
    OracleReport report;
    const ValidatedScenario scen = validate_scenario(cfg.scenario);
    const Scenario& s = scen.scenario();

    // (i) steepest descent vs brute-force grid. Distances get a deterministic
    // +/-2% perturbation so the minimum is away from the init and H > 0 there.
    std::vector<Anchor> anchors;
    for (std::size_t k = 0; k < s.receivers.size(); ++k) {
        const double wobble = (k % 2 == 0) ? 1.02 : 0.98;
        anchors.push_back({s.receivers[k].center, scen.true_distance(k) * wobble,
                           s.receivers[k].id});
    }
    const Vec3 seed_point = multilaterate_init(anchors);
    const SdResult sd = steepest_descent(seed_point, anchors);
    constexpr double kCell = 0.05;
    constexpr int kHalf = 40;  // box half-width = 2 um
    Vec3 best{};
    double best_h = std::numeric_limits<double>::infinity();
    for (int ix = -kHalf; ix <= kHalf; ++ix) {
        for (int iy = -kHalf; iy <= kHalf; ++iy) {
            for (int iz = -kHalf; iz <= kHalf; ++iz) {
                const Vec3 p{seed_point.x + ix * kCell, seed_point.y + iy * kCell,
                             seed_point.z + iz * kCell};
                const double h = objective_H(p, anchors);
                if (h < best_h) {
                    best_h = h;
                    best = p;
                }
            }
        }
    }
    report.grid_cell = kCell;
    report.sd_grid_gap = std::max({std::fabs(sd.position.x - best.x),
                                   std::fabs(sd.position.y - best.y),
                                   std::fabs(sd.position.z - best.z)});

    // (ii) one-receiver simulation vs the closed form at the horizon.
    Scenario solo = s;
    solo.receivers = {s.receivers.front()};
    const ValidatedScenario solo_scen = validate_scenario(solo);
    SimOptions sim{cfg.sim_step, cfg.policy, n_threads};
    const int trials = std::max(cfg.trials, 1);
    const TrialEnsemble ens =
        run_trials(solo_scen, cfg.plan, sim, derive_seed(cfg.seed, 1), trials);
    double mean_final = 0.0;
    for (const auto& trial : ens.trials)
        mean_final += static_cast<double>(trial.front().final_count());
    mean_final /= static_cast<double>(trials);
    ModelContext ctx{static_cast<double>(s.molecule_budget), solo.receivers.front().radius,
                     s.medium.diffusion_coefficient, {}};
    const double expected =
        siso_cumulative(ctx, solo_scen.true_distance(0), cfg.plan.total_time());
    report.siso_rel_dev = std::fabs(mean_final - expected) / expected;

    // (iii) analytic derivatives vs central finite differences.
    const double r = s.receivers.front().radius;
    for (double a : {0.2, 0.5, 1.0}) {
        for (double d : {2.0, 5.0, 10.0, 20.0}) {
            if (d <= r * 1.05) continue;
            for (double t : {0.1, 1.0, 2.0}) {
                const auto grad = fit_model_jacobian({a, d}, ctx, t);
                const double ha = 1e-6 * std::max(1.0, std::fabs(a));
                const double fd_a = (fit_model({a + ha, d}, ctx, t) -
                                     fit_model({a - ha, d}, ctx, t)) / (2.0 * ha);
                const double hd = 1e-6 * std::max(1.0, std::fabs(d));
                const double fd_d = (fit_model({a, d + hd}, ctx, t) -
                                     fit_model({a, d - hd}, ctx, t)) / (2.0 * hd);
                report.jac_gain_rel = std::max(report.jac_gain_rel, rel_gap(grad[0], fd_a));
                report.jac_dist_rel = std::max(report.jac_dist_rel, rel_gap(grad[1], fd_d));
            }
        }
    }

    NormalSampler rng(derive_seed(cfg.seed, 2));
    for (int i = 0; i < 20; ++i) {
        const Vec3 p{s.transmitter.x + 5.0 * rng.normal(), s.transmitter.y + 5.0 * rng.normal(),
                     s.transmitter.z + 5.0 * rng.normal()};
        const Vec3 grad = gradient_H(p, anchors);
        for (int axis = 0; axis < 3; ++axis) {
            const double h = 1e-6 * std::max({1.0, std::fabs(p.x), std::fabs(p.y), std::fabs(p.z)});
            Vec3 hi = p, lo = p;
            double analytic = 0.0;
            if (axis == 0) { hi.x += h; lo.x -= h; analytic = grad.x; }
            if (axis == 1) { hi.y += h; lo.y -= h; analytic = grad.y; }
            if (axis == 2) { hi.z += h; lo.z -= h; analytic = grad.z; }
            const double fd = (objective_H(hi, anchors) - objective_H(lo, anchors)) / (2.0 * h);
            report.grad_h_rel = std::max(report.grad_h_rel, rel_gap(analytic, fd));
        }
    }

    report.pass = report.sd_grid_gap <= report.grid_cell + 1e-12 &&
                  report.siso_rel_dev <= 0.03 && report.jac_gain_rel <= 1e-6 &&
                  report.jac_dist_rel <= 1e-6 && report.grad_h_rel <= 1e-6;
    return report;
}

void write_trace_csv(const std::string& path, const TrialEnsemble& ensemble, const RunMeta& meta) {
    std::ofstream out = open_out(path);
    stamp(out, meta);
    out << "trial,receiver,t,count\n";
    for (std::size_t trial = 0; trial < ensemble.trials.size(); ++trial) {
        for (const CumulativeTrace& trace : ensemble.trials[trial]) {
            for (std::size_t n = 0; n < trace.counts.size(); ++n) {
                out << trial << ',' << trace.receiver_id << ',' << g9(trace.sample_times[n])
                    << ',' << trace.counts[n] << '\n';
            }
        }
    }
    if (!out) fail(Err::Io, "write failed: " + path);
}

std::vector<std::vector<CumulativeTrace>> read_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Err::Io, "cannot open trace file: " + path);

    std::vector<std::vector<CumulativeTrace>> trials;
    std::string line;
    bool saw_header = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != "trial,receiver,t,count")
                fail(Err::ConfigParse, path + ": unexpected trace header '" + line + "'");
            saw_header = true;
            continue;
        }
        long trial = -1, receiver = -1, count = -1;
        double t = 0.0;
        if (std::sscanf(line.c_str(), "%ld,%ld,%lf,%ld", &trial, &receiver, &t, &count) != 4)
            fail(Err::ConfigParse,
                 path + " line " + std::to_string(line_no) + ": malformed trace row");
        if (trial < 0 || count < 0)
            fail(Err::ConfigParse,
                 path + " line " + std::to_string(line_no) + ": negative trial or count");
        if (static_cast<std::size_t>(trial) >= trials.size()) trials.resize(trial + 1);
        auto& traces = trials[static_cast<std::size_t>(trial)];
        CumulativeTrace* trace = nullptr;
        for (CumulativeTrace& existing : traces)
            if (existing.receiver_id == receiver) trace = &existing;
        if (trace == nullptr) {
            traces.emplace_back();
            trace = &traces.back();
            trace->receiver_id = static_cast<int>(receiver);
        }
        trace->sample_times.push_back(t);
        trace->counts.push_back(count);
    }
    if (!saw_header) fail(Err::ConfigParse, path + ": empty trace file");
    return trials;
}

void write_estimates_csv(const std::string& path,
                         const std::vector<std::vector<DistanceEstimate>>& per_trial,
                         const RunMeta& meta) {
    std::ofstream out = open_out(path);
    stamp(out, meta);
    out << "trial,receiver,a,d,sse,r_square,iterations\n";
    for (std::size_t trial = 0; trial < per_trial.size(); ++trial) {
        for (const DistanceEstimate& est : per_trial[trial]) {
            out << trial << ',' << est.receiver_id << ',' << g17(est.gain) << ','
                << g17(est.distance) << ',' << g17(est.sse) << ',' << g17(est.r_square) << ','
                << est.iterations << '\n';
        }
    }
    if (!out) fail(Err::Io, "write failed: " + path);
}

void write_pipeline_report(const std::string& path, const PipelineSummary& summary,
                           const RunMeta& meta) {
    std::ofstream out = open_out(path);
    stamp(out, meta);
    for (const PipelineTrialRecord& rec : summary.records) {
        out << "trial = " << rec.trial << "\n";
        if (!rec.ok) {
            out << "status = failed\n";
            out << "error = " << rec.error << "\n\n";
            continue;
        }
        const LocalizationResult& res = rec.result;
        out << "status = ok\n";
        out << "p_init = " << g17(res.initial_position.x) << ' ' << g17(res.initial_position.y)
            << ' ' << g17(res.initial_position.z) << "\n";
        out << "p_hat = " << g17(res.position.x) << ' ' << g17(res.position.y) << ' '
            << g17(res.position.z) << "\n";
        out << "objective = " << g17(res.objective) << "\n";
        out << "sd_iterations = " << res.sd_iterations << "\n";
        out << "used_receivers =";
        for (int id : res.used_receiver_ids) out << ' ' << id;
        out << "\n";
        for (const DistanceEstimate& est : res.estimates) {
            out << "estimate_" << est.receiver_id << " = " << g17(est.gain) << ' '
                << g17(est.distance) << ' ' << g17(est.sse) << ' ' << g17(est.r_square) << '\n';
        }
        out << "delta_p = " << g17(rec.delta_p) << "\n\n";
    }
    out << "summary_trials = " << summary.records.size() << "\n";
    out << "summary_failures = " << summary.failures << "\n";
    if (summary.stats.n > 0) {
        out << "summary_mean = " << g17(summary.stats.mean) << "\n";
        out << "summary_median = " << g17(summary.stats.median) << "\n";
        out << "summary_q25 = " << g17(summary.stats.q25) << "\n";
        out << "summary_q75 = " << g17(summary.stats.q75) << "\n";
        out << "summary_min = " << g17(summary.stats.min) << "\n";
        out << "summary_max = " << g17(summary.stats.max) << "\n";
    }
    if (!out) fail(Err::Io, "write failed: " + path);
}

void write_sweep_csv(const std::string& raw_path, const std::string& summary_path,
                     const RunConfig& cfg, const std::vector<SweepCell>& cells,
                     const RunMeta& meta) {
    const char* axis = axis_name(cfg.sweep_axis);
    {
        std::ofstream out = open_out(raw_path);
        stamp(out, meta);
        out << "axis,value,tn_x,tn_y,tn_z,trial,delta_p\n";
        for (const SweepCell& cell : cells) {
            for (std::size_t t = 0; t < cell.delta_p.size(); ++t) {
                out << axis << ',' << g17(cell.axis_value) << ',' << g17(cell.tn.x) << ','
                    << g17(cell.tn.y) << ',' << g17(cell.tn.z) << ',' << t << ','
                    << g17(cell.delta_p[t]) << '\n';
            }
        }
        if (!out) fail(Err::Io, "write failed: " + raw_path);
    }
    {
        std::ofstream out = open_out(summary_path);
        stamp(out, meta);
        out << "axis,value,tn_x,tn_y,tn_z,n,failures,mean,median,q25,q75,min,max\n";
        for (const SweepCell& cell : cells) {
            out << axis << ',' << g17(cell.axis_value) << ',' << g17(cell.tn.x) << ','
                << g17(cell.tn.y) << ',' << g17(cell.tn.z) << ',' << cell.delta_p.size() << ','
                << cell.failures;
            if (!cell.delta_p.empty()) {
                const SummaryStats st = summarize(cell.delta_p);
                out << ',' << g17(st.mean) << ',' << g17(st.median) << ',' << g17(st.q25) << ','
                    << g17(st.q75) << ',' << g17(st.min) << ',' << g17(st.max);
            } else {
                out << ",nan,nan,nan,nan,nan,nan";
            }
            out << '\n';
        }
        if (!out) fail(Err::Io, "write failed: " + summary_path);
    }
}

void write_probmap_csv(const std::string& path, const std::vector<ProbMapRow>& rows,
                       const RunMeta& meta) {
    std::ofstream out = open_out(path);
    stamp(out, meta);
    out << "x,y,z,receiver,probability,skipped\n";
    for (const ProbMapRow& row : rows) {
        out << g17(row.x) << ',' << g17(row.y) << ',' << g17(row.z) << ',' << row.receiver_id
            << ',' << g17(row.probability) << ',' << (row.skipped ? 1 : 0) << '\n';
    }
    if (!out) fail(Err::Io, "write failed: " + path);
}

void write_oracle_report(const std::string& path, const OracleReport& report,
                         const RunMeta& meta) {
    std::ofstream out = open_out(path);
    stamp(out, meta);
    out << "sd_grid_gap = " << g17(report.sd_grid_gap) << "\n";
    out << "grid_cell = " << g17(report.grid_cell) << "\n";
    out << "siso_rel_dev = " << g17(report.siso_rel_dev) << "\n";
    out << "jac_gain_rel = " << g17(report.jac_gain_rel) << "\n";
    out << "jac_dist_rel = " << g17(report.jac_dist_rel) << "\n";
    out << "grad_h_rel = " << g17(report.grad_h_rel) << "\n";
    out << "pass = " << (report.pass ? 1 : 0) << "\n";
    if (!out) fail(Err::Io, "write failed: " + path);
}

}  // namespace mcvd
