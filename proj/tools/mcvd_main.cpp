#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcvd/config.hpp"
#include "mcvd/distance_estimation.hpp"
#include "mcvd/errors.hpp"
#include "mcvd/experiments.hpp"
#include "mcvd/localization.hpp"
#include "mcvd/parallel.hpp"
#include "mcvd/particle_sim.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::string traces_path;  // fit / localize input, optional
    std::uint64_t seed = 0;
    int trials = 0;
    int threads = 0;
    bool seed_set = false;
    bool trials_set = false;
};

std::string join(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

mcvd::RunConfig load(const CliArgs& args) {
    mcvd::RunConfig cfg = mcvd::load_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (args.trials_set) cfg.trials = args.trials;
    if (cfg.trials < 1) mcvd::fail(mcvd::Err::InvalidArgument, "trials must be >= 1");
    std::filesystem::create_directories(args.out_dir);
    return cfg;
}

int effective_threads(const CliArgs& args) {
    return args.threads > 0 ? args.threads : mcvd::default_thread_count();
}

mcvd::SimOptions sim_options(const mcvd::RunConfig& cfg, const CliArgs& args) {
    return {cfg.sim_step, cfg.policy, effective_threads(args)};
}

std::vector<std::vector<mcvd::CumulativeTrace>> trials_for(const mcvd::RunConfig& cfg,
                                                           const CliArgs& args,
                                                           const mcvd::ValidatedScenario& scen) {
    if (!args.traces_path.empty()) return mcvd::read_trace_csv(args.traces_path);
    const mcvd::TrialEnsemble ens =
        mcvd::run_trials(scen, cfg.plan, sim_options(cfg, args), cfg.seed, cfg.trials);
    return ens.trials;
}

int cmd_simulate(const CliArgs& args) {
    const mcvd::RunConfig cfg = load(args);
    const mcvd::ValidatedScenario scen = mcvd::validate_scenario(cfg.scenario);
    const mcvd::TrialEnsemble ens =
        mcvd::run_trials(scen, cfg.plan, sim_options(cfg, args), cfg.seed, cfg.trials);

    const std::string path = join(args.out_dir, "traces.csv");
    mcvd::write_trace_csv(path, ens, {cfg.hash, cfg.seed});

    const double budget = static_cast<double>(cfg.scenario.molecule_budget);
    for (std::size_t t = 0; t < ens.trials.size(); ++t) {
        std::int64_t absorbed = 0;
        for (const mcvd::CumulativeTrace& trace : ens.trials[t]) absorbed += trace.final_count();
        std::printf("trial %zu: absorbed %lld of %lld molecules (%.4f)\n", t,
                    static_cast<long long>(absorbed),
                    static_cast<long long>(cfg.scenario.molecule_budget), absorbed / budget);
    }
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_fit(const CliArgs& args) {
    const mcvd::RunConfig cfg = load(args);
    const mcvd::ValidatedScenario scen = mcvd::validate_scenario(cfg.scenario);
    const auto trials = trials_for(cfg, args, scen);

    std::vector<std::vector<mcvd::DistanceEstimate>> per_trial(trials.size());
    for (std::size_t t = 0; t < trials.size(); ++t) {
        for (const mcvd::CumulativeTrace& trace : trials[t]) {
            const mcvd::Receiver* rx = nullptr;
            for (const mcvd::Receiver& candidate : scen.receivers())
                if (candidate.id == trace.receiver_id) rx = &candidate;
            if (rx == nullptr)
                mcvd::fail(mcvd::Err::IndexOutOfRange,
                           "trace receiver " + std::to_string(trace.receiver_id) +
                               " is not in the scenario");
            mcvd::ModelContext ctx{static_cast<double>(cfg.scenario.molecule_budget), rx->radius,
                                   cfg.scenario.medium.diffusion_coefficient,
                                   trace.sample_times};
            mcvd::DistanceEstimate est;
            try {
                est = mcvd::estimate_distance(trace, ctx, mcvd::EstimateOptions{});
            } catch (const mcvd::Error& e) {
                est.receiver_id = trace.receiver_id;
                est.gain = est.distance = est.sse = est.r_square =
                    std::numeric_limits<double>::quiet_NaN();
                std::fprintf(stderr, "warning: trial %zu receiver %d fit failed: %s\n", t,
                             trace.receiver_id, mcvd::err_name(e.code()));
            }
            per_trial[t].push_back(est);
        }
    }
    const std::string path = join(args.out_dir, "estimates.csv");
    mcvd::write_estimates_csv(path, per_trial, {cfg.hash, cfg.seed});
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int run_localization(const CliArgs& args, const char* out_name) {
    const mcvd::RunConfig cfg = load(args);
    const mcvd::ValidatedScenario scen = mcvd::validate_scenario(cfg.scenario);
    mcvd::LocalizeOptions loc;
    loc.subset_size = cfg.subset_size;

    mcvd::PipelineSummary summary;
    if (!args.traces_path.empty()) {
        summary = mcvd::pipeline_from_traces(mcvd::read_trace_csv(args.traces_path), scen, loc);
    } else {
        summary = mcvd::run_pipeline(scen, cfg.plan, sim_options(cfg, args), cfg.seed, cfg.trials,
                                     loc);
    }

    const std::string path = join(args.out_dir, out_name);
    mcvd::write_pipeline_report(path, summary, {cfg.hash, cfg.seed});
    std::printf("trials %zu, failures %d\n", summary.records.size(), summary.failures);
    if (summary.stats.n > 0)
        std::printf("delta_p mean %.6g median %.6g max %.6g\n", summary.stats.mean,
                    summary.stats.median, summary.stats.max);
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_sweep(const CliArgs& args) {
    const mcvd::RunConfig cfg = load(args);
    const auto cells = mcvd::run_sweep(cfg, effective_threads(args));
    const std::string raw = join(args.out_dir, "sweep_raw.csv");
    const std::string summary = join(args.out_dir, "sweep_summary.csv");
    mcvd::write_sweep_csv(raw, summary, cfg, cells, {cfg.hash, cfg.seed});
    std::printf("wrote %s and %s (%zu cells)\n", raw.c_str(), summary.c_str(), cells.size());
    return 0;
}

int cmd_probmap(const CliArgs& args) {
    const mcvd::RunConfig cfg = load(args);
    const auto rows = mcvd::run_probability_map(cfg, effective_threads(args));
    const std::string path = join(args.out_dir, "probmap.csv");
    mcvd::write_probmap_csv(path, rows, {cfg.hash, cfg.seed});
    std::printf("wrote %s (%zu rows)\n", path.c_str(), rows.size());
    return 0;
}

int cmd_oracle(const CliArgs& args) {
    const mcvd::RunConfig cfg = load(args);
    const mcvd::OracleReport report = mcvd::run_oracle(cfg, effective_threads(args));
    const std::string path = join(args.out_dir, "oracle.txt");
    mcvd::write_oracle_report(path, report, {cfg.hash, cfg.seed});
    std::printf("sd_grid_gap %.3g (cell %.3g)\n", report.sd_grid_gap, report.grid_cell);
    std::printf("siso_rel_dev %.3g\n", report.siso_rel_dev);
    std::printf("jacobian rel %.3g / %.3g, grad rel %.3g\n", report.jac_gain_rel,
                report.jac_dist_rel, report.grad_h_rel);
    std::printf("%s, wrote %s\n", report.pass ? "PASS" : "FAIL", path.c_str());
    return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Molecular-communication SIMO simulator and source localization toolkit"};
    app.require_subcommand(1);

    CliArgs args;
    std::string command;

    auto add_common = [&](CLI::App* sub, bool with_traces) {
        sub->add_option("--config", args.config_path, "scenario/config file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", args.out_dir, "output directory (default: out)");
        sub->add_option("--seed", args.seed, "master seed override")
            ->each([&](const std::string&) { args.seed_set = true; });
        sub->add_option("--trials", args.trials, "trial count override")
            ->each([&](const std::string&) { args.trials_set = true; });
        sub->add_option("--threads", args.threads, "worker threads (0 = hardware)");
        if (with_traces)
            sub->add_option("--traces", args.traces_path,
                            "trace CSV input (skips simulation)")
                ->check(CLI::ExistingFile);
        sub->callback([&, sub] { command = sub->get_name(); });
    };

    add_common(app.add_subcommand("simulate", "run trials, write cumulative traces"), false);
    add_common(app.add_subcommand("fit", "estimate per-receiver distances"), true);
    add_common(app.add_subcommand("localize", "traces to position estimates"), true);
    add_common(app.add_subcommand("pipeline", "simulate + fit + localize"), false);
    add_common(app.add_subcommand("sweep", "parameter sweep over the configured axis"), false);
    add_common(app.add_subcommand("probmap", "receiving-probability grid"), false);
    add_common(app.add_subcommand("oracle", "brute-force cross-checks"), false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (command == "simulate") return cmd_simulate(args);
        if (command == "fit") return cmd_fit(args);
        if (command == "localize") return run_localization(args, "localization.txt");
        if (command == "pipeline") return run_localization(args, "pipeline.txt");
        if (command == "sweep") return cmd_sweep(args);
        if (command == "probmap") return cmd_probmap(args);
        if (command == "oracle") return cmd_oracle(args);
        std::fprintf(stderr, "ERROR code=InvalidArgument message=unknown command\n");
        return 2;
    } catch (const mcvd::Error& e) {
        std::fprintf(stderr, "ERROR code=%s message=%s\n", mcvd::err_name(e.code()), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "ERROR code=unhandled message=%s\n", e.what());
        return 3;
    }
}
