#include "madlab/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "madlab/errors.hpp"
#include "madlab/ingest.hpp"
#include "madlab/plot.hpp"
#include "madlab/report_io.hpp"
#include "madlab/simharness.hpp"

namespace madlab {

namespace {

ExperimentConfig thompson_config(std::string name, std::size_t arms, double delta_exponent, PolicyKind policy,
                                 OutcomeModelKind model, std::uint64_t max_t) {
    ExperimentConfig c;
    c.name = std::move(name);
    c.arms = arms;
    c.delta = DeltaSequence::polynomial(delta_exponent);
    c.policy.kind = policy;
    c.outcome_model.kind = model;
    c.max_t = max_t;
    return c;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"covar_grid", "madmod_power", "coverage", "coverage_misspecified"};
}

RunSpec preset_run(const std::string& name, bool full) {
    RunSpec run;
    if (name == "covar_grid") {
        const std::uint64_t max_t = full ? 10000 : 5000;
        run.reps = full ? 100 : 30;
        run.experiments = {
            thompson_config("mad", 2, 0.2, PolicyKind::thompson_gaussian, OutcomeModelKind::zero, max_t),
            thompson_config("madcovar", 2, 0.2, PolicyKind::thompson_gaussian, OutcomeModelKind::ols, max_t)};
        for (double gamma : {0.1, 0.5, 1.0}) {
            for (std::size_t irr : {2, 22, 47}) {
                run.dgps.push_back(DgpSpec{DgpKind::gaussian_covariates, gamma, irr});
            }
        }
    } else if (name == "madmod_power") {
        const std::uint64_t max_t = full ? 20000 : 10000;
        run.reps = full ? 1000 : 100;
        ExperimentConfig mad =
            thompson_config("mad", 5, 0.24, PolicyKind::thompson_bernoulli, OutcomeModelKind::zero, max_t);
        mad.stopping.kind = StoppingKind::all_significant;
        ExperimentConfig madmod = mad;
        madmod.name = "madmod";
        madmod.madmod = ImportanceWeightSpec{};
        run.experiments = {mad, madmod};
        run.dgps = {DgpSpec{DgpKind::bernoulli_four_arm, 1.0, 0}};
    } else if (name == "coverage" || name == "coverage_misspecified") {
        const std::uint64_t max_t = full ? 10000 : 5000;
        run.reps = full ? 1000 : 300;
        run.experiments = {
            thompson_config("madcovar", 6, 0.24, PolicyKind::thompson_gaussian, OutcomeModelKind::ols, max_t)};
        run.dgps = {DgpSpec{name == "coverage" ? DgpKind::coverage_k6 : DgpKind::coverage_k6_misspecified,
                            1.0, 0}};
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return run;
}

namespace {

struct SimulateArgs {
    std::string config;
    std::string preset;
    std::string dgp;
    std::optional<double> gamma;
    std::optional<std::size_t> n_irrelevant;
    std::optional<std::uint64_t> reps;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> max_t;
    std::string out = "results";
    bool full = false;
    unsigned jobs = 0;
    std::uint64_t trajectory_reps = 1;
    std::uint64_t trajectory_stride = 1;
};

struct ReplayArgs {
    std::string data;
    std::string schema;
    std::string config;
    std::string out = "replay";
    std::optional<std::uint64_t> reps;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> max_t;
    bool full = false;
    std::uint64_t trajectory_stride = 1;
};

struct PlotArgs {
    std::string input;
    std::string kind;
    std::string out = ".";
};

struct SynthArgs {
    std::uint64_t seed = 1;
    std::string out = "megastudy.csv";
    std::string schema_out;
    std::size_t rows = 32000;
    std::size_t arms = 14;
};

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv(kSeedEnvVar);
    if (raw == nullptr || *raw == '\0') {
        return std::nullopt;
    }
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (*end != '\0' || errno != 0 || raw[0] == '-') {
        throw ConfigError(std::string(kSeedEnvVar) + " must be a non-negative integer, got '" + raw + "'");
    }
    return v;
}

// Flag beats environment beats config.
std::uint64_t resolve_seed(std::uint64_t from_config, const std::optional<std::uint64_t>& flag) {
    if (flag) {
        return *flag;
    }
    if (auto env = env_seed()) {
        return *env;
    }
    return from_config;
}

void make_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory '" + dir + "': " + ec.message());
    }
}

std::string join(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

unsigned resolve_jobs(unsigned jobs) {
    if (jobs > 0) {
        return jobs;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

RunSpec build_simulate_spec(const SimulateArgs& a) {
    if (a.config.empty() == a.preset.empty()) {
        throw ConfigError("give exactly one of --config or --preset");
    }
    nlohmann::json file;
    if (!a.config.empty()) {
        file = read_json_file(a.config);
    }
    RunSpec run = a.preset.empty() ? run_spec_from_json(file) : preset_run(a.preset, a.full);
    if (!a.dgp.empty() || a.gamma || a.n_irrelevant) {
        DgpSpec d = run.dgps.empty() ? DgpSpec{} : run.dgps.front();
        if (!a.dgp.empty()) {
            d.kind = dgp_kind_from_string(a.dgp);
        }
        if (a.gamma) {
            d.gamma = *a.gamma;
        }
        if (a.n_irrelevant) {
            d.n_irrelevant = *a.n_irrelevant;
        }
        run.dgps = {d};
    }
    if (run.dgps.empty()) {
        throw ConfigError("no dgp given; use --dgp or a 'dgps' entry in the config");
    }
    // A bare experiment file with only --dgp takes its arm count from the dgp.
    if (file.is_object() && !file.contains("experiments") && !file.contains("arms")) {
        run.experiments.front().arms = arm_count(run.dgps.front());
    }
    if (a.reps) {
        run.reps = *a.reps;
    }
    if (a.max_t) {
        for (auto& e : run.experiments) {
            e.max_t = *a.max_t;
        }
    }
    run.seed = resolve_seed(run.seed, a.seed);
    for (auto& e : run.experiments) {
        e.seed = run.seed;
    }
    run.validate();
    return run;
}

std::string dgp_label(const DgpSpec& dgp, bool qualified) {
    if (!qualified) {
        return to_string(dgp.kind);
    }
    std::ostringstream s;
    s << to_string(dgp.kind) << "/gamma=" << dgp.gamma << "/irr=" << dgp.n_irrelevant;
    return s.str();
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const RunSpec run = build_simulate_spec(a);
    if (a.trajectory_stride < 1) {
        throw ConfigError("--trajectory-stride must be >= 1");
    }
    make_dir(a.out);
    const unsigned jobs = resolve_jobs(a.jobs);

    std::vector<SimulationBlock> blocks;
    std::vector<TrajectoryBlock> trajectories;
    for (const auto& dgp : run.dgps) {
        SimulationBlock block{dgp, run.experiments, replicate(run.reps, run.experiments, dgp, run.seed, jobs)};
        blocks.push_back(std::move(block));
        EngineOptions opts;
        opts.record_trajectory = true;
        opts.trajectory_stride = a.trajectory_stride;
        for (std::uint64_t r = 0; r < std::min(a.trajectory_reps, run.reps); ++r) {
            for (const auto& e : run.experiments) {
                trajectories.push_back(
                    {dgp_label(dgp, run.dgps.size() > 1), e.name, r,
                     run_experiment(e, dgp, run.seed, r, opts).trajectory});
            }
        }
    }

    std::ostringstream metrics, summary, paired;
    write_metrics_csv(metrics, blocks);
    write_summary_csv(summary, blocks);
    write_paired_csv(paired, blocks);
    write_file(join(a.out, "metrics.csv"), metrics.str());
    write_file(join(a.out, "summary.csv"), summary.str());
    write_file(join(a.out, "paired.csv"), paired.str());
    if (!trajectories.empty()) {
        std::ostringstream traj;
        write_trajectories_csv(traj, trajectories);
        write_file(join(a.out, "trajectories.csv"), traj.str());
    }
    write_file(join(a.out, "config_echo.json"), to_json(run).dump(2) + "\n");

    for (const auto& b : blocks) {
        for (const auto& s : aggregate(b.reports, b.configs)) {
            if (s.arm == 0) {
                continue;
            }
            out << to_string(b.dgp.kind) << " gamma=" << b.dgp.gamma << " irr=" << b.dgp.n_irrelevant << ' '
                << s.config << " arm " << s.arm << ": coverage_error=" << s.coverage_error.rate
                << " type2=" << s.type2.rate << " width=" << s.width.mean
                << " samples=" << s.sample_count.mean << '\n';
        }
    }
    out << "wrote " << a.out << '\n';
    return kExitOk;
}

double pooled_variance(const RctDataset& data) {
    double ss = 0.0;
    for (const auto& row : data.rows) {
        const double d = row.outcome - data.arm_means[row.arm];
        ss += d * d;
    }
    const auto n = static_cast<double>(data.rows.size());
    return n > static_cast<double>(data.arms()) ? ss / (n - static_cast<double>(data.arms())) : 1.0;
}

RunSpec default_replay_spec(const RctDataset& data, bool full) {
    RunSpec run;
    const std::uint64_t max_t = full ? 32000 : 5000;
    ExperimentConfig mad = thompson_config("mad", data.arms(), 0.1, PolicyKind::thompson_gaussian,
                                           OutcomeModelKind::zero, max_t);
    mad.policy.noise_var = std::max(pooled_variance(data), 1e-12);
    mad.policy.normal_prior_var = 1e4;
    ExperimentConfig covar = mad;
    covar.name = "madcovar";
    covar.outcome_model.kind = data.covariate_names.empty() ? OutcomeModelKind::arm_mean : OutcomeModelKind::ols;
    run.experiments = {mad, covar};
    return run;
}

int cmd_replay(const ReplayArgs& a, std::ostream& out) {
    const CsvSchema schema = schema_from_json(read_json_file(a.schema));
    const RctDataset data = load_csv(a.data, schema);
    RunSpec run = a.config.empty() ? default_replay_spec(data, a.full) : run_spec_from_json(read_json_file(a.config));
    if (a.reps) {
        run.reps = *a.reps;
    }
    if (run.reps < 1) {
        throw ConfigError("reps must be >= 1");
    }
    if (a.trajectory_stride < 1) {
        throw ConfigError("--trajectory-stride must be >= 1");
    }
    run.seed = resolve_seed(run.seed, a.seed);
    for (auto& e : run.experiments) {
        if (a.max_t) {
            e.max_t = *a.max_t;
        }
        e.seed = run.seed;
        if (e.arms != data.arms()) {
            throw ConfigError("experiment '" + e.name + "' has " + std::to_string(e.arms) +
                              " arms but the dataset has " + std::to_string(data.arms()));
        }
        e.validate(data.covariate_names.size());
    }
    make_dir(a.out);

    std::vector<SimulationReport> reports;
    std::vector<TrajectoryBlock> trajectories;
    for (std::uint64_t r = 0; r < run.reps; ++r) {
        for (const auto& e : run.experiments) {
            EngineOptions opts;
            opts.record_trajectory = r == 0;
            opts.trajectory_stride = a.trajectory_stride;
            RunResult result = replay(data, e, run.seed, r, opts);
            if (r == 0) {
                trajectories.push_back({"replay", e.name, r, std::move(result.trajectory)});
            }
            reports.push_back(std::move(result.report));
        }
    }

    std::ostringstream traj, comparison;
    write_trajectories_csv(traj, trajectories);
    write_comparison_csv(comparison, data, reports);
    write_file(join(a.out, "trajectories.csv"), traj.str());
    write_file(join(a.out, "comparison.csv"), comparison.str());
    nlohmann::json echo = to_json(run);
    echo.erase("dgps");
    write_file(join(a.out, "config_echo.json"), echo.dump(2) + "\n");

    out << "dataset: " << data.rows.size() << " rows, " << data.arms() << " arms\n";
    for (std::size_t k = 0; k < data.arms(); ++k) {
        out << "  " << data.arm_labels[k] << ": " << data.count(k) << " rows\n";
    }
    out << "wrote " << a.out << '\n';
    return kExitOk;
}

int cmd_plot(const PlotArgs& a, std::ostream& out) {
    const PlotKind kind = plot_kind_from_string(a.kind);
    const CsvTable table = read_csv_table(a.input);
    for (const auto& path : render_plots(table, kind, a.out)) {
        out << "wrote " << path << '\n';
    }
    return kExitOk;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    SynthSpec spec;
    spec.seed = a.seed;
    spec.rows = a.rows;
    spec.arms = a.arms;
    synth_megastudy(spec, a.out);
    if (!a.schema_out.empty()) {
        write_file(a.schema_out, to_json(synth_schema(spec)).dump(2) + "\n");
    }
    out << "wrote " << a.out << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mixture adaptive design experiments: simulation, replay and plotting", "madlab"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run replicated simulations and write metrics CSVs");
    simulate->add_option("--config", sim.config, "Experiment or run JSON file");
    simulate->add_option("--preset", sim.preset, "Built-in setup")
        ->check(CLI::IsMember(preset_names()));
    simulate->add_option("--dgp", sim.dgp, "Data-generating process kind");
    simulate->add_option("--gamma", sim.gamma, "Covariate signal strength");
    simulate->add_option("--n-irrelevant", sim.n_irrelevant, "Irrelevant covariates");
    simulate->add_option("--reps", sim.reps, "Replications per config");
    simulate->add_option("--seed", sim.seed, "Master seed");
    simulate->add_option("--max-t", sim.max_t, "Units per run");
    simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();
    simulate->add_flag("--full", sim.full, "Use the long-run preset parameters");
    simulate->add_option("--jobs", sim.jobs, "Worker threads (0 = all cores)")->capture_default_str();
    simulate->add_option("--trajectory-reps", sim.trajectory_reps, "Replications to record trajectories for")
        ->capture_default_str();
    simulate->add_option("--trajectory-stride", sim.trajectory_stride, "Record every n-th step")
        ->capture_default_str();

    ReplayArgs rep;
    auto* replay_cmd = app.add_subcommand("replay", "Replay an RCT dataset through the adaptive design");
    replay_cmd->add_option("data", rep.data, "CSV data file")->required();
    replay_cmd->add_option("schema", rep.schema, "CSV schema JSON")->required();
    replay_cmd->add_option("config", rep.config, "Experiment or run JSON (default: mad vs madcovar)");
    replay_cmd->add_option("--out", rep.out, "Output directory")->capture_default_str();
    replay_cmd->add_option("--reps", rep.reps, "Replications per config");
    replay_cmd->add_option("--seed", rep.seed, "Master seed");
    replay_cmd->add_option("--max-t", rep.max_t, "Units per run");
    replay_cmd->add_flag("--full", rep.full, "Default configs run for 32000 units");
    replay_cmd->add_option("--trajectory-stride", rep.trajectory_stride, "Record every n-th step")
        ->capture_default_str();

    PlotArgs plot;
    auto* plot_cmd = app.add_subcommand("plot", "Render SVG plots from a trajectories or summary CSV");
    plot_cmd->add_option("input", plot.input, "CSV file")->required();
    plot_cmd->add_option("--kind", plot.kind, "cs_path | width_grid | power_bars | allocation")->required();
    plot_cmd->add_option("--out", plot.out, "Output directory")->capture_default_str();

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic mega-study CSV");
    synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--out", synth.out, "Output CSV")->capture_default_str();
    synth_cmd->add_option("--schema-out", synth.schema_out, "Also write the matching schema JSON");
    synth_cmd->add_option("--rows", synth.rows, "Rows")->capture_default_str();
    synth_cmd->add_option("--arms", synth.arms, "Arms including control")->capture_default_str();

    std::vector<const char*> argv;
    argv.push_back("madlab");
    for (const auto& s : args) {
        argv.push_back(s.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (simulate->parsed()) {
            return cmd_simulate(sim, out);
        }
        if (replay_cmd->parsed()) {
            return cmd_replay(rep, out);
        }
        if (plot_cmd->parsed()) {
            return cmd_plot(plot, out);
        }
        if (synth_cmd->parsed()) {
            return cmd_synth(synth, out);
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitValidation;
}

}  // namespace madlab
