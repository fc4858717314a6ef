#include "morl/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "morl/config.hpp"
#include "morl/harness.hpp"
#include "morl/plots.hpp"

namespace morl {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Flags {
    std::string env, algo, mode, distance, robustness, coverage_set, config, out, summary;
    std::size_t runs = 0, episodes = 0, jobs = 0;
    std::uint64_t seed = 0;
    double phi = 0.0;
    std::vector<double> phi_values;
};

struct Invocation {
    CliCommand command;
    RunSettings settings;
    fs::path out;
    Flags flags;
};

std::string one_line(std::string s) {
    for (char &c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

json read_json(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw config_error(path.string() + " is not valid JSON: " + e.what());
    }
}

void write_summary_and_plots(const json &summary, const fs::path &out, std::ostream &err) {
    write_text(out / "summary.json", summary.dump(2) + "\n");
    plots::emit_plots(summary, out / "plots", err);
}

std::string coverage_file(CoverageAlgorithm a) { return "coverage_" + std::string(to_string(a)) + ".json"; }

// Frozen set from --coverage-set when it matches `algorithm`, else trained here and saved under out/.
CoverageBundle obtain_bundle(const Invocation &inv, const ExperimentConfig &config, CoverageAlgorithm algorithm) {
    if (inv.settings.coverage_set) {
        auto b = load_bundle(*inv.settings.coverage_set);
        if (b.algorithm == algorithm) return b;
    }
    auto b = train_offline(config, algorithm);
    save_bundle(b, inv.out / coverage_file(algorithm));
    return b;
}

int cmd_run(const Invocation &inv, std::ostream &out, std::ostream &err) {
    const auto &config = inv.settings.experiment;
    std::optional<CoverageBundle> frozen;
    const bool needs_set = config.algorithm == Algorithm::ols || config.algorithm == Algorithm::tlo ||
                           (config.algorithm == Algorithm::rpb && config.rpb.robustness == RobustnessKind::regret);
    if (needs_set) {
        if (!inv.settings.coverage_set)
            throw config_error("run --algo " + std::string(to_string(config.algorithm)) +
                               " needs a frozen coverage set (--coverage-set FILE, see train-offline)");
        frozen = load_bundle(*inv.settings.coverage_set);
    }
    const auto result = run_experiment(config, frozen ? &*frozen : nullptr);
    std::ofstream csv(inv.out / "results.csv", std::ios::binary);
    write_results_csv(csv, config, result);
    csv.close();
    const auto metrics = compute_metrics(result.records, config.schedule);
    write_summary_and_plots(summarize(config, {{config.algorithm, metrics}}), inv.out, err);
    out << "wrote " << result.records.size() << " records to " << (inv.out / "results.csv").string() << "\n";
    return 0;
}

int cmd_train_offline(const Invocation &inv, std::ostream &out) {
    const auto &config = inv.settings.experiment;
    if (config.algorithm != Algorithm::ols && config.algorithm != Algorithm::tlo)
        throw config_error("train-offline needs --algo ols or --algo tlo");
    const auto algorithm = config.algorithm == Algorithm::ols ? CoverageAlgorithm::ols : CoverageAlgorithm::tlo;
    const auto bundle = train_offline(config, algorithm);
    const auto path = inv.out / coverage_file(algorithm);
    save_bundle(bundle, path);
    out << "wrote " << bundle.runs.size() << " coverage sets to " << path.string() << "\n";
    return 0;
}

int cmd_sweep_phi(const Invocation &inv, std::ostream &out, std::ostream &err) {
    ExperimentConfig config = inv.settings.experiment;
    config.algorithm = Algorithm::rpb;
    const auto values = inv.flags.phi_values.empty() ? default_phi_grid() : inv.flags.phi_values;
    const auto sweep = sweep_phi(config, values);
    json points = json::array();
    for (const auto &p : sweep)
        points.push_back({{"phi", p.phi}, {"losses", p.losses}, {"mean", p.losses.empty() ? 0.0 : mean(p.losses)}});
    json summary{{"env", to_string(config.env.kind)}, {"mode", to_string(config.mode)}, {"runs", config.runs},
                 {"episodes_per_preference", config.schedule.episodes_per_preference},
                 {"master_seed", config.master_seed}, {"phi_sweep", points}};
    write_summary_and_plots(summary, inv.out, err);
    out << "swept " << sweep.size() << " phi values\n";
    return 0;
}

int cmd_compare_variants(const Invocation &inv, VariantAxis axis, std::ostream &out, std::ostream &err) {
    ExperimentConfig config = inv.settings.experiment;
    config.algorithm = Algorithm::rpb;
    std::vector<std::string> names;
    std::optional<CoverageBundle> reference;
    if (axis == VariantAxis::robustness_metric) {
        names = {"stability", "iod", "cv", "entropy", "regret"};
        reference = obtain_bundle(inv, config, CoverageAlgorithm::ols);
    } else {
        names = {"euclidean", "hamming", "cosine", "manhattan"};
    }
    const auto variants = compare_variants(config, axis, names, reference ? &*reference : nullptr);
    json entries = json::array();
    for (const auto &v : variants)
        entries.push_back({{"name", v.name}, {"mean", v.mean}, {"std", v.stddev}, {"run_sums", v.run_sums}});
    const char *axis_name = axis == VariantAxis::robustness_metric ? "robustness" : "distance";
    json summary{{"env", to_string(config.env.kind)}, {"mode", to_string(config.mode)}, {"runs", config.runs},
                 {"episodes_per_preference", config.schedule.episodes_per_preference},
                 {"master_seed", config.master_seed}, {"variants", {{"axis", axis_name}, {"entries", entries}}}};
    write_summary_and_plots(summary, inv.out, err);
    out << "compared " << variants.size() << " " << axis_name << " variants\n";
    return 0;
}

int cmd_compare_algos(const Invocation &inv, std::ostream &out, std::ostream &err) {
    const ExperimentConfig &base = inv.settings.experiment;
    const auto ols = obtain_bundle(inv, base, CoverageAlgorithm::ols);
    const auto tlo = obtain_bundle(inv, base, CoverageAlgorithm::tlo);
    std::ofstream csv(inv.out / "results.csv", std::ios::binary);
    std::vector<AlgorithmRun> runs;
    bool header = true;
    for (auto algo : {Algorithm::rpb, Algorithm::sql, Algorithm::ols, Algorithm::tlo}) {
        ExperimentConfig c = base;
        c.algorithm = algo;
        if (c.rpb.robustness == RobustnessKind::regret && algo == Algorithm::rpb) c.rpb.robustness = RobustnessKind::stability;
        const CoverageBundle *frozen = algo == Algorithm::ols ? &ols : algo == Algorithm::tlo ? &tlo : nullptr;
        const auto result = run_experiment(c, frozen);
        write_results_csv(csv, c, result, header);
        header = false;
        runs.push_back({algo, compute_metrics(result.records, c.schedule)});
    }
    csv.close();
    write_summary_and_plots(summarize(base, runs), inv.out, err);
    out << "compared " << runs.size() << " algorithms\n";
    return 0;
}

int cmd_plot(const Invocation &inv, std::ostream &out, std::ostream &err) {
    const fs::path summary_path = inv.flags.summary.empty() ? inv.out / "summary.json" : fs::path(inv.flags.summary);
    const json summary = read_json(summary_path);
    try {
        const auto written = plots::emit_plots(summary, inv.out / "plots", err);
        out << "wrote " << written.size() << " plots\n";
    } catch (const json::exception &e) {
        throw config_error("summary has an unexpected shape: " + std::string(e.what()));
    }
    return 0;
}

int cmd_export_ccs(const Invocation &inv, std::ostream &out) {
    ExperimentConfig config = inv.settings.experiment;
    config.algorithm = Algorithm::rpb;
    std::optional<CoverageBundle> reference;
    if (config.rpb.robustness == RobustnessKind::regret) {
        if (!inv.settings.coverage_set) throw config_error("regret robustness needs --coverage-set FILE");
        reference = load_bundle(*inv.settings.coverage_set);
    }
    const auto result = run_experiment(config, reference ? &*reference : nullptr);
    for (std::size_t r = 0; r < result.final_ccs.size(); ++r)
        write_text(inv.out / ("ccs_run" + std::to_string(r) + ".json"), ccs_to_json(*result.final_ccs[r]).dump(2) + "\n");
    out << "exported " << result.final_ccs.size() << " steppingstone snapshots\n";
    return 0;
}

// Defaults, then the config file, then flags; MORL_SEED beats --seed.
RunSettings resolve_settings(const Flags &f, CLI::App &app) {
    json file_json = json::object();
    fs::path file_dir;
    if (!f.config.empty()) {
        file_json = read_json(f.config);
        file_dir = fs::path(f.config).parent_path();
    }
    json start{{"env", f.env.empty() ? file_json.value("env", std::string("dst")) : f.env}};
    RunSettings s = settings_from_json(start);
    s.experiment.jobs = std::max(1u, std::thread::hardware_concurrency());
    s = apply_config_json(std::move(s), file_json, file_dir);

    json overlay = json::object();
    auto given = [&app](const char *name) { return app.get_option(name)->count() > 0; };
    if (given("--env")) overlay["env"] = f.env;
    if (given("--algo")) overlay["algorithm"] = f.algo;
    if (given("--mode")) overlay["mode"] = f.mode;
    if (given("--runs")) overlay["runs"] = f.runs;
    if (given("--episodes")) overlay["episodes_per_preference"] = f.episodes;
    if (given("--seed")) overlay["master_seed"] = f.seed;
    if (given("--jobs")) overlay["jobs"] = f.jobs;
    if (given("--coverage-set")) overlay["coverage_set"] = f.coverage_set;
    if (given("--out")) overlay["out"] = f.out;
    json rpb = json::object();
    if (given("--phi")) rpb["phi"] = f.phi;
    if (given("--distance")) rpb["distance"] = f.distance;
    if (given("--robustness")) rpb["robustness"] = f.robustness;
    if (!rpb.empty()) overlay["rpb"] = rpb;
    if (const char *env_seed = std::getenv("MORL_SEED")) {
        try {
            overlay["master_seed"] = std::stoull(env_seed);
        } catch (const std::exception &) {
            throw config_error("MORL_SEED is not an unsigned integer");
        }
    }
    s = apply_config_json(std::move(s), overlay);
    s.experiment.validate();
    return s;
}

} // namespace

int parse_and_dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Multi-objective RL toolkit: robust policy bootstrapping, baselines and experiment harness", "morl"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    Flags f;
    app.add_option("--env", f.env, "environment")->check(CLI::IsMember({"sar", "dst", "rg"}));
    app.add_option("--algo", f.algo, "algorithm")->check(CLI::IsMember({"rpb", "sql", "ols", "tlo"}));
    app.add_option("--mode", f.mode, "environment dynamics")->check(CLI::IsMember({"stationary", "nonstationary"}));
    app.add_option("--runs", f.runs, "independent runs")->check(CLI::PositiveNumber);
    app.add_option("--episodes", f.episodes, "episodes per preference")->check(CLI::PositiveNumber);
    app.add_option("--seed", f.seed, "master seed (MORL_SEED overrides)");
    app.add_option("--phi", f.phi, "preference significance threshold")->check(CLI::PositiveNumber);
    app.add_option("--distance", f.distance, "preference distance")
        ->check(CLI::IsMember({"euclidean", "hamming", "cosine", "manhattan"}));
    app.add_option("--robustness", f.robustness, "robustness metric")
        ->check(CLI::IsMember({"stability", "iod", "cv", "entropy", "regret"}));
    app.add_option("--coverage-set", f.coverage_set, "frozen OLS/TLO coverage set (from train-offline)");
    app.add_option("--config", f.config, "JSON experiment config");
    app.add_option("--out", f.out, "output directory (default: out)");
    app.add_option("--jobs", f.jobs, "parallel run workers (default: logical cores)")->check(CLI::PositiveNumber);

    const std::map<std::string, std::pair<CliCommand, std::string>> commands{
        {"run", {CliCommand::run, "execute one algorithm over the preference schedule"}},
        {"train-offline", {CliCommand::train_offline, "train and freeze OLS/TLO coverage sets"}},
        {"sweep-phi", {CliCommand::sweep_phi, "loss distribution per phi value (rpb)"}},
        {"compare-metrics", {CliCommand::compare_metrics, "compare robustness metrics (rpb)"}},
        {"compare-distances", {CliCommand::compare_distances, "compare distance functions (rpb)"}},
        {"compare-algos", {CliCommand::compare_algos, "compare rpb, sql, ols and tlo"}},
        {"plot", {CliCommand::plot, "render SVG plots from a summary.json"}},
        {"export-ccs", {CliCommand::export_ccs, "run rpb and export each run's steppingstone store"}},
    };
    std::map<std::string, CLI::App *> subs;
    for (const auto &[name, cmd] : commands) subs[name] = app.add_subcommand(name, cmd.second);
    subs["sweep-phi"]->add_option("--phi-values", f.phi_values, "phi grid (default 0.05..0.5)")->delimiter(',');
    subs["plot"]->add_option("--summary", f.summary, "summary.json to render (default: <out>/summary.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp &e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError &e) {
        err << "error: " << one_line(e.what()) << "\n";
        return 1;
    }

    try {
        Invocation inv;
        for (const auto &[name, cmd] : commands)
            if (subs[name]->parsed()) inv.command = cmd.first;
        inv.flags = f;
        inv.settings = resolve_settings(f, app);
        inv.out = inv.settings.out.value_or("out");
        fs::create_directories(inv.out);

        switch (inv.command) {
        case CliCommand::run: return cmd_run(inv, out, err);
        case CliCommand::train_offline: return cmd_train_offline(inv, out);
        case CliCommand::sweep_phi: return cmd_sweep_phi(inv, out, err);
        case CliCommand::compare_metrics: return cmd_compare_variants(inv, VariantAxis::robustness_metric, out, err);
        case CliCommand::compare_distances: return cmd_compare_variants(inv, VariantAxis::distance_function, out, err);
        case CliCommand::compare_algos: return cmd_compare_algos(inv, out, err);
        case CliCommand::plot: return cmd_plot(inv, out, err);
        case CliCommand::export_ccs: return cmd_export_ccs(inv, out);
        }
    } catch (const config_error &e) {
        err << "error: " << one_line(e.what()) << "\n";
        return 1;
    } catch (const std::exception &e) {
        err << "error: " << one_line(e.what()) << "\n";
        return 2;
    }
    return 2;
}

} // namespace morl
