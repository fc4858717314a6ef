#include "morl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <thread>

namespace morl {

using nlohmann::json;

std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::rpb: return "rpb";
    case Algorithm::sql: return "sql";
    case Algorithm::ols: return "ols";
    case Algorithm::tlo: return "tlo";
    }
    return "?";
}

std::string_view to_string(Mode m) { return m == Mode::stationary ? "stationary" : "nonstationary"; }

Algorithm parse_algorithm(std::string_view s) {
    for (auto a : {Algorithm::rpb, Algorithm::sql, Algorithm::ols, Algorithm::tlo})
        if (to_string(a) == s) return a;
    throw config_error("unknown algorithm '" + std::string(s) + "'");
}

Mode parse_mode(std::string_view s) {
    if (s == "stationary") return Mode::stationary;
    if (s == "nonstationary") return Mode::nonstationary;
    throw config_error("unknown mode '" + std::string(s) + "'");
}

void PreferenceSchedule::validate() const {
    if (preferences.empty()) throw config_error("preference schedule is empty");
    if (episodes_per_preference == 0) throw config_error("episodes per preference must be positive");
}

std::vector<Preference> default_preferences() {
    constexpr double w1[] = {0.66, 0.33, 0.28, 0.54, 0.68, 0.44, 0.88, 0.65, 0.48};
    std::vector<Preference> out;
    for (double w : w1) out.push_back(Preference({w, 1.0 - w}));
    return out;
}

PreferenceSchedule default_schedule(std::size_t episodes_per_preference) {
    return {default_preferences(), episodes_per_preference};
}

double default_phi(EnvKind kind) { return kind == EnvKind::sar ? 0.25 : 0.15; }

void ExperimentConfig::validate() const {
    morl::validate(env);
    schedule.validate();
    if (runs == 0) throw config_error("runs must be positive");
    if (perturb_period == 0) throw config_error("perturb period must be positive");
    if (!(perturb_fraction >= 0.0 && perturb_fraction <= 1.0)) throw config_error("perturb fraction outside [0,1]");
    if (jobs == 0) throw config_error("jobs must be positive");
    for (const auto &w : schedule.preferences)
        if (w.size() != 2) throw config_error("schedule preferences must have two objectives");
    try {
        learner.validate();
        rpb.validate();
        ols.validate();
        tlo.validate(2);
    } catch (const contract_error &e) {
        throw config_error(e.what());
    }
}

ExperimentConfig desk_config(EnvKind kind, Algorithm algorithm, Mode mode) {
    ExperimentConfig c;
    c.env = default_layout(kind);
    c.algorithm = algorithm;
    c.mode = mode;
    c.runs = 15;
    c.schedule = default_schedule(200);
    c.rpb.phi = default_phi(kind);
    c.tlo = default_tlo_params(kind);
    return c;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::size_t run, std::uint64_t stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(run),         static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(index),       static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 gen(seq);
    return gen();
}

namespace {

enum Stream : std::uint64_t { layout_stream = 1, env_stream, learner_stream, perturb_stream, offline_stream };

struct RunOutput {
    std::vector<ExperimentRecord> records;
    RunAudit audit;
    std::optional<CcsStore> ccs;
};

RunOutput execute_run(const ExperimentConfig &config, std::size_t run, const CoverageBundle *frozen) {
    EnvConfig layout = initial_layout(config, run);
    RunOutput out;
    out.audit.run = run;
    out.audit.initial_layout_hash = layout_hash(layout);

    const CoverageSet *set = nullptr;
    if (config.algorithm == Algorithm::ols || config.algorithm == Algorithm::tlo ||
        (config.algorithm == Algorithm::rpb && config.rpb.robustness == RobustnessKind::regret))
        set = &frozen->for_run(run, out.audit.initial_layout_hash);

    auto env = make_environment(layout);
    std::mt19937_64 rng(derive_seed(config.master_seed, run, learner_stream));
    const auto &prefs = config.schedule.preferences;

    std::optional<RpbAgent> agent;
    if (config.algorithm == Algorithm::rpb) {
        ReferenceMean reference;
        if (set) reference = [set](const Preference &w) {
            return scalarize(set->entries[coverage_respond(*set, w)].value_vector, w);
        };
        agent.emplace(env->num_states(), env->num_actions(), prefs.front(), config.rpb, std::move(reference));
    }
    TabularPolicy policy;
    std::vector<TabularPolicy> tlo_tables;

    out.records.reserve(config.schedule.total_episodes());
    out.audit.episode_layout.reserve(config.schedule.total_episodes());
    std::size_t global_episode = 0;
    for (std::size_t k = 0; k < prefs.size(); ++k) {
        const Preference &w = prefs[k];
        switch (config.algorithm) {
        case Algorithm::rpb:
            if (k > 0) agent->on_preference_change(w);
            break;
        case Algorithm::sql: policy = init_policy(env->num_states(), env->num_actions()); break;
        case Algorithm::ols: policy = ols_respond(*set, w); break;
        case Algorithm::tlo: tlo_tables = set->entries[coverage_respond(*set, w)].tables; break;
        }

        for (std::size_t e = 0; e < config.schedule.episodes_per_preference; ++e, ++global_episode) {
            if (config.mode == Mode::nonstationary && global_episode > 0 &&
                global_episode % config.perturb_period == 0) {
                layout = perturb(layout, config.perturb_fraction,
                                 derive_seed(config.master_seed, run, perturb_stream, global_episode));
                env = make_environment(layout);
                out.audit.perturb_episodes.push_back(global_episode);
            }
            out.audit.episode_layout.push_back(layout_hash(layout));

            EpisodeResult result;
            switch (config.algorithm) {
            case Algorithm::rpb:
                result = run_episode(*env, agent->policy(), w, config.learner, rng);
                agent->record_return(result.scalarized_return);
                break;
            case Algorithm::sql:
            case Algorithm::ols: result = run_episode(*env, policy, w, config.learner, rng); break;
            case Algorithm::tlo: result = tlo_run_episode(*env, tlo_tables, w, config.learner, config.tlo, rng); break;
            }
            out.records.push_back({run, k, e, result.scalarized_return, std::move(result.reward_sum),
                                   agent ? agent->ccs().size() : 0});
        }
    }
    if (agent) out.ccs = agent->ccs();
    return out;
}

// Runs f(run) for every run index over `jobs` workers; results stay indexed by run.
template <typename F>
auto parallel_runs(std::size_t runs, std::size_t jobs, F &&f) {
    using R = decltype(f(std::size_t{}));
    std::vector<std::optional<R>> slots(runs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t r = next++; r < runs; r = next++) {
            try {
                slots[r].emplace(f(r));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t j = 1; j < std::min(jobs, runs); ++j) pool.emplace_back(worker);
        worker();
    }
    if (failure) std::rethrow_exception(failure);
    std::vector<R> out;
    out.reserve(runs);
    for (auto &s : slots) out.push_back(std::move(*s));
    return out;
}

} // namespace

EnvConfig initial_layout(const ExperimentConfig &config, std::size_t run) {
    EnvConfig layout = config.env;
    layout.seed = derive_seed(config.master_seed, run, env_stream);
    if (config.randomize_layout) layout = perturb(layout, 1.0, derive_seed(config.master_seed, run, layout_stream));
    return layout;
}

CoverageBundle train_offline(const ExperimentConfig &config, CoverageAlgorithm algorithm) {
    config.validate();
    CoverageBundle bundle;
    bundle.algorithm = algorithm;
    bundle.env = config.env.kind;
    auto sets = parallel_runs(config.runs, config.jobs, [&](std::size_t run) {
        const EnvConfig layout = initial_layout(config, run);
        std::mt19937_64 rng(derive_seed(config.master_seed, run, offline_stream));
        CoverageBundle::RunSet rs;
        rs.run = run;
        rs.layout_hash = layout_hash(layout);
        if (algorithm == CoverageAlgorithm::ols) {
            rs.set = ols_train(layout, config.ols, config.learner, rng);
        } else {
            rs.set = tlo_train(layout, std::span<const Preference>(config.schedule.preferences), config.tlo,
                               config.learner, rng);
        }
        return rs;
    });
    bundle.runs = std::move(sets);
    return bundle;
}

ExperimentResult run_experiment(const ExperimentConfig &config, const CoverageBundle *frozen) {
    config.validate();
    const bool needs_ols = config.algorithm == Algorithm::ols ||
                           (config.algorithm == Algorithm::rpb && config.rpb.robustness == RobustnessKind::regret);
    if (needs_ols && (!frozen || frozen->algorithm != CoverageAlgorithm::ols))
        throw config_error("this configuration needs a frozen OLS coverage set");
    if (config.algorithm == Algorithm::tlo && (!frozen || frozen->algorithm != CoverageAlgorithm::tlo))
        throw config_error("tlo execution needs a frozen TLO coverage set");
    if (frozen && frozen->env != config.env.kind) throw config_error("coverage set was trained on another environment");

    auto outputs = parallel_runs(config.runs, config.jobs, [&](std::size_t run) { return execute_run(config, run, frozen); });
    ExperimentResult result;
    result.records.reserve(config.runs * config.schedule.total_episodes());
    for (auto &o : outputs) {
        std::move(o.records.begin(), o.records.end(), std::back_inserter(result.records));
        result.audits.push_back(std::move(o.audit));
        result.final_ccs.push_back(std::move(o.ccs));
    }
    return result;
}

// ---------------------------------------------------------------- metrics

std::vector<MetricSummary> compute_metrics(const std::vector<ExperimentRecord> &records,
                                           const PreferenceSchedule &schedule) {
    schedule.validate();
    const std::size_t n_pref = schedule.preferences.size();
    const std::size_t n_ep = schedule.episodes_per_preference;

    // (run) -> [pref][episode] returns, independent of ingestion order
    std::map<std::size_t, std::vector<std::vector<std::optional<double>>>> grid;
    for (const auto &r : records) {
        require(r.preference_index < n_pref && r.episode < n_ep, "record outside the schedule");
        auto &g = grid[r.run];
        if (g.empty()) g.assign(n_pref, std::vector<std::optional<double>>(n_ep));
        g[r.preference_index][r.episode] = r.scalarized_return;
    }

    const std::size_t window = std::min(metric_window, n_ep);
    const bool short_segment = n_ep < metric_window;
    std::vector<MetricSummary> out;
    for (const auto &[run, g] : grid) {
        auto window_mean = [&](std::size_t k, std::size_t begin) {
            double acc = 0.0;
            for (std::size_t e = begin; e < begin + window; ++e) {
                require(g[k][e].has_value(), "records incomplete for the schedule");
                acc += *g[k][e];
            }
            return acc / static_cast<double>(window);
        };
        for (std::size_t k = 0; k < n_pref; ++k) {
            MetricSummary m{run, k, window_mean(k, n_ep - window), std::nullopt, short_segment};
            if (k + 1 < n_pref) m.loss = m.gamma_c - window_mean(k + 1, 0);
            out.push_back(m);
        }
    }
    return out;
}

namespace {

template <typename Get>
std::vector<double> per_run_mean(const std::vector<MetricSummary> &metrics, Get get) {
    std::map<std::size_t, std::pair<double, std::size_t>> acc;
    for (const auto &m : metrics) {
        if (auto v = get(m)) {
            auto &[sum, n] = acc[m.run];
            sum += *v;
            ++n;
        }
    }
    std::vector<double> out;
    for (const auto &[run, sn] : acc) out.push_back(sn.first / static_cast<double>(sn.second));
    return out;
}

double sample_std_or_zero(std::span<const double> xs) { return xs.size() >= 2 ? sample_stddev(xs) : 0.0; }

} // namespace

std::vector<double> per_run_gamma_c(const std::vector<MetricSummary> &metrics) {
    return per_run_mean(metrics, [](const MetricSummary &m) { return std::optional<double>(m.gamma_c); });
}

std::vector<double> per_run_loss(const std::vector<MetricSummary> &metrics) {
    return per_run_mean(metrics, [](const MetricSummary &m) { return m.loss; });
}

std::vector<double> all_losses(const std::vector<MetricSummary> &metrics) {
    std::vector<double> out;
    for (const auto &m : metrics)
        if (m.loss) out.push_back(*m.loss);
    return out;
}

// ---------------------------------------------------------------- analyses

std::vector<double> default_phi_grid() {
    std::vector<double> out;
    for (int i = 1; i <= 10; ++i) out.push_back(0.05 * i);
    return out;
}

std::vector<PhiSweepPoint> sweep_phi(const ExperimentConfig &base, std::vector<double> phi_values) {
    if (base.algorithm != Algorithm::rpb) throw config_error("phi sweep requires the rpb algorithm");
    std::sort(phi_values.begin(), phi_values.end());
    std::vector<PhiSweepPoint> out;
    for (double phi : phi_values) {
        ExperimentConfig c = base;
        c.rpb.phi = phi;
        const auto result = run_experiment(c);
        out.push_back({phi, all_losses(compute_metrics(result.records, c.schedule))});
    }
    return out;
}

std::vector<VariantSummary> compare_variants(const ExperimentConfig &base, VariantAxis axis,
                                             const std::vector<std::string> &variants,
                                             const CoverageBundle *reference) {
    if (base.algorithm != Algorithm::rpb) throw config_error("variant comparison requires the rpb algorithm");
    std::vector<VariantSummary> out;
    for (const auto &name : variants) {
        ExperimentConfig c = base;
        if (axis == VariantAxis::robustness_metric)
            c.rpb.robustness = parse_robustness_kind(name);
        else
            c.rpb.distance = parse_distance_kind(name);
        const bool regret = c.rpb.robustness == RobustnessKind::regret;
        const auto result = run_experiment(c, regret ? reference : nullptr);

        std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> segments;
        for (const auto &r : result.records) segments[{r.run, r.preference_index}].push_back(r.scalarized_return);
        std::map<std::size_t, double> sums;
        for (auto &[key, xs] : segments) sums[key.first] += median(std::move(xs));

        VariantSummary v;
        v.name = name;
        for (const auto &[run, s] : sums) v.run_sums.push_back(s);
        v.mean = mean(v.run_sums);
        v.stddev = sample_std_or_zero(v.run_sums);
        out.push_back(std::move(v));
    }
    return out;
}

// ---------------------------------------------------------------- artifacts

std::string format_float(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
    return buf;
}

void write_results_csv(std::ostream &out, const ExperimentConfig &config, const ExperimentResult &result,
                       bool header) {
    if (header) out << "run,algo,env,mode,pref_index,episode,scalarized_return,r0,r1,ccs_size\n";
    const std::string prefix_tail = std::string(",") + std::string(to_string(config.algorithm)) + "," +
                                    std::string(to_string(config.env.kind)) + "," + std::string(to_string(config.mode)) +
                                    ",";
    for (const auto &r : result.records) {
        out << r.run << prefix_tail << r.preference_index << ',' << r.episode << ',' << format_float(r.scalarized_return)
            << ',' << format_float(r.reward_components[0]) << ',' << format_float(r.reward_components[1]) << ','
            << r.ccs_size << '\n';
    }
}

json summarize(const ExperimentConfig &config, const std::vector<AlgorithmRun> &runs) {
    json algos = json::array();
    for (const auto &ar : runs) {
        const std::size_t n_pref = config.schedule.preferences.size();
        json gamma = json::array(), loss = json::array();
        for (std::size_t k = 0; k < n_pref; ++k) {
            std::vector<double> g, l;
            for (const auto &m : ar.metrics) {
                if (m.preference_index != k) continue;
                g.push_back(m.gamma_c);
                if (m.loss) l.push_back(*m.loss);
            }
            if (!g.empty()) gamma.push_back({{"pref_index", k}, {"mean", mean(g)}, {"std", sample_std_or_zero(g)}});
            if (!l.empty()) loss.push_back({{"transition", k}, {"mean", mean(l)}, {"std", sample_std_or_zero(l)}});
        }
        const auto g_runs = per_run_gamma_c(ar.metrics);
        const auto l_runs = per_run_loss(ar.metrics);
        json a{{"name", to_string(ar.algorithm)}, {"gamma_c", gamma}, {"loss", loss},
               {"mean_gamma_c", g_runs.empty() ? json(nullptr) : json(mean(g_runs))},
               {"mean_loss", l_runs.empty() ? json(nullptr) : json(mean(l_runs))}};
        algos.push_back(std::move(a));
    }

    json welch = json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (std::size_t j = i + 1; j < runs.size(); ++j) {
            for (const char *metric : {"gamma_c", "loss"}) {
                const bool is_gamma = std::string_view(metric) == "gamma_c";
                const auto a = is_gamma ? per_run_gamma_c(runs[i].metrics) : per_run_loss(runs[i].metrics);
                const auto b = is_gamma ? per_run_gamma_c(runs[j].metrics) : per_run_loss(runs[j].metrics);
                json row{{"a", to_string(runs[i].algorithm)}, {"b", to_string(runs[j].algorithm)}, {"metric", metric}};
                try {
                    const auto w = welch_t_test(a, b);
                    row["t"] = w.t;
                    row["p"] = w.p;
                } catch (const std::exception &) {
                    row["t"] = nullptr;
                    row["p"] = nullptr;
                }
                welch.push_back(std::move(row));
            }
        }
    }

    json prefs = json::array();
    for (const auto &w : config.schedule.preferences) prefs.push_back(std::vector<double>(w.weights().begin(), w.weights().end()));
    return {{"env", to_string(config.env.kind)},
            {"mode", to_string(config.mode)},
            {"runs", config.runs},
            {"episodes_per_preference", config.schedule.episodes_per_preference},
            {"master_seed", config.master_seed},
            {"preferences", prefs},
            {"algorithms", algos},
            {"welch", welch}};
}

} // namespace morl
