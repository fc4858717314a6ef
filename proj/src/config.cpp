#include "morl/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace morl {

using nlohmann::json;

namespace {

void reject_unknown(const json &j, const std::set<std::string> &known, const std::string &where) {
    if (!j.is_object()) throw config_error(where + " must be a JSON object");
    for (const auto &[key, _] : j.items())
        if (!known.contains(key)) throw config_error("unknown key '" + key + "' in " + where);
}

double threshold_from_json(const json &v) {
    return v.is_null() ? -std::numeric_limits<double>::infinity() : v.get<double>();
}

json threshold_to_json(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

std::filesystem::path resolve(const std::filesystem::path &p, const std::filesystem::path &relative_to) {
    return p.is_absolute() || relative_to.empty() ? p : relative_to / p;
}

} // namespace

RunSettings apply_config_json(RunSettings s, const json &j, const std::filesystem::path &relative_to) {
    reject_unknown(j,
                   {"env", "layout", "algorithm", "mode", "runs", "episodes_per_preference", "preferences",
                    "perturb_period", "perturb_fraction", "master_seed", "randomize_layout", "jobs", "learner", "rpb",
                    "ols", "tlo", "coverage_set", "out"},
                   "config");
    auto &c = s.experiment;
    try {
        if (j.contains("layout")) {
            c.env = load_layout(resolve(j.at("layout").get<std::string>(), relative_to));
            if (j.contains("env") && parse_env_kind(j.at("env").get<std::string>()) != c.env.kind)
                throw config_error("layout kind differs from 'env'");
        } else if (j.contains("env")) {
            const EnvKind kind = parse_env_kind(j.at("env").get<std::string>());
            if (kind != c.env.kind) {
                c.env = default_layout(kind);
                c.rpb.phi = default_phi(kind);
                c.tlo = default_tlo_params(kind);
            }
        }
        if (j.contains("algorithm")) c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
        if (j.contains("runs")) c.runs = j.at("runs").get<std::size_t>();
        if (j.contains("episodes_per_preference"))
            c.schedule.episodes_per_preference = j.at("episodes_per_preference").get<std::size_t>();
        if (j.contains("preferences")) {
            c.schedule.preferences.clear();
            for (const auto &w : j.at("preferences")) c.schedule.preferences.emplace_back(w.get<std::vector<double>>());
        }
        if (j.contains("perturb_period")) c.perturb_period = j.at("perturb_period").get<std::size_t>();
        if (j.contains("perturb_fraction")) c.perturb_fraction = j.at("perturb_fraction").get<double>();
        if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("randomize_layout")) c.randomize_layout = j.at("randomize_layout").get<bool>();
        if (j.contains("jobs")) c.jobs = j.at("jobs").get<std::size_t>();
        if (j.contains("learner")) {
            const auto &l = j.at("learner");
            reject_unknown(l, {"alpha", "gamma", "epsilon"}, "learner");
            c.learner.alpha = l.value("alpha", c.learner.alpha);
            c.learner.gamma = l.value("gamma", c.learner.gamma);
            c.learner.epsilon = l.value("epsilon", c.learner.epsilon);
        }
        if (j.contains("rpb")) {
            const auto &r = j.at("rpb");
            reject_unknown(r, {"phi", "distance", "robustness", "history_window", "bootstrap_scope"}, "rpb");
            c.rpb.phi = r.value("phi", c.rpb.phi);
            if (r.contains("distance")) c.rpb.distance = parse_distance_kind(r.at("distance").get<std::string>());
            if (r.contains("robustness"))
                c.rpb.robustness = parse_robustness_kind(r.at("robustness").get<std::string>());
            c.rpb.history_window = r.value("history_window", c.rpb.history_window);
            if (r.contains("bootstrap_scope"))
                c.rpb.scope = parse_bootstrap_scope(r.at("bootstrap_scope").get<std::string>());
        }
        if (j.contains("ols")) {
            const auto &o = j.at("ols");
            reject_unknown(o, {"improvement_threshold", "max_policies", "training_episodes_per_preference"}, "ols");
            c.ols.improvement_threshold = o.value("improvement_threshold", c.ols.improvement_threshold);
            c.ols.max_policies = o.value("max_policies", c.ols.max_policies);
            c.ols.training_episodes_per_preference =
                o.value("training_episodes_per_preference", c.ols.training_episodes_per_preference);
        }
        if (j.contains("tlo")) {
            const auto &t = j.at("tlo");
            reject_unknown(t, {"objective_thresholds", "gate_objective", "training_episodes_per_preference"}, "tlo");
            if (t.contains("objective_thresholds")) {
                c.tlo.objective_thresholds.clear();
                for (const auto &v : t.at("objective_thresholds"))
                    c.tlo.objective_thresholds.push_back(threshold_from_json(v));
            }
            c.tlo.gate_objective = t.value("gate_objective", c.tlo.gate_objective);
            c.tlo.training_episodes_per_preference =
                t.value("training_episodes_per_preference", c.tlo.training_episodes_per_preference);
        }
        if (j.contains("coverage_set")) s.coverage_set = resolve(j.at("coverage_set").get<std::string>(), relative_to);
        if (j.contains("out")) s.out = j.at("out").get<std::string>();
    } catch (const json::exception &e) {
        throw config_error(std::string("malformed config: ") + e.what());
    } catch (const contract_error &e) {
        throw config_error(std::string("invalid config: ") + e.what());
    }
    return s;
}

RunSettings settings_from_json(const json &j, const std::filesystem::path &relative_to) {
    EnvKind kind = EnvKind::dst;
    try {
        if (j.is_object() && j.contains("env")) kind = parse_env_kind(j.at("env").get<std::string>());
    } catch (const json::exception &e) {
        throw config_error(std::string("malformed config: ") + e.what());
    }
    RunSettings base{desk_config(kind, Algorithm::rpb, Mode::stationary), std::nullopt, std::nullopt};
    return apply_config_json(std::move(base), j, relative_to);
}

RunSettings load_settings(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    return settings_from_json(j, path.parent_path());
}

json settings_to_json(const RunSettings &s) {
    const auto &c = s.experiment;
    json prefs = json::array();
    for (const auto &w : c.schedule.preferences) prefs.push_back(std::vector<double>(w.weights().begin(), w.weights().end()));
    json thresholds = json::array();
    for (double t : c.tlo.objective_thresholds) thresholds.push_back(threshold_to_json(t));
    json j{{"env", to_string(c.env.kind)},
           {"algorithm", to_string(c.algorithm)},
           {"mode", to_string(c.mode)},
           {"runs", c.runs},
           {"episodes_per_preference", c.schedule.episodes_per_preference},
           {"preferences", prefs},
           {"perturb_period", c.perturb_period},
           {"perturb_fraction", c.perturb_fraction},
           {"master_seed", c.master_seed},
           {"randomize_layout", c.randomize_layout},
           {"jobs", c.jobs},
           {"learner", {{"alpha", c.learner.alpha}, {"gamma", c.learner.gamma}, {"epsilon", c.learner.epsilon}}},
           {"rpb",
            {{"phi", c.rpb.phi},
             {"distance", to_string(c.rpb.distance)},
             {"robustness", to_string(c.rpb.robustness)},
             {"history_window", c.rpb.history_window},
             {"bootstrap_scope", to_string(c.rpb.scope)}}},
           {"ols",
            {{"improvement_threshold", c.ols.improvement_threshold},
             {"max_policies", c.ols.max_policies},
             {"training_episodes_per_preference", c.ols.training_episodes_per_preference}}},
           {"tlo",
            {{"objective_thresholds", thresholds},
             {"gate_objective", c.tlo.gate_objective},
             {"training_episodes_per_preference", c.tlo.training_episodes_per_preference}}}};
    if (s.coverage_set) j["coverage_set"] = s.coverage_set->string();
    if (s.out) j["out"] = s.out->string();
    return j;
}

} // namespace morl
