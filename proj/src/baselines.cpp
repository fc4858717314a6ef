#include "morl/baselines.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <set>

namespace morl {

void OlsParams::validate() const {
    require(improvement_threshold > 0.0, "OLS improvement threshold must be positive");
    require(max_policies > 0, "OLS max_policies must be positive");
    require(training_episodes_per_preference > 0, "OLS training budget must be positive");
}

void TloParams::validate(std::size_t num_objectives) const {
    require(num_objectives == 2, "TLO is defined here for two objectives");
    require(objective_thresholds.size() == num_objectives, "one TLO threshold per objective");
    require(gate_objective < num_objectives, "TLO gate objective out of range");
    require(training_episodes_per_preference > 0, "TLO training budget must be positive");
}

TloParams default_tlo_params(EnvKind kind) {
    constexpr double none = -std::numeric_limits<double>::infinity();
    switch (kind) {
    case EnvKind::sar: return {{-10.0, none}, 0};
    case EnvKind::dst: return {{-20.0, none}, 0};
    case EnvKind::rg: return {{none, -0.5}, 1};
    }
    throw contract_error("unknown environment kind");
}

std::string_view to_string(CoverageAlgorithm a) { return a == CoverageAlgorithm::ols ? "ols" : "tlo"; }

namespace {

RewardVector mean_tail_value(std::span<const EpisodeResult> episodes, std::size_t m) {
    RewardVector v(m);
    const std::size_t n = std::min(episodes.size(), value_window);
    if (n == 0) return v;
    for (std::size_t i = episodes.size() - n; i < episodes.size(); ++i) v += episodes[i].reward_sum;
    v *= 1.0 / static_cast<double>(n);
    return v;
}

Preference two_objective(double w0) {
    w0 = std::clamp(w0, 0.0, 1.0);
    return Preference({w0, 1.0 - w0});
}

} // namespace

ConvergedTraining train_until_converged(Environment &env, TabularPolicy &policy, const Preference &w,
                                        const LearnerParams &params, std::size_t episode_cap, std::mt19937_64 &rng) {
    params.validate();
    ConvergedTraining out;
    std::size_t calm = 0;
    while (out.episodes.size() < episode_cap && calm < convergence_patience) {
        out.episodes.push_back(run_episode(env, policy, w, params, rng));
        calm = out.episodes.back().max_abs_dq < convergence_dq ? calm + 1 : 0;
    }
    out.value_vector = mean_tail_value(out.episodes, env.num_objectives());
    return out;
}

CoverageSet ols_train(Environment &env, const OlsParams &params, const LearnerParams &learner, std::mt19937_64 &rng) {
    params.validate();
    require(env.num_objectives() == 2, "OLS is implemented for two objectives");
    if (params.max_policies < 2) throw partial_set_error("OLS budget does not cover both edge preferences");

    CoverageSet cs;
    cs.algorithm = CoverageAlgorithm::ols;

    auto train_at = [&](const Preference &w) {
        TabularPolicy policy = init_policy(env.num_states(), env.num_actions());
        std::mt19937_64 local(rng());
        auto result = train_until_converged(env, policy, w, learner, params.training_episodes_per_preference, local);
        return CoverageEntry{w, {std::move(policy)}, std::move(result.value_vector)};
    };
    auto best_value_at = [&](const Preference &w) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto &e : cs.entries) best = std::max(best, scalarize(e.value_vector, w));
        return best;
    };

    constexpr double lo_edge = 0.1, hi_edge = 0.9;
    cs.entries.push_back(train_at(two_objective(hi_edge)));
    cs.entries.push_back(train_at(two_objective(lo_edge)));

    std::set<long long> explored{std::llround(lo_edge * 1e9), std::llround(hi_edge * 1e9)};
    std::deque<std::pair<double, double>> intervals{{lo_edge, hi_edge}};
    while (!intervals.empty() && cs.entries.size() < params.max_policies) {
        const auto [a, b] = intervals.front();
        intervals.pop_front();
        const double mid = 0.5 * (a + b);
        if (!explored.insert(std::llround(mid * 1e9)).second) continue;

        const Preference w = two_objective(mid);
        CoverageEntry candidate = train_at(w);
        if (scalarize(candidate.value_vector, w) > best_value_at(w) + params.improvement_threshold) {
            cs.entries.push_back(std::move(candidate));
            intervals.emplace_back(a, mid);
            intervals.emplace_back(mid, b);
        }
    }
    prune_dominated(cs);
    return cs;
}

CoverageSet ols_train(const EnvConfig &config, const OlsParams &params, const LearnerParams &learner,
                      std::mt19937_64 &rng) {
    auto env = make_environment(config);
    return ols_train(*env, params, learner, rng);
}

std::size_t coverage_respond(const CoverageSet &cs, const Preference &w) {
    require(!cs.entries.empty(), "coverage set is empty");
    std::size_t best = 0;
    double best_v = scalarize(cs.entries[0].value_vector, w);
    for (std::size_t i = 1; i < cs.entries.size(); ++i) {
        const double v = scalarize(cs.entries[i].value_vector, w);
        if (v > best_v) {
            best = i;
            best_v = v;
        }
    }
    return best;
}

const TabularPolicy &ols_respond(const CoverageSet &cs, const Preference &w) {
    return cs.entries[coverage_respond(cs, w)].tables.front();
}

void prune_dominated(CoverageSet &cs) {
    std::vector<bool> dominated(cs.entries.size(), false);
    for (std::size_t i = 0; i < cs.entries.size(); ++i)
        for (std::size_t j = 0; j < cs.entries.size() && !dominated[i]; ++j)
            dominated[i] = j != i && dominates(cs.entries[j].value_vector, cs.entries[i].value_vector);
    std::vector<CoverageEntry> kept;
    for (std::size_t i = 0; i < cs.entries.size(); ++i)
        if (!dominated[i]) kept.push_back(std::move(cs.entries[i]));
    cs.entries = std::move(kept);
}

std::size_t tlo_select_action(std::span<const std::span<const double>> q_rows, const TloParams &params) {
    require(q_rows.size() == 2, "TLO selection expects two objective rows");
    const auto gate = q_rows[params.gate_objective];
    const auto other = q_rows[1 - params.gate_objective];
    require(gate.size() == other.size() && !gate.empty(), "TLO rows must share the action count");
    const double threshold = params.objective_thresholds[params.gate_objective];

    std::optional<std::size_t> best;
    for (std::size_t a = 0; a < gate.size(); ++a)
        if (gate[a] > threshold && (!best || other[a] > other[*best])) best = a;
    return best ? *best : argmax_action(gate);
}

std::size_t tlo_select_action(const std::vector<TabularPolicy> &tables, std::size_t state_id,
                              const TloParams &params) {
    const std::array<std::span<const double>, 2> rows{tables[0].row(state_id), tables[1].row(state_id)};
    return tlo_select_action(std::span<const std::span<const double>>(rows), params);
}

EpisodeResult tlo_run_episode(Environment &env, std::vector<TabularPolicy> &tables, const Preference &w,
                              const LearnerParams &learner, const TloParams &params, std::mt19937_64 &rng) {
    params.validate(env.num_objectives());
    require(tables.size() == env.num_objectives(), "one TLO table per objective");
    EpisodeResult result;
    result.reward_sum = RewardVector(env.num_objectives());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> any(0, env.num_actions() - 1);

    std::size_t s = env.reset(rng());
    while (!env.done()) {
        const std::size_t a = u(rng) < learner.epsilon ? any(rng) : tlo_select_action(tables, s, params);
        const StepOutcome out = env.step(a);
        const bool terminal = out.done && !out.truncated;
        const std::size_t a_next = terminal ? 0 : tlo_select_action(tables, out.next_state, params);
        for (std::size_t m = 0; m < tables.size(); ++m) {
            double target = out.reward[m];
            if (!terminal) target += learner.gamma * tables[m].q(out.next_state, a_next);
            const double delta = learner.alpha * (target - tables[m].q(s, a));
            tables[m].q(s, a) += delta;
            result.max_abs_dq = std::max(result.max_abs_dq, std::abs(delta));
        }
        const double rho = scalarize(out.reward, w);
        result.scalarized_return += rho;
        result.reward_sum += out.reward;
        ++result.steps;
        s = out.next_state;
    }
    return result;
}

CoverageSet tlo_train(Environment &env, std::span<const Preference> preferences, const TloParams &params,
                      const LearnerParams &learner, std::mt19937_64 &rng) {
    params.validate(env.num_objectives());
    learner.validate();
    CoverageSet cs;
    cs.algorithm = CoverageAlgorithm::tlo;
    for (const auto &w : preferences) {
        std::vector<TabularPolicy> tables(env.num_objectives(), init_policy(env.num_states(), env.num_actions()));
        std::mt19937_64 local(rng());
        std::vector<EpisodeResult> episodes;
        std::size_t calm = 0;
        while (episodes.size() < params.training_episodes_per_preference && calm < convergence_patience) {
            episodes.push_back(tlo_run_episode(env, tables, w, learner, params, local));
            calm = episodes.back().max_abs_dq < convergence_dq ? calm + 1 : 0;
        }
        cs.entries.push_back({w, std::move(tables), mean_tail_value(episodes, env.num_objectives())});
    }
    return cs;
}

CoverageSet tlo_train(const EnvConfig &config, std::span<const Preference> preferences, const TloParams &params,
                      const LearnerParams &learner, std::mt19937_64 &rng) {
    auto env = make_environment(config);
    return tlo_train(*env, preferences, params, learner, rng);
}

std::pair<TabularPolicy, std::vector<EpisodeResult>> sql_random_baseline(Environment &env, const Preference &w,
                                                                         const LearnerParams &learner,
                                                                         std::mt19937_64 &rng) {
    TabularPolicy policy = init_policy(env.num_states(), env.num_actions());
    auto log = run_episodes(env, policy, w, learner, rng);
    return {std::move(policy), std::move(log)};
}

} // namespace morl
