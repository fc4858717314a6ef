#include "morl/learner.hpp"

#include <cmath>

namespace morl {

TabularPolicy::TabularPolicy(std::size_t num_states, std::size_t num_actions)
    : num_states_(num_states), num_actions_(num_actions), values_(num_states * num_actions, 0.0) {
    require(num_states > 0 && num_actions > 0, "policy dimensions must be positive");
}

TabularPolicy::TabularPolicy(std::size_t num_states, std::size_t num_actions, std::vector<double> values)
    : num_states_(num_states), num_actions_(num_actions), values_(std::move(values)) {
    require(num_states > 0 && num_actions > 0, "policy dimensions must be positive");
    require(values_.size() == num_states * num_actions, "q table size does not match its dimensions");
    for (double v : values_) require(std::isfinite(v), "q value is not finite");
}

void LearnerParams::validate() const {
    require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0, 1)");
    require(epsilon >= 0.0 && epsilon <= 1.0, "epsilon must lie in [0, 1]");
}

TabularPolicy init_policy(std::size_t num_states, std::size_t num_actions) {
    return TabularPolicy(num_states, num_actions);
}

TabularPolicy init_policy(std::size_t num_states, std::size_t num_actions, const TabularPolicy &from) {
    require(from.num_states() == num_states && from.num_actions() == num_actions,
            "bootstrap policy dimensions do not match");
    return from;
}

std::size_t argmax_action(std::span<const double> row) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < row.size(); ++a)
        if (row[a] > row[best]) best = a;
    return best;
}

std::size_t greedy_action(const TabularPolicy &policy, std::size_t state_id) {
    return argmax_action(policy.row(state_id));
}

std::size_t select_action(const TabularPolicy &policy, std::size_t state_id, double epsilon, std::mt19937_64 &rng) {
    require(state_id < policy.num_states(), "state id out of range");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < epsilon) {
        std::uniform_int_distribution<std::size_t> pick(0, policy.num_actions() - 1);
        return pick(rng);
    }
    return greedy_action(policy, state_id);
}

double q_update(TabularPolicy &policy, std::size_t s, std::size_t a, double rho, std::size_t s_next, bool done,
                double alpha, double gamma) {
    double target = rho;
    if (!done) {
        const auto next = policy.row(s_next);
        target += gamma * next[argmax_action(next)];
    }
    const double delta = alpha * (target - policy.q(s, a));
    policy.q(s, a) += delta;
    return std::abs(delta);
}

EpisodeResult run_episode(Environment &env, TabularPolicy &policy, const Preference &w, const LearnerParams &params,
                          std::mt19937_64 &rng) {
    require(env.num_objectives() == w.size(), "preference dimension differs from the objective count");
    EpisodeResult result;
    result.reward_sum = RewardVector(env.num_objectives());
    std::size_t s = env.reset(rng());
    while (!env.done()) {
        const std::size_t a = select_action(policy, s, params.epsilon, rng);
        const StepOutcome out = env.step(a);
        const double rho = scalarize(out.reward, w);
        const double dq = q_update(policy, s, a, rho, out.next_state, out.done && !out.truncated, params.alpha, params.gamma);
        result.max_abs_dq = std::max(result.max_abs_dq, dq);
        result.scalarized_return += rho;
        result.reward_sum += out.reward;
        ++result.steps;
        s = out.next_state;
    }
    return result;
}

std::vector<EpisodeResult> run_episodes(Environment &env, TabularPolicy &policy, const Preference &w,
                                        const LearnerParams &params, std::mt19937_64 &rng) {
    params.validate();
    std::vector<EpisodeResult> log;
    log.reserve(params.episodes);
    for (std::size_t e = 0; e < params.episodes; ++e) log.push_back(run_episode(env, policy, w, params, rng));
    return log;
}

std::vector<double> scalarized_returns(std::span<const EpisodeResult> episodes) {
    std::vector<double> out;
    out.reserve(episodes.size());
    for (const auto &e : episodes) out.push_back(e.scalarized_return);
    return out;
}

} // namespace morl
