#pragma once

// Scalarized Q-learning: tabular Q-learning on the linear scalarization
// w . r of a vector reward.

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "morl/core.hpp"
#include "morl/envs.hpp"

namespace morl {

/// Dense row-major Q(s, a) table.
class TabularPolicy {
public:
    TabularPolicy() = default;
    TabularPolicy(std::size_t num_states, std::size_t num_actions);
    TabularPolicy(std::size_t num_states, std::size_t num_actions, std::vector<double> values);

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }

    double q(std::size_t s, std::size_t a) const { return values_[s * num_actions_ + a]; }
    double &q(std::size_t s, std::size_t a) { return values_[s * num_actions_ + a]; }
    std::span<const double> row(std::size_t s) const { return {values_.data() + s * num_actions_, num_actions_}; }
    std::span<const double> values() const { return values_; }

    friend bool operator==(const TabularPolicy &, const TabularPolicy &) = default;

private:
    std::size_t num_states_ = 0;
    std::size_t num_actions_ = 0;
    std::vector<double> values_;
};

struct LearnerParams {
    double alpha = 0.1;
    double gamma = 0.9;
    double epsilon = 0.1;
    std::size_t episodes = 200;

    void validate() const;
};

/// Zero-initialized table.
TabularPolicy init_policy(std::size_t num_states, std::size_t num_actions);
/// Bootstrap path: a copy of `from`, which must have matching dimensions.
TabularPolicy init_policy(std::size_t num_states, std::size_t num_actions, const TabularPolicy &from);

/// argmax over a row, lowest index on ties.
std::size_t argmax_action(std::span<const double> row);
std::size_t greedy_action(const TabularPolicy &policy, std::size_t state_id);

/// Epsilon-greedy: uniform action with probability epsilon, else greedy.
std::size_t select_action(const TabularPolicy &policy, std::size_t state_id, double epsilon, std::mt19937_64 &rng);

/// One Q-learning backup. The bootstrap term is dropped when `done`.
/// Returns the absolute change applied to Q(s, a).
double q_update(TabularPolicy &policy, std::size_t s, std::size_t a, double rho, std::size_t s_next, bool done,
                double alpha, double gamma);

struct EpisodeResult {
    double scalarized_return = 0.0; // undiscounted sum of w . r
    RewardVector reward_sum;        // undiscounted per-objective sum
    int steps = 0;
    double max_abs_dq = 0.0;
};

/// One epsilon-greedy training episode. The episode seed is drawn from `rng`.
EpisodeResult run_episode(Environment &env, TabularPolicy &policy, const Preference &w, const LearnerParams &params,
                          std::mt19937_64 &rng);

/// params.episodes consecutive training episodes; trains `policy` in place.
std::vector<EpisodeResult> run_episodes(Environment &env, TabularPolicy &policy, const Preference &w,
                                        const LearnerParams &params, std::mt19937_64 &rng);

std::vector<double> scalarized_returns(std::span<const EpisodeResult> episodes);

} // namespace morl
