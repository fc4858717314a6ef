#pragma once

// Offline multi-policy baselines (optimistic linear support, threshold
// lexicographic ordering) and the random-reinit scalarized Q-learning
// baseline.

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "morl/core.hpp"
#include "morl/envs.hpp"
#include "morl/learner.hpp"

namespace morl {

inline constexpr double convergence_dq = 1e-3;
inline constexpr std::size_t convergence_patience = 20;
inline constexpr std::size_t value_window = 50;

struct OlsParams {
    double improvement_threshold = 0.01;
    std::size_t max_policies = 10;
    std::size_t training_episodes_per_preference = 1000;

    void validate() const;
};

/// Lexicographic thresholds, one per objective. Only the gate objective's
/// threshold is consulted; the remaining objective is maximized.
struct TloParams {
    std::vector<double> objective_thresholds;
    std::size_t gate_objective = 0;
    std::size_t training_episodes_per_preference = 1000;

    void validate(std::size_t num_objectives) const;
};

TloParams default_tlo_params(EnvKind kind);

struct CoverageEntry {
    Preference preference;
    std::vector<TabularPolicy> tables; // one scalarized table (OLS) or one per objective (TLO)
    RewardVector value_vector;         // mean per-objective return, final training episodes
};

enum class CoverageAlgorithm { ols, tlo };
std::string_view to_string(CoverageAlgorithm a);

struct CoverageSet {
    CoverageAlgorithm algorithm = CoverageAlgorithm::ols;
    std::vector<CoverageEntry> entries;
};

struct ConvergedTraining {
    std::vector<EpisodeResult> episodes;
    RewardVector value_vector;
};

/// SQ-L from zero until max |dQ| < 1e-3 for 20 consecutive episodes or
/// `episode_cap` episodes.
ConvergedTraining train_until_converged(Environment &env, TabularPolicy &policy, const Preference &w,
                                        const LearnerParams &params, std::size_t episode_cap, std::mt19937_64 &rng);

/// Edge preferences first, then medians of adjacent explored pairs; a
/// policy joins iff it beats every member at its own preference by more
/// than the improvement threshold.
CoverageSet ols_train(Environment &env, const OlsParams &params, const LearnerParams &learner, std::mt19937_64 &rng);
CoverageSet ols_train(const EnvConfig &config, const OlsParams &params, const LearnerParams &learner,
                      std::mt19937_64 &rng);

/// Index of the entry maximizing w . value_vector (earliest on ties).
std::size_t coverage_respond(const CoverageSet &cs, const Preference &w);
/// Scalarized table chosen for w.
const TabularPolicy &ols_respond(const CoverageSet &cs, const Preference &w);

/// Drops entries whose value vector is dominated by another entry's.
void prune_dominated(CoverageSet &cs);

std::size_t tlo_select_action(std::span<const std::span<const double>> q_rows, const TloParams &params);
std::size_t tlo_select_action(const std::vector<TabularPolicy> &tables, std::size_t state_id,
                              const TloParams &params);

/// One epsilon-greedy TLO episode; every per-objective table is backed up
/// on the shared transition towards the TLO-greedy successor action.
EpisodeResult tlo_run_episode(Environment &env, std::vector<TabularPolicy> &tables, const Preference &w,
                              const LearnerParams &learner, const TloParams &params, std::mt19937_64 &rng);

/// Offline TLO training, one entry per listed preference.
CoverageSet tlo_train(Environment &env, std::span<const Preference> preferences, const TloParams &params,
                      const LearnerParams &learner, std::mt19937_64 &rng);
CoverageSet tlo_train(const EnvConfig &config, std::span<const Preference> preferences, const TloParams &params,
                      const LearnerParams &learner, std::mt19937_64 &rng);

/// Zero-initialized SQ-L for one preference; nothing carries over.
std::pair<TabularPolicy, std::vector<EpisodeResult>> sql_random_baseline(Environment &env, const Preference &w,
                                                                         const LearnerParams &learner,
                                                                         std::mt19937_64 &rng);

} // namespace morl
