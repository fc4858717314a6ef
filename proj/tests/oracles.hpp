#pragma once

// Reference computations the library is checked against. Nothing here
// calls into the learner; only the MDP containers are shared.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "morl/envs.hpp"

namespace oracle {

using morl::Preference;
using morl::RewardVector;
using morl::TableMomdp;

inline double dot(const RewardVector &r, const Preference &w) {
    double s = 0.0;
    for (std::size_t m = 0; m < w.size(); ++m) s += r[m] * w[m];
    return s;
}

/// Optimal scalarized Q* of a deterministic table MDP by value iteration.
inline std::vector<std::vector<double>> value_iteration(const TableMomdp &mdp, const Preference &w, double gamma,
                                                        double tol = 1e-12) {
    const std::size_t ns = mdp.num_states(), na = mdp.num_actions();
    std::vector<std::vector<double>> q(ns, std::vector<double>(na, 0.0));
    for (int iter = 0; iter < 100000; ++iter) {
        double delta = 0.0;
        auto next = q;
        for (std::size_t s = 0; s < ns; ++s) {
            if (mdp.terminal(s)) continue;
            for (std::size_t a = 0; a < na; ++a) {
                const auto &e = mdp.edge(s, a);
                const double tail = mdp.terminal(e.next) ? 0.0 : *std::max_element(q[e.next].begin(), q[e.next].end());
                next[s][a] = dot(e.reward, w) + gamma * tail;
                delta = std::max(delta, std::abs(next[s][a] - q[s][a]));
            }
        }
        q = std::move(next);
        if (delta < tol) break;
    }
    return q;
}

inline std::size_t first_argmax(const std::vector<double> &row) {
    return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

/// Smallest gap between the best and second-best action over non-terminal states.
inline double action_gap(const TableMomdp &mdp, const std::vector<std::vector<double>> &q) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < q.size(); ++s) {
        if (mdp.terminal(s)) continue;
        auto row = q[s];
        std::sort(row.begin(), row.end(), std::greater<>());
        gap = std::min(gap, row[0] - row[1]);
    }
    return gap;
}

/// Random deterministic MDP with `states` states (the last one terminal),
/// four actions and two objectives; every non-terminal state is a start
/// state. Rewards are non-positive so a zero-initialized table is optimistic
/// and every action gets tried. Redraws until the optimal action is
/// unambiguous by `min_gap`.
inline TableMomdp random_mdp(std::uint64_t seed, std::size_t states, const Preference &w, double gamma,
                             double min_gap = 0.05) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, states - 1);
    std::uniform_real_distribution<double> reward(-1.0, 0.0);
    for (;;) {
        std::vector<std::vector<TableMomdp::Edge>> edges(states);
        for (std::size_t s = 0; s < states; ++s)
            for (std::size_t a = 0; a < 4; ++a) edges[s].push_back({pick(rng), RewardVector{reward(rng), reward(rng)}});
        std::vector<bool> terminal(states, false);
        terminal.back() = true;
        std::vector<std::size_t> starts(states - 1);
        std::iota(starts.begin(), starts.end(), 0);
        TableMomdp mdp(std::move(edges), std::move(terminal), std::move(starts), 200);
        if (action_gap(mdp, value_iteration(mdp, w, gamma)) >= min_gap) return mdp;
    }
}

/// Discounted vector return of a deterministic stationary policy from `start`.
inline RewardVector policy_value(const TableMomdp &mdp, const std::vector<std::size_t> &policy, std::size_t start,
                                 double gamma, int horizon) {
    RewardVector v(mdp.num_objectives());
    std::size_t s = start;
    double discount = 1.0;
    for (int t = 0; t < horizon && !mdp.terminal(s); ++t) {
        const auto &e = mdp.edge(s, policy[s]);
        v += discount * e.reward;
        discount *= gamma;
        s = e.next;
    }
    return v;
}

/// Best scalarized value from `start` over every deterministic stationary policy.
inline double best_enumerated_value(const TableMomdp &mdp, const Preference &w, std::size_t start, double gamma,
                                    int horizon) {
    const std::size_t ns = mdp.num_states(), na = mdp.num_actions();
    std::vector<std::size_t> policy(ns, 0);
    double best = -std::numeric_limits<double>::infinity();
    for (;;) {
        best = std::max(best, dot(policy_value(mdp, policy, start, gamma, horizon), w));
        std::size_t i = 0;
        while (i < ns && ++policy[i] == na) policy[i++] = 0;
        if (i == ns) break;
    }
    return best;
}

/// Two-sided permutation p-value for a difference in means.
inline double permutation_p(const std::vector<double> &a, const std::vector<double> &b, std::size_t permutations,
                            std::uint64_t seed) {
    auto mean_of = [](auto first, auto last) { return std::accumulate(first, last, 0.0) / double(last - first); };
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const double observed = std::abs(mean_of(a.begin(), a.end()) - mean_of(b.begin(), b.end()));
    std::mt19937_64 rng(seed);
    std::size_t extreme = 0;
    for (std::size_t k = 0; k < permutations; ++k) {
        std::shuffle(pooled.begin(), pooled.end(), rng);
        const auto split = pooled.begin() + static_cast<std::ptrdiff_t>(a.size());
        if (std::abs(mean_of(pooled.begin(), split) - mean_of(split, pooled.end())) >= observed - 1e-12) ++extreme;
    }
    return (double(extreme) + 1.0) / (double(permutations) + 1.0);
}

} // namespace oracle
