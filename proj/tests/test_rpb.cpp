#include <gtest/gtest.h>

#include <random>

#include "morl/rpb.hpp"
#include "morl/serialization.hpp"

using namespace morl;

namespace {

TabularPolicy filled(double v, std::size_t ns = 3, std::size_t na = 4) {
    return TabularPolicy(ns, na, std::vector<double>(ns * na, v));
}

SteppingstoneEntry entry(const Preference &w, double beta, double fill = 0.0) { return {filled(fill), w, beta}; }

void push_all(RpbAgent &agent, std::initializer_list<double> xs) {
    for (double x : xs) agent.record_return(x);
}

} // namespace

TEST(CcsStore, FindSteppingstone) {
    CcsStore ccs(0.15, DistanceKind::euclidean);
    EXPECT_FALSE(ccs.find_steppingstone_for({0.5, 0.5}));
    ccs.store_or_replace(entry({0.2, 0.8}, 1.0), {0.2, 0.8});
    ccs.store_or_replace(entry({0.8, 0.2}, 1.0), {0.8, 0.2});
    ASSERT_EQ(ccs.size(), 2u);
    EXPECT_EQ(ccs.find_steppingstone_for({0.21, 0.79}), std::optional<std::size_t>(0));
    EXPECT_EQ(ccs.find_steppingstone_for({0.77, 0.23}), std::optional<std::size_t>(1));
    EXPECT_FALSE(ccs.find_steppingstone_for({0.5, 0.5}));
}

TEST(CcsStore, MatchRadiusIsInclusive) {
    const Preference stored{0.5, 0.5}, query{0.6, 0.4};
    const double d = preference_distance(stored, query, DistanceKind::manhattan);
    CcsStore ccs(d, DistanceKind::manhattan);
    ccs.store_or_replace(entry(stored, 1.0), stored);
    EXPECT_EQ(ccs.find_steppingstone_for(query), std::optional<std::size_t>(0));
}

TEST(CcsStore, StoreOrReplace) {
    CcsStore ccs(0.15, DistanceKind::euclidean);
    EXPECT_EQ(ccs.store_or_replace(entry({0.5, 0.5}, 2.0, 1.0), {0.5, 0.5}), StoreOutcome::appended);
    EXPECT_EQ(ccs.size(), 1u);

    EXPECT_EQ(ccs.store_or_replace(entry({0.52, 0.48}, 3.0, 7.0), {0.52, 0.48}), StoreOutcome::replaced);
    ASSERT_EQ(ccs.size(), 1u);
    EXPECT_EQ(ccs.entries()[0].robustness, 3.0);
    EXPECT_EQ(ccs.entries()[0].policy, filled(7.0));

    EXPECT_EQ(ccs.store_or_replace(entry({0.5, 0.5}, 3.0, 9.0), {0.5, 0.5}), StoreOutcome::unchanged);
    EXPECT_EQ(ccs.entries()[0].policy, filled(7.0));

    EXPECT_THROW(ccs.store_or_replace(entry({0.5, 0.5}, 1.0), {0.4, 0.6}), contract_error);
}

TEST(CcsStore, RetrieveNearest) {
    CcsStore ccs(0.15, DistanceKind::euclidean);
    EXPECT_THROW(ccs.retrieve_nearest({0.5, 0.5}), no_steppingstone);
    ccs.store_or_replace(entry({0.9, 0.1}, 1.0), {0.9, 0.1});
    EXPECT_EQ(ccs.retrieve_nearest({0.1, 0.9}), 0u);
    ccs.store_or_replace(entry({0.1, 0.9}, 1.0), {0.1, 0.9});
    EXPECT_EQ(ccs.retrieve_nearest({0.2, 0.8}), 1u);
    EXPECT_EQ(ccs.retrieve_nearest({0.5, 0.5}), 0u); // equidistant: earliest stored
}

TEST(RpbAgent, InsignificantChangeKeepsPolicy) {
    RpbAgent agent(3, 4, {0.5, 0.5}, {});
    agent.policy().q(1, 2) = 4.0;
    push_all(agent, {1, 2, 3});
    const auto change = agent.on_preference_change({0.52, 0.48});
    EXPECT_FALSE(change.significant);
    EXPECT_NEAR(change.distance, std::sqrt(2.0) * 0.02, 1e-12);
    EXPECT_TRUE(agent.ccs().empty());
    EXPECT_EQ(agent.policy().q(1, 2), 4.0);
    EXPECT_EQ(agent.history().size(), 3u);
    EXPECT_EQ(agent.preference(), (Preference{0.52, 0.48}));
}

TEST(RpbAgent, FirstSignificantChangeRegionScopeStartsFresh) {
    RpbParams params;
    params.scope = BootstrapScope::region;
    RpbAgent agent(3, 4, {0.9, 0.1}, params);
    agent.policy().q(0, 0) = 2.5;
    push_all(agent, {2, 4, 2, 4});
    const auto change = agent.on_preference_change({0.1, 0.9});
    EXPECT_TRUE(change.significant);
    EXPECT_EQ(change.stored, StoreOutcome::appended);
    EXPECT_FALSE(change.bootstrap_source);
    ASSERT_EQ(agent.ccs().size(), 1u);
    EXPECT_EQ(agent.ccs().entries()[0].preference, (Preference{0.9, 0.1}));
    EXPECT_NEAR(agent.ccs().entries()[0].robustness, 3.0, 1e-8);
    EXPECT_EQ(agent.policy(), init_policy(3, 4));
    EXPECT_TRUE(agent.history().empty());
}

TEST(RpbAgent, NearestScopeCopiesClosestSteppingstone) {
    RpbAgent agent(3, 4, {0.9, 0.1}, {});
    agent.policy().q(0, 0) = 2.5;
    push_all(agent, {2, 4});
    const auto change = agent.on_preference_change({0.1, 0.9});
    EXPECT_EQ(change.bootstrap_source, std::optional<std::size_t>(0));
    EXPECT_EQ(agent.policy(), agent.ccs().entries()[0].policy);

    // the stored entry is a deep copy: training the live policy leaves it alone
    agent.policy().q(0, 0) = -1.0;
    EXPECT_EQ(agent.ccs().entries()[0].policy.q(0, 0), 2.5);
}

TEST(RpbAgent, ShortHistoryIsNotStored) {
    RpbAgent agent(3, 4, {0.9, 0.1}, {});
    push_all(agent, {5});
    const auto change = agent.on_preference_change({0.1, 0.9});
    EXPECT_TRUE(change.significant);
    EXPECT_FALSE(change.stored);
    EXPECT_TRUE(agent.ccs().empty());
    EXPECT_EQ(agent.policy(), init_policy(3, 4));
}

TEST(RpbAgent, RevisitsOnlyRaiseStoredRobustness) {
    RpbAgent agent(3, 4, {0.9, 0.1}, {});
    const Preference far{0.1, 0.9}, near{0.88, 0.12};
    push_all(agent, {2, 4, 2, 4}); // beta 3
    agent.on_preference_change(far);
    push_all(agent, {1, 1.5});
    agent.on_preference_change(near);
    push_all(agent, {1, 9, 1, 9}); // beta 1.25: kept out
    agent.on_preference_change(far);
    ASSERT_GE(agent.ccs().size(), 1u);
    EXPECT_NEAR(agent.ccs().entries()[0].robustness, 3.0, 1e-8);
    push_all(agent, {1, 1.5});
    agent.on_preference_change(near);
    push_all(agent, {10, 11, 10, 11}); // beta 21: replaces
    agent.on_preference_change(far);
    EXPECT_NEAR(agent.ccs().entries()[0].robustness, 21.0, 1e-6);
    EXPECT_EQ(agent.ccs().entries()[0].preference, near);
}

TEST(RpbAgent, ReplayedSchedulesKeepStoreInvariants) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> ret(0.0, 5.0);
    for (auto kind : {DistanceKind::euclidean, DistanceKind::cosine, DistanceKind::manhattan}) {
        for (double phi : {0.05, 0.15, 0.3}) {
            RpbParams params;
            params.phi = phi;
            params.distance = kind;
            RpbAgent agent(2, 4, {0.5, 0.5}, params);
            std::vector<double> best_beta;
            for (int step = 0; step < 300; ++step) {
                const int n = 1 + static_cast<int>(u(rng) * 6);
                for (int i = 0; i < n; ++i) agent.record_return(ret(rng) + 3.0);
                const double w0 = u(rng);
                const Preference w_new{w0, 1.0 - w0};
                const auto before = agent.ccs().entries();
                const auto previous = agent.preference();
                const auto change = agent.on_preference_change(w_new);
                const auto &after = agent.ccs().entries();
                ASSERT_GE(after.size(), before.size());
                if (!change.significant) {
                    ASSERT_EQ(after.size(), before.size());
                    continue;
                }
                if (change.stored == StoreOutcome::appended) {
                    for (const auto &e : before)
                        ASSERT_GT(preference_distance(e.preference, previous, kind), phi);
                }
                for (std::size_t i = 0; i < before.size(); ++i)
                    ASSERT_GE(after[i].robustness, before[i].robustness);
                if (change.bootstrap_source) ASSERT_EQ(agent.policy(), after[*change.bootstrap_source].policy);
            }
        }
    }
}

TEST(RpbAgent, WideThresholdIsPlainScalarizedQLearning) {
    auto env = make_environment(default_layout(EnvKind::dst));
    RpbParams params;
    params.phi = 1.5;
    const std::vector<Preference> schedule{{0.66, 0.34}, {0.33, 0.67}, {0.88, 0.12}, {0.0, 1.0}, {1.0, 0.0}};
    LearnerParams learner;

    RpbAgent agent(env->num_states(), env->num_actions(), schedule.front(), params);
    std::mt19937_64 rng_a(5);
    std::vector<double> returns_a;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        if (k > 0) EXPECT_FALSE(agent.on_preference_change(schedule[k]).significant);
        for (int e = 0; e < 60; ++e) {
            const auto r = run_episode(*env, agent.policy(), schedule[k], learner, rng_a);
            agent.record_return(r.scalarized_return);
            returns_a.push_back(r.scalarized_return);
        }
    }

    auto plain = init_policy(env->num_states(), env->num_actions());
    std::mt19937_64 rng_b(5);
    std::vector<double> returns_b;
    for (const auto &w : schedule)
        for (int e = 0; e < 60; ++e) returns_b.push_back(run_episode(*env, plain, w, learner, rng_b).scalarized_return);

    EXPECT_TRUE(agent.ccs().empty());
    EXPECT_EQ(agent.policy(), plain);
    EXPECT_EQ(returns_a, returns_b);
}

TEST(RpbAgent, RegretNeedsReference) {
    RpbParams params;
    params.robustness = RobustnessKind::regret;
    EXPECT_THROW(RpbAgent(2, 4, {0.5, 0.5}, params), contract_error);
    RpbAgent agent(2, 4, {0.9, 0.1}, params, [](const Preference &) { return 10.0; });
    push_all(agent, {4, 6});
    agent.on_preference_change({0.1, 0.9});
    EXPECT_NEAR(agent.ccs().entries()[0].robustness, -5.0, 1e-12);
}

TEST(CcsSnapshot, JsonShape) {
    CcsStore ccs(0.15, DistanceKind::euclidean);
    ccs.store_or_replace(entry({0.9, 0.1}, 2.0, 1.5), {0.9, 0.1});
    const auto j = ccs_to_json(ccs);
    EXPECT_EQ(j.at("phi").get<double>(), 0.15);
    ASSERT_EQ(j.at("entries").size(), 1u);
    const auto &e = j.at("entries")[0];
    EXPECT_EQ(e.at("preference").get<std::vector<double>>(), (std::vector<double>{0.9, 0.1}));
    EXPECT_EQ(e.at("robustness").get<double>(), 2.0);
    EXPECT_EQ(e.at("q_table").size(), 12u);
    EXPECT_EQ(policy_from_json(e), filled(1.5));
}
