#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "morl/harness.hpp"
#include "morl/stats.hpp"
#include "oracles.hpp"

using namespace morl;

namespace {

ExperimentConfig tiny(EnvKind kind, Algorithm algo, Mode mode, std::size_t runs, std::size_t episodes) {
    auto c = desk_config(kind, algo, mode);
    c.runs = runs;
    c.schedule.episodes_per_preference = episodes;
    c.master_seed = 2024;
    c.jobs = 2;
    return c;
}

std::vector<ExperimentRecord> synthetic(std::size_t runs, std::size_t prefs, std::size_t episodes,
                                        double (*value)(std::size_t, std::size_t, std::size_t)) {
    std::vector<ExperimentRecord> out;
    for (std::size_t r = 0; r < runs; ++r)
        for (std::size_t k = 0; k < prefs; ++k)
            for (std::size_t e = 0; e < episodes; ++e)
                out.push_back({r, k, e, value(r, k, e), RewardVector{0.0, 0.0}, 0});
    return out;
}

PreferenceSchedule schedule_of(std::size_t prefs, std::size_t episodes) {
    PreferenceSchedule s;
    s.preferences = default_preferences();
    s.preferences.erase(s.preferences.begin() + static_cast<long>(prefs), s.preferences.end());
    s.episodes_per_preference = episodes;
    return s;
}

std::string csv_of(const ExperimentConfig &c, const ExperimentResult &r) {
    std::ostringstream out;
    write_results_csv(out, c, r);
    return out.str();
}

} // namespace

TEST(Schedule, DefaultPreferences) {
    const auto prefs = default_preferences();
    ASSERT_EQ(prefs.size(), 9u);
    EXPECT_EQ(prefs.front()[0], 0.66);
    EXPECT_NEAR(prefs.front()[1], 0.34, 1e-12);
    EXPECT_NEAR(prefs.back()[0], 0.48, 1e-12);
    EXPECT_EQ(default_phi(EnvKind::sar), 0.25);
    EXPECT_EQ(default_phi(EnvKind::dst), 0.15);
    EXPECT_EQ(default_phi(EnvKind::rg), 0.15);
}

TEST(Metrics, ConstantSignal) {
    const auto records = synthetic(2, 3, 100, [](std::size_t, std::size_t, std::size_t) { return 5.0; });
    const auto m = compute_metrics(records, schedule_of(3, 100));
    ASSERT_EQ(m.size(), 6u);
    for (const auto &s : m) {
        EXPECT_EQ(s.gamma_c, 5.0);
        if (s.preference_index < 2) EXPECT_EQ(s.loss, 0.0);
        else EXPECT_FALSE(s.loss);
        EXPECT_FALSE(s.flagged);
    }
}

TEST(Metrics, WindowMeans) {
    // segment 0: last 50 episodes are 4; segment 1: first 50 are 1
    const auto records = synthetic(1, 2, 120, [](std::size_t, std::size_t k, std::size_t e) {
        if (k == 0) return e >= 70 ? 4.0 : 0.0;
        return e < 50 ? 1.0 : 9.0;
    });
    const auto m = compute_metrics(records, schedule_of(2, 120));
    EXPECT_DOUBLE_EQ(m[0].gamma_c, 4.0);
    EXPECT_DOUBLE_EQ(*m[0].loss, 3.0);
    EXPECT_DOUBLE_EQ(m[1].gamma_c, 9.0);
}

TEST(Metrics, ShortSegmentsAreFlagged) {
    const auto records = synthetic(1, 2, 20, [](std::size_t, std::size_t k, std::size_t e) { return double(k * 100 + e); });
    const auto m = compute_metrics(records, schedule_of(2, 20));
    EXPECT_TRUE(m[0].flagged);
    EXPECT_DOUBLE_EQ(m[0].gamma_c, 9.5);
    EXPECT_DOUBLE_EQ(*m[0].loss, 9.5 - 109.5);
}

TEST(Metrics, EightLossesPerRunAndOrderIndependent) {
    auto records = synthetic(3, 9, 60, [](std::size_t r, std::size_t k, std::size_t e) {
        return std::sin(double(r * 1000 + k * 77 + e));
    });
    const auto schedule = schedule_of(9, 60);
    const auto m = compute_metrics(records, schedule);
    EXPECT_EQ(all_losses(m).size(), 3u * 8u);
    EXPECT_EQ(per_run_gamma_c(m).size(), 3u);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 5; ++i) {
        std::shuffle(records.begin(), records.end(), rng);
        const auto again = compute_metrics(records, schedule);
        ASSERT_EQ(again.size(), m.size());
        for (std::size_t j = 0; j < m.size(); ++j) {
            EXPECT_EQ(again[j].gamma_c, m[j].gamma_c);
            EXPECT_EQ(again[j].loss, m[j].loss);
        }
    }
}

TEST(Welch, MatchesReferenceValues) {
    // reference values from scipy.stats.ttest_ind(equal_var=False)
    const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10, 12};
    const auto r = welch_t_test(a, b);
    EXPECT_NEAR(r.t, -2.3763541031440183, 1e-9);
    EXPECT_NEAR(r.p, 0.04928433820673049, 1e-9);

    const std::vector<double> c{19.7, 20.1, 18.4, 22.0, 21.3, 19.9, 20.5}, d{17.2, 18.8, 16.9, 19.4, 18.1};
    const auto s = welch_t_test(c, d);
    EXPECT_NEAR(s.t, 3.405364828422644, 1e-9);
    EXPECT_NEAR(s.p, 0.007446865315482966, 1e-9);

    EXPECT_NEAR(student_t_two_sided(2.0, 3.5), 0.1261385225759135, 1e-9);
    EXPECT_NEAR(student_t_two_sided(0.3, 27.25), 0.7664537901731648, 1e-9);
}

TEST(Welch, IdenticalSymmetricAndSeparated) {
    const std::vector<double> a{1, 3, 2, 5, 4};
    const auto same = welch_t_test(a, a);
    EXPECT_EQ(same.t, 0.0);
    EXPECT_NEAR(same.p, 1.0, 1e-9);

    const std::vector<double> b{2, 6, 3, 3, 9, 1};
    const auto ab = welch_t_test(a, b), ba = welch_t_test(b, a);
    EXPECT_DOUBLE_EQ(ab.t, -ba.t);
    EXPECT_DOUBLE_EQ(ab.p, ba.p);

    std::mt19937_64 rng(42);
    std::normal_distribution<double> n0(0.0, 1.0), n5(5.0, 1.0);
    std::vector<double> x(100), y(100);
    for (auto &v : x) v = n0(rng);
    for (auto &v : y) v = n5(rng);
    EXPECT_LT(welch_t_test(x, y).p, 1e-10);
}

TEST(Welch, DegenerateSamples) {
    EXPECT_THROW(welch_t_test(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), undefined_test);
    EXPECT_THROW(welch_t_test(std::vector<double>{2.0, 2.0}, std::vector<double>{3.0, 3.0}), undefined_test);
}

TEST(Welch, AgreesWithPermutationTest) {
    std::mt19937_64 rng(7);
    for (int c = 0; c < 20; ++c) {
        const double shift = c % 2 == 0 ? 3.0 : 0.0;
        std::normal_distribution<double> na(0.0, 1.0), nb(shift, 1.5);
        std::vector<double> a(15), b(15);
        for (auto &v : a) v = na(rng);
        for (auto &v : b) v = nb(rng);
        const auto w = welch_t_test(a, b);
        const double perm = oracle::permutation_p(a, b, 4000, 100 + c);
        EXPECT_EQ(w.t < 0, mean(a) < mean(b)) << c;
        EXPECT_NEAR(w.p, perm, 0.05) << c;
        if (shift > 0) {
            EXPECT_LT(w.p, 0.05) << c;
            EXPECT_LT(perm, 0.05) << c;
        }
    }
}

TEST(Seeds, DerivedStreamsDiffer) {
    std::set<std::uint64_t> seen;
    for (std::size_t run = 0; run < 10; ++run)
        for (std::uint64_t stream = 1; stream <= 5; ++stream) seen.insert(derive_seed(7, run, stream));
    EXPECT_EQ(seen.size(), 50u);
    EXPECT_EQ(derive_seed(7, 3, 2, 100), derive_seed(7, 3, 2, 100));
}

TEST(Experiment, RecordCountAndPerturbationEvents) {
    auto c = tiny(EnvKind::dst, Algorithm::rpb, Mode::nonstationary, 2, 800);
    const auto result = run_experiment(c);
    EXPECT_EQ(result.records.size(), 2u * 9u * 800u);
    for (const auto &audit : result.audits) {
        ASSERT_EQ(audit.perturb_episodes.size(), 71u);
        EXPECT_EQ(audit.perturb_episodes.front(), 100u);
        for (std::size_t g = 1; g < audit.episode_layout.size(); ++g)
            EXPECT_EQ(audit.episode_layout[g] != audit.episode_layout[g - 1], g % 100 == 0) << g;
    }
}

TEST(Experiment, StationaryLayoutNeverChanges) {
    const auto c = tiny(EnvKind::sar, Algorithm::sql, Mode::stationary, 2, 30);
    const auto result = run_experiment(c);
    for (const auto &audit : result.audits) {
        EXPECT_TRUE(audit.perturb_episodes.empty());
        for (auto h : audit.episode_layout) EXPECT_EQ(h, audit.initial_layout_hash);
    }
    EXPECT_NE(result.audits[0].initial_layout_hash, result.audits[1].initial_layout_hash);
}

TEST(Experiment, ReplayIsByteIdentical) {
    for (auto algo : {Algorithm::rpb, Algorithm::sql}) {
        auto c = tiny(EnvKind::rg, algo, Mode::nonstationary, 3, 40);
        const auto a = csv_of(c, run_experiment(c));
        c.jobs = 1;
        const auto b = csv_of(c, run_experiment(c));
        EXPECT_EQ(a, b);
        EXPECT_EQ(a.substr(0, a.find('\n')), "run,algo,env,mode,pref_index,episode,scalarized_return,r0,r1,ccs_size");
        EXPECT_EQ(a.find('\r'), std::string::npos);
    }
}

TEST(Experiment, FrozenSetsAreRequired) {
    const auto ols = tiny(EnvKind::dst, Algorithm::ols, Mode::stationary, 1, 10);
    EXPECT_THROW(run_experiment(ols), config_error);
    auto regret = tiny(EnvKind::dst, Algorithm::rpb, Mode::stationary, 1, 10);
    regret.rpb.robustness = RobustnessKind::regret;
    EXPECT_THROW(run_experiment(regret), config_error);
    const auto tlo = tiny(EnvKind::dst, Algorithm::tlo, Mode::stationary, 1, 10);
    EXPECT_THROW(run_experiment(tlo), config_error);
}

TEST(Experiment, OfflineBundlesDriveBaselines) {
    auto c = tiny(EnvKind::rg, Algorithm::ols, Mode::stationary, 2, 20);
    c.ols.training_episodes_per_preference = 100;
    c.tlo.training_episodes_per_preference = 50;
    const auto ols = train_offline(c, CoverageAlgorithm::ols);
    ASSERT_EQ(ols.runs.size(), 2u);
    EXPECT_EQ(ols.runs[1].layout_hash, layout_hash(initial_layout(c, 1)));
    EXPECT_EQ(run_experiment(c, &ols).records.size(), 2u * 9u * 20u);

    c.algorithm = Algorithm::tlo;
    const auto tlo = train_offline(c, CoverageAlgorithm::tlo);
    EXPECT_EQ(tlo.runs[0].set.entries.size(), 9u);
    EXPECT_EQ(run_experiment(c, &tlo).records.size(), 2u * 9u * 20u);
    EXPECT_THROW(run_experiment(c, &ols), config_error);

    c.master_seed += 1; // layouts no longer match the bundle
    EXPECT_THROW(run_experiment(c, &tlo), config_error);
}

TEST(Analyses, PhiSweepShape) {
    const auto c = tiny(EnvKind::dst, Algorithm::rpb, Mode::stationary, 2, 20);
    const auto sweep = sweep_phi(c, {0.5, 0.05, 0.25});
    ASSERT_EQ(sweep.size(), 3u);
    EXPECT_EQ(sweep[0].phi, 0.05);
    EXPECT_EQ(sweep[2].phi, 0.5);
    for (const auto &p : sweep) EXPECT_EQ(p.losses.size(), 2u * 8u);
    EXPECT_EQ(default_phi_grid().size(), 10u);
    EXPECT_NEAR(default_phi_grid().front(), 0.05, 1e-12);
    EXPECT_NEAR(default_phi_grid().back(), 0.5, 1e-12);
}

TEST(Analyses, VariantSumsOfMedians) {
    auto c = tiny(EnvKind::dst, Algorithm::rpb, Mode::stationary, 2, 21);
    const auto v = compare_variants(c, VariantAxis::distance_function, {"euclidean", "euclidean", "manhattan"});
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[0].run_sums, v[1].run_sums);
    ASSERT_EQ(v[0].run_sums.size(), 2u);

    const auto result = run_experiment(c);
    double expected = 0.0;
    for (std::size_t k = 0; k < 9; ++k) {
        std::vector<double> seg;
        for (const auto &r : result.records)
            if (r.run == 0 && r.preference_index == k) seg.push_back(r.scalarized_return);
        std::sort(seg.begin(), seg.end());
        expected += seg[seg.size() / 2]; // 21 episodes: the middle element
    }
    EXPECT_DOUBLE_EQ(v[0].run_sums[0], expected);

    EXPECT_THROW(compare_variants(c, VariantAxis::robustness_metric, {"regret"}), config_error);
    c.ols.training_episodes_per_preference = 60;
    const auto reference = train_offline(c, CoverageAlgorithm::ols);
    const auto metrics =
        compare_variants(c, VariantAxis::robustness_metric, {"stability", "iod", "cv", "entropy", "regret"}, &reference);
    EXPECT_EQ(metrics.size(), 5u);
}

TEST(Artifacts, FloatFormatAndSummary) {
    EXPECT_EQ(format_float(0.1), "0.1");
    EXPECT_EQ(format_float(-0.0), "0");
    EXPECT_EQ(format_float(1.0 / 3.0), "0.333333333");
    EXPECT_EQ(format_float(123456789012.0), "1.23456789e+11");

    auto c = tiny(EnvKind::dst, Algorithm::rpb, Mode::stationary, 3, 20);
    const auto rpb = compute_metrics(run_experiment(c).records, c.schedule);
    c.algorithm = Algorithm::sql;
    const auto sql = compute_metrics(run_experiment(c).records, c.schedule);
    const auto s = summarize(c, {{Algorithm::rpb, rpb}, {Algorithm::sql, sql}});
    ASSERT_EQ(s.at("algorithms").size(), 2u);
    EXPECT_EQ(s.at("algorithms")[0].at("gamma_c").size(), 9u);
    EXPECT_EQ(s.at("algorithms")[0].at("loss").size(), 8u);
    EXPECT_EQ(s.at("welch").size(), 2u);
    const auto &w = s.at("welch")[0];
    const auto direct = welch_t_test(per_run_gamma_c(rpb), per_run_gamma_c(sql));
    EXPECT_DOUBLE_EQ(w.at("p").get<double>(), direct.p);
}
