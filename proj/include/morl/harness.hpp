#pragma once

// Experiment protocols: stationary and non-stationary execution of a
// preference schedule, evaluation metrics, and the design-choice analyses.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "morl/baselines.hpp"
#include "morl/envs.hpp"
#include "morl/learner.hpp"
#include "morl/rpb.hpp"
#include "morl/serialization.hpp"
#include "morl/stats.hpp"

namespace morl {

inline constexpr std::size_t metric_window = 50;

enum class Algorithm { rpb, sql, ols, tlo };
enum class Mode { stationary, nonstationary };

std::string_view to_string(Algorithm a);
std::string_view to_string(Mode m);
Algorithm parse_algorithm(std::string_view s);
Mode parse_mode(std::string_view s);

struct PreferenceSchedule {
    std::vector<Preference> preferences;
    std::size_t episodes_per_preference = 200;

    void validate() const;
    std::size_t total_episodes() const { return preferences.size() * episodes_per_preference; }
};

/// The nine uniformly sampled two-objective preferences, in listed order.
std::vector<Preference> default_preferences();
PreferenceSchedule default_schedule(std::size_t episodes_per_preference);

/// Best phi per environment (SAR 0.25, DST/RG 0.15).
double default_phi(EnvKind kind);

struct ExperimentConfig {
    EnvConfig env;
    Algorithm algorithm = Algorithm::rpb;
    Mode mode = Mode::stationary;
    std::size_t runs = 15;
    PreferenceSchedule schedule;
    std::size_t perturb_period = 100;
    double perturb_fraction = 0.25;
    std::uint64_t master_seed = 0;
    bool randomize_layout = true;
    std::size_t jobs = 1;

    LearnerParams learner;
    RpbParams rpb;
    OlsParams ols;
    TloParams tlo;

    void validate() const;
};

/// Desk-scale defaults for an environment (15 runs, 200 episodes per
/// preference, the nine default preferences, per-environment phi and TLO thresholds).
ExperimentConfig desk_config(EnvKind kind, Algorithm algorithm, Mode mode);

struct ExperimentRecord {
    std::size_t run = 0;
    std::size_t preference_index = 0;
    std::size_t episode = 0;
    double scalarized_return = 0.0;
    RewardVector reward_components;
    std::size_t ccs_size = 0;
};

struct RunAudit {
    std::size_t run = 0;
    std::uint64_t initial_layout_hash = 0;
    std::vector<std::size_t> perturb_episodes;   // global episode indices
    std::vector<std::uint64_t> episode_layout;   // layout hash in force for each episode
};

struct ExperimentResult {
    std::vector<ExperimentRecord> records; // ordered by run, preference, episode
    std::vector<RunAudit> audits;
    std::vector<std::optional<CcsStore>> final_ccs; // RPB only
};

/// Per-run seed for an independent random stream.
std::uint64_t derive_seed(std::uint64_t master_seed, std::size_t run, std::uint64_t stream,
                          std::uint64_t index = 0);

/// The layout a run starts from (randomized from the run seed when enabled).
EnvConfig initial_layout(const ExperimentConfig &config, std::size_t run);

/// Offline phase for OLS/TLO: one frozen coverage set per run, trained on
/// the run's initial layout.
CoverageBundle train_offline(const ExperimentConfig &config, CoverageAlgorithm algorithm);

/// Executes every run of the schedule. `frozen` is the execution set for
/// OLS/TLO and the optimum reference for RPB with the regret metric.
ExperimentResult run_experiment(const ExperimentConfig &config, const CoverageBundle *frozen = nullptr);

struct MetricSummary {
    std::size_t run = 0;
    std::size_t preference_index = 0;
    double gamma_c = 0.0;
    std::optional<double> loss; // absent for the final preference
    bool flagged = false;       // a window fell back to a shorter segment
};

std::vector<MetricSummary> compute_metrics(const std::vector<ExperimentRecord> &records,
                                           const PreferenceSchedule &schedule);

/// Per-run mean of Gamma_c over the schedule.
std::vector<double> per_run_gamma_c(const std::vector<MetricSummary> &metrics);
/// Per-run mean loss over all transitions.
std::vector<double> per_run_loss(const std::vector<MetricSummary> &metrics);
std::vector<double> all_losses(const std::vector<MetricSummary> &metrics);

struct PhiSweepPoint {
    double phi;
    std::vector<double> losses; // runs x (preferences - 1)
};

std::vector<PhiSweepPoint> sweep_phi(const ExperimentConfig &base, std::vector<double> phi_values);
std::vector<double> default_phi_grid();

enum class VariantAxis { robustness_metric, distance_function };

struct VariantSummary {
    std::string name;
    std::vector<double> run_sums; // sum over preferences of the per-segment median return
    double mean = 0.0;
    double stddev = 0.0;
};

/// `reference` supplies the OLS optimum for the regret variant.
std::vector<VariantSummary> compare_variants(const ExperimentConfig &base, VariantAxis axis,
                                             const std::vector<std::string> &variants,
                                             const CoverageBundle *reference = nullptr);

// ---- artifacts

std::string format_float(double v);
void write_results_csv(std::ostream &out, const ExperimentConfig &config, const ExperimentResult &result,
                       bool header = true);

struct AlgorithmRun {
    Algorithm algorithm;
    std::vector<MetricSummary> metrics;
};

nlohmann::json summarize(const ExperimentConfig &config, const std::vector<AlgorithmRun> &runs);

} // namespace morl
