#pragma once

// Preference-space geometry, linear scalarization, Pareto dominance,
// preference distances and policy robustness metrics.

#include <cstddef>
#include <deque>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "morl/errors.hpp"

namespace morl {

inline constexpr double preference_sum_tolerance = 1e-9;
inline constexpr double robustness_epsilon = 1e-9;
inline constexpr double stability_cap = 1e12;
inline constexpr std::size_t entropy_bins = 10;
inline constexpr std::size_t default_history_window = 50;

/// Normalized weight vector over M >= 2 objectives.
class Preference {
public:
    explicit Preference(std::vector<double> weights);
    Preference(std::initializer_list<double> weights)
        : Preference(std::vector<double>(weights)) {}

    std::span<const double> weights() const { return weights_; }
    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t m) const { return weights_[m]; }

    friend bool operator==(const Preference &, const Preference &) = default;

private:
    std::vector<double> weights_;
};

/// Per-step (or per-episode summed) vector of objective rewards.
class RewardVector {
public:
    RewardVector() = default;
    explicit RewardVector(std::size_t m) : components_(m, 0.0) {}
    explicit RewardVector(std::vector<double> components);
    RewardVector(std::initializer_list<double> components)
        : RewardVector(std::vector<double>(components)) {}

    std::span<const double> components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    double operator[](std::size_t m) const { return components_[m]; }
    double &operator[](std::size_t m) { return components_[m]; }

    RewardVector &operator+=(const RewardVector &rhs);
    RewardVector &operator*=(double s);

    friend RewardVector operator+(RewardVector lhs, const RewardVector &rhs) { return lhs += rhs; }
    friend RewardVector operator*(double s, RewardVector r) { return r *= s; }
    friend bool operator==(const RewardVector &, const RewardVector &) = default;

private:
    std::vector<double> components_;
};

/// Sliding window of per-episode scalarized returns; oldest evicted first.
class RewardHistory {
public:
    explicit RewardHistory(std::size_t window = default_history_window);

    void push(double scalarized_return);
    void clear() { returns_.clear(); }

    std::size_t window() const { return window_; }
    std::size_t size() const { return returns_.size(); }
    bool empty() const { return returns_.empty(); }
    const std::deque<double> &returns() const { return returns_; }

private:
    std::size_t window_;
    std::deque<double> returns_;
};

enum class DistanceKind { euclidean, hamming, cosine, manhattan };
enum class RobustnessKind { stability, index_of_dispersion, coefficient_of_variation, entropy, regret };

std::string_view to_string(DistanceKind k);
std::string_view to_string(RobustnessKind k);
DistanceKind parse_distance_kind(std::string_view s);
RobustnessKind parse_robustness_kind(std::string_view s);

/// Linear scalarization w . r.
double scalarize(const RewardVector &r, const Preference &w);

/// Pareto dominance: a >= b componentwise, strictly better somewhere.
bool dominates(const RewardVector &a, const RewardVector &b);

/// Distance between preferences; smaller is closer for every kind
/// (cosine is reported as 1 - similarity).
double preference_distance(const Preference &w1, const Preference &w2, DistanceKind kind);

/// Robustness score beta of a return history. Oriented so that larger
/// means more robust. `reference_mean` must be given iff kind is regret.
double robustness(const RewardHistory &history, RobustnessKind kind,
                  std::optional<double> reference_mean = std::nullopt);
double robustness(std::span<const double> samples, RobustnessKind kind,
                  std::optional<double> reference_mean = std::nullopt);

/// Index of the preference-space cell containing w for a two-objective
/// split of width phi. Diagnostic only.
std::size_t region_index(const Preference &w, double phi);
std::size_t region_count(double phi);

// Sample moments shared by the robustness metrics and the harness.
double mean(std::span<const double> xs);
double population_stddev(std::span<const double> xs);
double sample_stddev(std::span<const double> xs);
double median(std::vector<double> xs);

} // namespace morl
