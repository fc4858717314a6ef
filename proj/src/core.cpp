#include "morl/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace morl {

Preference::Preference(std::vector<double> weights) : weights_(std::move(weights)) {
    require(weights_.size() >= 2, "preference needs at least two objectives");
    double sum = 0.0;
    for (double w : weights_) {
        require(std::isfinite(w) && w >= 0.0 && w <= 1.0, "preference weight outside [0,1]");
        sum += w;
    }
    require(std::abs(sum - 1.0) <= preference_sum_tolerance, "preference weights must sum to 1");
}

RewardVector::RewardVector(std::vector<double> components) : components_(std::move(components)) {
    for (double c : components_)
        require(std::isfinite(c), "reward component is not finite");
}

RewardVector &RewardVector::operator+=(const RewardVector &rhs) {
    require(rhs.size() == size(), "reward vector dimension mismatch");
    for (std::size_t m = 0; m < size(); ++m) components_[m] += rhs.components_[m];
    return *this;
}

RewardVector &RewardVector::operator*=(double s) {
    for (double &c : components_) c *= s;
    return *this;
}

RewardHistory::RewardHistory(std::size_t window) : window_(window) {
    require(window_ >= 2, "reward history window must be at least 2");
}

void RewardHistory::push(double scalarized_return) {
    if (returns_.size() == window_) returns_.pop_front();
    returns_.push_back(scalarized_return);
}

std::string_view to_string(DistanceKind k) {
    switch (k) {
    case DistanceKind::euclidean: return "euclidean";
    case DistanceKind::hamming: return "hamming";
    case DistanceKind::cosine: return "cosine";
    case DistanceKind::manhattan: return "manhattan";
    }
    return "?";
}

std::string_view to_string(RobustnessKind k) {
    switch (k) {
    case RobustnessKind::stability: return "stability";
    case RobustnessKind::index_of_dispersion: return "iod";
    case RobustnessKind::coefficient_of_variation: return "cv";
    case RobustnessKind::entropy: return "entropy";
    case RobustnessKind::regret: return "regret";
    }
    return "?";
}

DistanceKind parse_distance_kind(std::string_view s) {
    for (auto k : {DistanceKind::euclidean, DistanceKind::hamming, DistanceKind::cosine, DistanceKind::manhattan})
        if (to_string(k) == s) return k;
    throw config_error("unknown distance kind '" + std::string(s) + "'");
}

RobustnessKind parse_robustness_kind(std::string_view s) {
    for (auto k : {RobustnessKind::stability, RobustnessKind::index_of_dispersion,
                   RobustnessKind::coefficient_of_variation, RobustnessKind::entropy, RobustnessKind::regret})
        if (to_string(k) == s) return k;
    throw config_error("unknown robustness kind '" + std::string(s) + "'");
}

double scalarize(const RewardVector &r, const Preference &w) {
    require(r.size() == w.size(), "scalarize: dimension mismatch");
    double rho = 0.0;
    for (std::size_t m = 0; m < r.size(); ++m) rho += w[m] * r[m];
    return rho;
}

bool dominates(const RewardVector &a, const RewardVector &b) {
    require(a.size() == b.size(), "dominates: dimension mismatch");
    bool strictly = false;
    for (std::size_t m = 0; m < a.size(); ++m) {
        if (a[m] < b[m]) return false;
        if (a[m] > b[m]) strictly = true;
    }
    return strictly;
}

double preference_distance(const Preference &w1, const Preference &w2, DistanceKind kind) {
    require(w1.size() == w2.size(), "preference_distance: dimension mismatch");
    const std::size_t m_count = w1.size();
    switch (kind) {
    case DistanceKind::euclidean: {
        double acc = 0.0;
        for (std::size_t m = 0; m < m_count; ++m) acc += (w1[m] - w2[m]) * (w1[m] - w2[m]);
        return std::sqrt(acc);
    }
    case DistanceKind::hamming: {
        // exact inequality on real weights
        double count = 0.0;
        for (std::size_t m = 0; m < m_count; ++m)
            if (w1[m] != w2[m]) count += 1.0;
        return count;
    }
    case DistanceKind::cosine: {
        double dot = 0.0, n1 = 0.0, n2 = 0.0;
        for (std::size_t m = 0; m < m_count; ++m) {
            dot += w1[m] * w2[m];
            n1 += w1[m] * w1[m];
            n2 += w2[m] * w2[m];
        }
        require(n1 > 0.0 && n2 > 0.0, "cosine distance of a zero vector");
        const double sim = dot / std::sqrt(n1 * n2);
        return std::max(0.0, 1.0 - sim);
    }
    case DistanceKind::manhattan: {
        double acc = 0.0;
        for (std::size_t m = 0; m < m_count; ++m) acc += std::abs(w1[m] - w2[m]);
        return acc;
    }
    }
    throw contract_error("unknown distance kind");
}

double mean(std::span<const double> xs) {
    require(!xs.empty(), "mean of an empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double population_stddev(std::span<const double> xs) {
    const double mu = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

double sample_stddev(std::span<const double> xs) {
    require(xs.size() >= 2, "sample standard deviation needs two values");
    const double mu = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

double median(std::vector<double> xs) {
    require(!xs.empty(), "median of an empty sample");
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

namespace {

// Shannon entropy (bits) of a 10-bin equal-width histogram over [min, max].
double histogram_entropy(std::span<const double> xs) {
    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi <= lo) return 0.0;
    std::array<std::size_t, entropy_bins> counts{};
    for (double x : xs) {
        auto bin = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(entropy_bins));
        counts[std::min(bin, entropy_bins - 1)]++;
    }
    double h = 0.0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

} // namespace

double robustness(std::span<const double> samples, RobustnessKind kind, std::optional<double> reference_mean) {
    require((kind == RobustnessKind::regret) == reference_mean.has_value(),
            "reference mean must be supplied exactly for the regret metric");
    const std::size_t needed = kind == RobustnessKind::entropy ? 1 : 2;
    if (samples.size() < needed)
        throw insufficient_samples("robustness needs at least " + std::to_string(needed) + " samples");

    const double mu = mean(samples);
    switch (kind) {
    case RobustnessKind::stability: {
        const double beta = mu / (population_stddev(samples) + robustness_epsilon);
        return std::clamp(beta, -stability_cap, stability_cap);
    }
    case RobustnessKind::index_of_dispersion: {
        const double sigma = population_stddev(samples);
        return -(sigma * sigma) / (std::abs(mu) + robustness_epsilon);
    }
    case RobustnessKind::coefficient_of_variation:
        return -population_stddev(samples) / (std::abs(mu) + robustness_epsilon);
    case RobustnessKind::entropy:
        return -histogram_entropy(samples);
    case RobustnessKind::regret:
        return -(*reference_mean - mu);
    }
    throw contract_error("unknown robustness kind");
}

double robustness(const RewardHistory &history, RobustnessKind kind, std::optional<double> reference_mean) {
    const std::vector<double> xs(history.returns().begin(), history.returns().end());
    return robustness(std::span<const double>(xs), kind, reference_mean);
}

std::size_t region_count(double phi) {
    require(phi > 0.0 && phi <= 1.0, "phi must lie in (0, 1]");
    return static_cast<std::size_t>(std::ceil(1.0 / phi - 1e-9));
}

std::size_t region_index(const Preference &w, double phi) {
    require(w.size() == 2, "region_index is defined for two objectives");
    const std::size_t g = region_count(phi);
    const auto idx = static_cast<std::size_t>(std::floor(w[0] / phi + 1e-12));
    return std::min(idx, g - 1);
}

} // namespace morl
