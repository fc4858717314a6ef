#include "morl/rpb.hpp"

#include <cmath>
#include <string>

namespace morl {

std::string_view to_string(BootstrapScope s) { return s == BootstrapScope::nearest ? "nearest" : "region"; }

BootstrapScope parse_bootstrap_scope(std::string_view s) {
    if (s == "nearest") return BootstrapScope::nearest;
    if (s == "region") return BootstrapScope::region;
    throw config_error("unknown bootstrap scope '" + std::string(s) + "'");
}

CcsStore::CcsStore(double phi, DistanceKind distance) : phi_(phi), distance_(distance) {
    require(phi > 0.0 && std::isfinite(phi), "phi must be positive");
}

std::optional<std::size_t> CcsStore::find_steppingstone_for(const Preference &w) const {
    std::optional<std::size_t> best;
    double best_d = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const double d = distance(entries_[i].preference, w);
        if (d <= phi_ && (!best || d < best_d)) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

StoreOutcome CcsStore::store_or_replace(SteppingstoneEntry candidate, const Preference &previous_w) {
    require(candidate.preference == previous_w, "candidate must carry the previous preference");
    require(std::isfinite(candidate.robustness), "candidate robustness is not finite");
    const auto match = find_steppingstone_for(previous_w);
    if (!match) {
        entries_.push_back(std::move(candidate));
        return StoreOutcome::appended;
    }
    if (candidate.robustness > entries_[*match].robustness) {
        entries_[*match] = std::move(candidate);
        return StoreOutcome::replaced;
    }
    return StoreOutcome::unchanged;
}

std::size_t CcsStore::retrieve_nearest(const Preference &w) const {
    if (entries_.empty()) throw no_steppingstone("steppingstone store is empty");
    std::size_t best = 0;
    double best_d = distance(entries_[0].preference, w);
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        const double d = distance(entries_[i].preference, w);
        if (d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

void RpbParams::validate() const {
    require(phi > 0.0 && std::isfinite(phi), "phi must be positive");
    require(history_window >= 2, "history window must be at least 2");
}

RpbAgent::RpbAgent(std::size_t num_states, std::size_t num_actions, Preference initial, RpbParams params,
                   ReferenceMean reference_mean)
    : params_(params), reference_mean_(std::move(reference_mean)), policy_(init_policy(num_states, num_actions)),
      preference_(std::move(initial)), history_(params.history_window), ccs_(params.phi, params.distance) {
    params_.validate();
    require(params_.robustness != RobustnessKind::regret || static_cast<bool>(reference_mean_),
            "regret robustness needs a reference mean source");
}

PreferenceChange RpbAgent::on_preference_change(const Preference &w_new) {
    PreferenceChange change;
    change.distance = ccs_.distance(w_new, preference_);
    change.significant = change.distance > params_.phi;
    if (!change.significant) {
        preference_ = w_new;
        return change;
    }

    // Policies measured on fewer than two episodes are not stored.
    if (history_.size() >= 2) {
        std::optional<double> ref;
        if (params_.robustness == RobustnessKind::regret) ref = reference_mean_(preference_);
        const double beta = robustness(history_, params_.robustness, ref);
        change.stored = ccs_.store_or_replace({policy_, preference_, beta}, preference_);
    }

    std::optional<std::size_t> source;
    if (params_.scope == BootstrapScope::region)
        source = ccs_.find_steppingstone_for(w_new);
    else if (!ccs_.empty())
        source = ccs_.retrieve_nearest(w_new);

    const std::size_t ns = policy_.num_states(), na = policy_.num_actions();
    policy_ = source ? init_policy(ns, na, ccs_.entries()[*source].policy) : init_policy(ns, na);
    change.bootstrap_source = source;
    history_.clear();
    preference_ = w_new;
    return change;
}

} // namespace morl
