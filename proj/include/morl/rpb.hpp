#pragma once

// Robust policy bootstrapping: a store of steppingstone policies, one per
// preference region, used to seed learning after significant preference
// changes.

#include <functional>
#include <optional>
#include <vector>

#include "morl/core.hpp"
#include "morl/learner.hpp"

namespace morl {

struct SteppingstoneEntry {
    TabularPolicy policy;
    Preference preference;
    double robustness;
};

enum class StoreOutcome { appended, replaced, unchanged };

/// Which stored policy seeds learning after a significant change.
///  nearest: argmin distance over the whole store (default).
///  region:  only an entry within phi of the new preference; otherwise start fresh.
enum class BootstrapScope { nearest, region };

std::string_view to_string(BootstrapScope s);
BootstrapScope parse_bootstrap_scope(std::string_view s);

class CcsStore {
public:
    CcsStore(double phi, DistanceKind distance);

    double phi() const { return phi_; }
    DistanceKind distance_kind() const { return distance_; }
    const std::vector<SteppingstoneEntry> &entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Closest entry within phi of w (earliest on ties), if any.
    std::optional<std::size_t> find_steppingstone_for(const Preference &w) const;

    /// Appends when no entry lies within phi of previous_w, otherwise
    /// replaces the matched entry iff the candidate is strictly more robust.
    StoreOutcome store_or_replace(SteppingstoneEntry candidate, const Preference &previous_w);

    /// Closest entry overall (earliest on ties). Throws no_steppingstone when empty.
    std::size_t retrieve_nearest(const Preference &w) const;

    double distance(const Preference &a, const Preference &b) const { return preference_distance(a, b, distance_); }

private:
    double phi_;
    DistanceKind distance_;
    std::vector<SteppingstoneEntry> entries_;
};

struct RpbParams {
    double phi = 0.15;
    DistanceKind distance = DistanceKind::euclidean;
    RobustnessKind robustness = RobustnessKind::stability;
    std::size_t history_window = default_history_window;
    BootstrapScope scope = BootstrapScope::nearest;

    void validate() const;
};

/// Per-preference optimum mean return, needed only by the regret metric.
using ReferenceMean = std::function<double(const Preference &)>;

struct PreferenceChange {
    double distance = 0.0;
    bool significant = false;
    std::optional<StoreOutcome> stored;          // empty when not significant or the candidate was skipped
    std::optional<std::size_t> bootstrap_source; // CCS index the new policy was copied from
};

class RpbAgent {
public:
    RpbAgent(std::size_t num_states, std::size_t num_actions, Preference initial, RpbParams params,
             ReferenceMean reference_mean = {});

    const TabularPolicy &policy() const { return policy_; }
    TabularPolicy &policy() { return policy_; }
    const Preference &preference() const { return preference_; }
    const RewardHistory &history() const { return history_; }
    const CcsStore &ccs() const { return ccs_; }
    const RpbParams &params() const { return params_; }

    void record_return(double scalarized_return) { history_.push(scalarized_return); }

    PreferenceChange on_preference_change(const Preference &w_new);

private:
    RpbParams params_;
    ReferenceMean reference_mean_;
    TabularPolicy policy_;
    Preference preference_;
    RewardHistory history_;
    CcsStore ccs_;
};

} // namespace morl
