#pragma once

// JSON shapes for steppingstone snapshots and frozen coverage sets.

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "morl/baselines.hpp"
#include "morl/rpb.hpp"

namespace morl {

nlohmann::json policy_to_json(const TabularPolicy &p);
TabularPolicy policy_from_json(const nlohmann::json &j);

nlohmann::json ccs_to_json(const CcsStore &ccs);

nlohmann::json coverage_set_to_json(const CoverageSet &cs);
CoverageSet coverage_set_from_json(const nlohmann::json &j);

/// Coverage sets trained offline, one per experiment run, each on that
/// run's initial layout.
struct CoverageBundle {
    struct RunSet {
        std::size_t run = 0;
        std::uint64_t layout_hash = 0;
        CoverageSet set;
    };

    CoverageAlgorithm algorithm = CoverageAlgorithm::ols;
    EnvKind env = EnvKind::dst;
    std::vector<RunSet> runs;

    const CoverageSet &for_run(std::size_t run, std::uint64_t layout_hash) const;
};

nlohmann::json bundle_to_json(const CoverageBundle &b);
CoverageBundle bundle_from_json(const nlohmann::json &j);
void save_bundle(const CoverageBundle &b, const std::filesystem::path &path);
CoverageBundle load_bundle(const std::filesystem::path &path);

} // namespace morl
