#pragma once

// JSON experiment configuration. Every key mirrors an ExperimentConfig
// field (or a CLI flag); unknown keys are rejected.

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "morl/harness.hpp"

namespace morl {

struct RunSettings {
    ExperimentConfig experiment;
    std::optional<std::filesystem::path> coverage_set;
    std::optional<std::filesystem::path> out;
};

/// Applies the keys present in `j` on top of `base`.
RunSettings apply_config_json(RunSettings base, const nlohmann::json &j, const std::filesystem::path &relative_to = {});

/// Defaults for the environment named in `j` (dst when absent), then `j`.
RunSettings settings_from_json(const nlohmann::json &j, const std::filesystem::path &relative_to = {});
RunSettings load_settings(const std::filesystem::path &path);

nlohmann::json settings_to_json(const RunSettings &s);

} // namespace morl
