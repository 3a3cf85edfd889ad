#pragma once

#include <filesystem>
#include <functional>

#include <json.hpp>

#include "tabrecon/pipeline.hpp"

namespace tabrecon {

/// Reads a config document with optional sections "pipeline", "thresholds",
/// "generator", "critic" and "checker". A missing "critic" section copies the
/// generator settings. Unknown keys and wrong types raise InvalidConfig.
PipelineConfig pipeline_config_from_json(const nlohmann::json& doc);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

using EnvLookup = std::function<const char*(const char*)>;

/// TEN_ENDPOINT and TEN_MODEL override both backends.
void apply_env_overrides(PipelineConfig& cfg, const EnvLookup& env);

nlohmann::json to_json(const PipelineConfig& cfg);

}  // namespace tabrecon
