#pragma once

#include <string>
#include <string_view>

#include "liemix/harness.hpp"

namespace liemix {

/**
 * JSON experiment configuration with sections "scenario", "phd" and "ospa"
 * whose keys are the field names of ScenarioConfig, FilterSettings and
 * OspaConfig. Missing keys keep their defaults; unknown keys are rejected
 * with ParseError. See README for the full schema.
 */
ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Every field, including defaults, as JSON accepted by parse_experiment_config.
std::string dump_experiment_config(const ExperimentConfig& cfg);

}  // namespace liemix
