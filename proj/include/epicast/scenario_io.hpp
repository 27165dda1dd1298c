#pragma once

#include <string>

#include "epicast/scenario.hpp"

namespace epicast {

// JSON config, units in key names; "inf" is accepted for contact rates.
// See README for the schema.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& json_text);
std::string scenario_to_json(const ScenarioConfig& cfg);

// Sets one numeric field addressed as e.g. "types[0].active_period_s" or
// "contact_rates_hz[0][1]". Throws std::invalid_argument listing valid paths
// when the address is unknown.
void set_config_field(std::string& json_text, const std::string& path, double value);

} // namespace epicast
