#pragma once

#include <string>

#include "dtas/sim.hpp"

namespace dtas {

// Flat key-value experiment files, one section per scenario:
//
//   [stable]
//   runs = 100
//   episodes = 100
//   seed = 7
//
// Keys mirror ScenarioConfig fields; unknown keys are rejected so typos
// surface immediately. Returns the defaults for `scenario` overlaid with the
// matching section.
ScenarioConfig load_config(const std::string& path, const std::string& scenario);

// Apply one key=value override; shared by the file parser and CLI flags.
void apply_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value);

} // namespace dtas
