#pragma once

// Flat key = value scenario files.
//
//   distance_D = 2000
//   reference_snr_gamma0_db = 80
//   avg_power_source_dbm = 10
//   start_point = 1000, 500
//
// '#' starts a comment. Keys ending in _db / _dbm are converted to linear
// ratios / watts on the way in.

#include <istream>
#include <map>
#include <string>

#include "mobrelay/scenario.hpp"

namespace mobrelay {

ScenarioConfig parse_config(std::istream& in, const std::string& origin = "<stream>");
ScenarioConfig load_config(const std::string& path);

// Applies one key/value pair to cfg. Unknown keys throw ConfigError.
void apply_config_entry(ScenarioConfig& cfg, const std::string& key, const std::string& value);

std::string format_config(const ScenarioConfig& cfg);

}  // namespace mobrelay
