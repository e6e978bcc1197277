#pragma once

#include <string>

#include "dobkit/scenario.hpp"

namespace dobkit {

/// Parses and fully validates a scenario document. Schema violations throw
/// ConfigError carrying the JSON-pointer path of the offending field.
Scenario load_scenario_json(const std::string& text);
Scenario load_scenario_file(const std::string& path);

}  // namespace dobkit
