#pragma once

#include <stdexcept>
#include <string>

#include "crowdsim/simulate.hpp"

namespace crowdsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A full experiment description as read from a JSON config file. `output` is
// the CSV destination ("-" means stdout).
struct RunConfig {
  Scenario scenario;
  std::string output = "-";

  bool operator==(const RunConfig&) const = default;
};

// Strict parser: unknown keys anywhere are rejected; every diagnostic names
// the offending key path. Defaults: trials 2000, objective P3, chernoff
// corrected, x 0, beta 10, seed 12345 (CROWDSIM_SEED overrides the default;
// an explicit "seed" key beats both). Throws ConfigError.
RunConfig parse_config(const std::string& json_text);

// Canonical JSON serialization; parse_config(render_config(c)) == c.
std::string render_config(const RunConfig& c);

}  // namespace crowdsim
