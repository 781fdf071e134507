#pragma once

// Line-oriented run configuration: `key = value` pairs, `#` comments, and
// bracketed section headers ([grid], [constants], [curvature]). Parsing
// collects every problem instead of stopping at the first one, so a broken
// file reports all of its errors in a single pass. Unknown keys and sections
// are rejected; every field has a documented default and a range check.

#include <cstdint>
#include <string>
#include <vector>

#include "iukit/power_law.hpp"
#include "iukit/rate_function.hpp"

namespace iukit {

enum class ExampleChoice { e1, e2, custom };

struct RunConfig {
  // Model selection. e1 is the pinched sectional-curvature example, e2 the
  // drift example with potential theta * r^delta, custom takes its curvature
  // generator from the [curvature] section.
  ExampleChoice example = ExampleChoice::e1;
  double delta = 3.0;
  double theta = 1.0;
  int dim = 3;
  double m = 1.0;  // Bakry-Emery dimension parameter, e2 only
  int excited = 3;  // excited states exported next to the ground state

  // [grid]
  int n = 1024;
  double r_max = 12.0;
  std::vector<double> ladder{10.0, 15.0, 20.0};  // domain rungs for sharpness

  // Snapshot times and inequality radii.
  std::vector<double> times{0.25, 0.5, 1.0, 2.0};
  std::vector<double> rs{0.02, 0.04, 0.08, 0.16, 0.32, 0.64, 1.28, 2.56};

  std::uint64_t seed = 42;
  int count = 200;  // test functions per family

  // [constants]
  BoundConstants constants;
  double stabilize_ratio = 1.05;
  double growth_ratio = 1.5;
  double theta_prime = 0.0;  // 0 fits theta' from an independent family

  // [curvature], read for example = custom: radial generator k(r).
  PowerLawProfile curvature{1.0, 0.0, 0.5, 0.0};

  std::string out_dir = ".";
};

struct ConfigError {
  int line = 0;  // 1-based line of the offending key; 0 when not line-tied
  std::string message;
};

struct ParsedConfig {
  RunConfig config;
  std::vector<ConfigError> errors;

  bool ok() const { return errors.empty(); }
};

ParsedConfig parse_config(const std::string& text);

// Every resolved field in the file format itself, deterministic order, so a
// manifest echo can be re-parsed into the identical configuration.
std::string echo_config(const RunConfig& config);

}  // namespace iukit
