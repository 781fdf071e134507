#pragma once

// Orchestration behind the command-line front end: builds the configured
// model, runs one subcommand, and writes its CSV artifacts plus a run
// manifest into the output directory. Artifact bytes are a pure function of
// the configuration; the manifest carries the only line that varies between
// identical runs (timestamp and wall time).

#include <string>
#include <vector>

#include "iukit/config.hpp"

namespace iukit {

inline constexpr const char* kVersion = "1.0.0";

enum class RunStatus {
  ok = 0,
  usage_error = 1,
  numeric_error = 2,
  violation = 3,
};

struct RunResult {
  RunStatus status = RunStatus::ok;
  std::string message;                  // one-line outcome
  std::vector<std::string> artifacts;   // file names written under out_dir
  std::vector<std::string> flags;       // notable conditions, echoed in manifest
};

// name is one of spectrum, heat, bound, verify, example. Numerical failures
// are reported through the status (and still produce a manifest); I/O
// failures propagate as exceptions.
RunResult run_subcommand(const std::string& name, const RunConfig& config,
                         bool quiet = false);

}  // namespace iukit
