#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rr/app/config.hpp"

namespace rr::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInvalidInput = 2;

const std::vector<std::string>& command_names();

struct RunOutcome {
  int exit_code = kExitOk;
  std::string error;  // empty unless the run raised
  std::vector<std::filesystem::path> files;
};

/// Runs one command and writes its reports into `out` (created if missing).
///
/// InvalidInput maps to exit 2, failed tolerance checks and ComputationError to exit 1.
/// summary.json is written in every case where `out` is writable.
RunOutcome run(const std::string& command, const RunConfig& cfg, const std::filesystem::path& out);

}  // namespace rr::app
