#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "jacobi/config.hpp"
#include "jacobi/dynamics.hpp"

namespace jacobi {

/// Command-line adjustments that take precedence over the file.
struct RunOverrides {
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool allow_constant_gauge = false;
  std::string csv_path;  // flow only; empty writes no file
};

struct RunResult {
  nlohmann::ordered_json report;
  bool pass = false;
};

/// Executes one of: verify, gauge, compat, iso, flow, recurse.  Library
/// errors are embedded in the report under "error" with pass=false instead
/// of escaping, so a caller always gets a well-formed document.  Apart from
/// the timestamp field the document is a deterministic function of the
/// config file and the overrides.
RunResult run_command(const std::string& command, const RunConfig& config,
                      const RunOverrides& overrides = {});

/// Header row "t,<coordinates>", one %.17g row per sample.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

/// 2-space indented dump with a trailing newline.
std::string json_text(const nlohmann::ordered_json& j);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace jacobi
