#pragma once

#include "config.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace platewave::cli {

inline constexpr const char* kVersion = "0.1.0";

const std::vector<std::string>& subcommands();

struct RunOptions {
  bool strict = false;
  bool dump_matrices = false;
  std::optional<std::filesystem::path> output_dir;
};

struct RunOutcome {
  nlohmann::json report;
  bool any_fail = false;
  std::vector<std::string> files;  // written outputs, relative to the output directory
  int exit_code = 0;
};

/// Runs one subcommand, writing <subcommand>.json, its CSV outputs and
/// manifest.json into the output directory. exit_code is 1 when strict is set
/// and any verdict is FAIL.
RunOutcome run(const std::string& subcommand, const RunConfig& cfg, const RunOptions& options);

}  // namespace platewave::cli
