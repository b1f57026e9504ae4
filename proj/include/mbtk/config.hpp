#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mbtk/report.hpp"

namespace mbtk {

// Exit codes shared by the library runner and the binary.
enum ExitCode {
  kOk = 0,
  kValidation = 2,
  kMissingData = 3,
  kCapExceeded = 4,
  kOracleFailure = 5,
};

struct RunConfig {
  std::string command;
  std::string group = "C2";
  std::string weight = "index";

  BaseFieldProfile base;
  LocalConditions sigma;
  std::vector<std::string> wild_table_files;

  // place selection for model commands: all finite places of norm <= bound
  // with a ramified option, plus the real place; or an explicit list
  std::optional<long> places_norm_le;
  std::vector<long> places_list;

  long x = 1000;
  std::vector<long> x_schedule;
  std::vector<long> checkpoints;
  long p_max = 1000000;

  long samples = 1000;
  uint64_t seed = 0;
  bool seed_set = false;
  std::string mode = "no-torsion";
  std::string engine = "auto";
  std::string normalize_by = "partial-sum";

  long frame_cap = 1000000;
  long enumeration_cap = 10000;
  WalkParams walk;
  int parallelism = 0;

  std::vector<int> target_rows;
  long target_places = -1;
  long designated_places = 1;

  std::string out_json;
  std::string out_csv;
};

RunConfig parse_config(const Json& j);
Json config_echo(const RunConfig& cfg);

struct RunResult {
  int exit_code = kOk;
  Json report;
  std::string csv;
  std::string error;
};

RunResult run_command(const RunConfig& cfg);

}  // namespace mbtk
