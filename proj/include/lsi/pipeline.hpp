#pragma once

#include <string>
#include <string_view>

#include "lsi/config.hpp"
#include "lsi/report.hpp"

namespace lsi {

enum class Command { certify, flow, converse, harnack, spectrum, oracle, corpus };

Command parse_command(std::string_view name);
std::string_view command_name(Command command);

enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,
  exit_config_error = 2,
  exit_numerical_error = 3,
};

struct RunResult {
  int exit_code = exit_ok;
  Json report;
};

/// Runs one command and writes report.json (plus traces.csv / spectrum.csv
/// where relevant) into config.output_dir. Errors are mapped to exit codes and
/// recorded in the report instead of propagating.
RunResult run(Command command, const RunConfig& config);

}  // namespace lsi
