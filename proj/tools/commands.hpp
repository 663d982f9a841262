#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cuspkit {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfigError = 2,
  kNumericalFailure = 3,
};

struct Outcome {
  int exit_code = kOk;
  std::string message;
  /// Files written, relative to the output directory, in write order.
  std::vector<std::string> files;
};

const std::vector<std::string>& command_names();

/// Runs one subcommand on a config file, writing into out_dir (created if
/// needed). Never throws; errors are mapped onto exit codes.
Outcome run_command(const std::string& command, const std::filesystem::path& config,
                    const std::filesystem::path& out_dir);

/// --out, else $CUSPKIT_OUTPUT_DIR, else ./cuspkit-out.
std::filesystem::path output_directory(const std::string& out_flag);

/// Full command line entry point.
int run_cli(int argc, char** argv);

}  // namespace cuspkit
