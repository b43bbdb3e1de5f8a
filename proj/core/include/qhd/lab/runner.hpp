#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qhd/error.hpp"
#include "qhd/lab/config.hpp"
#include "qhd/schrodinger.hpp"

namespace qhd::lab {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitValidation = 2, kExitNumerical = 3 };

const char* version();

struct RunOutcome {
  RunStatus status = RunStatus::completed;
  std::string detail;
  std::vector<std::filesystem::path> outputs;
  std::vector<std::string> summary;  ///< key=value lines for standard output
  int check_exit = kExitOk;
};

/// Builds every input first (grid, potential, initial state), then creates
/// the output directory and runs the engine. Throws qhd::Error.
RunOutcome execute(const ExperimentConfig& config);

int exit_code_for(ErrorKind kind);

/// `qhdlab: error kind=<Kind> message="<text>"`
void print_error(std::ostream& err, std::string_view kind, std::string_view message);

int run_command(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int check_command(std::ostream& out, std::ostream& err);
/// QHD1 -> CSV with coordinates and values; writes next to the input unless
/// `output` is given ("-" for standard output).
int convert_command(const std::filesystem::path& snapshot, const std::string& to,
                    const std::optional<std::filesystem::path>& output, std::ostream& out,
                    std::ostream& err);

}  // namespace qhd::lab
