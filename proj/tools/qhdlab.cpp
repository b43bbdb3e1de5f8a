// qhdlab: experiment runner for the quantum-hydrodynamics engines.
//
//   qhdlab run <config.ini>
//   qhdlab check
//   qhdlab convert <snapshot.qhd1> --to csv [-o out.csv | -o -]

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qhd/lab/runner.hpp"
#include "qhd/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Quantum hydrodynamics lab"};
  app.set_version_flag("--version", std::string(qhd::lab::version()));
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);

  auto* check = app.add_subcommand("check", "Run the built-in verification battery");

  std::string snapshot;
  std::string target = "csv";
  std::string output;
  auto* convert = app.add_subcommand("convert", "Convert a QHD1 snapshot");
  convert->add_option("snapshot", snapshot, "Snapshot file")->required()->check(CLI::ExistingFile);
  convert->add_option("--to", target, "Target format")->check(CLI::IsMember({"csv"}));
  convert->add_option("-o,--output", output, "Output path, '-' for standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qhd::lab::kExitValidation;
  }

  // QHD_THREADS is read at startup; 0 means all hardware threads.
  if (const char* env = std::getenv("QHD_THREADS")) {
    try {
      qhd::set_thread_count(std::stoul(env));
    } catch (const std::exception&) {
      qhd::lab::print_error(std::cerr, "ValidationError", "QHD_THREADS must be a non-negative integer");
      return qhd::lab::kExitValidation;
    }
  }

  if (*run) return qhd::lab::run_command(config, std::cout, std::cerr);
  if (*check) return qhd::lab::check_command(std::cout, std::cerr);
  if (*convert) {
    std::optional<std::filesystem::path> out;
    if (!output.empty()) out = output;
    return qhd::lab::convert_command(snapshot, target, out, std::cout, std::cerr);
  }
  return qhd::lab::kExitValidation;
}
