#include "commands.hpp"
#include "config.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace platewave::cli;

  CLI::App app{"Damped plate-wave transmission problem: simulation, spectra and weight checks"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  bool strict = false;
  bool dump = false;
  bool print_config = false;

  for (const auto& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("config", config_path, "INI run configuration")->required()->check(
        CLI::ExistingFile);
    sub->add_option("-o,--output", output_dir, "output directory (overrides run.output_dir)");
    sub->add_flag("--strict", strict, "exit with status 1 when any verdict is FAIL");
    sub->add_flag("--dump-matrices", dump, "write M, K and D as triplet files");
    sub->add_flag("--print-config", print_config, "print the canonical configuration and exit");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (print_config) {
    std::cout << canonical(cfg);
    return 0;
  }

  RunOptions opts;
  opts.strict = strict;
  opts.dump_matrices = dump;
  if (!output_dir.empty()) {
    opts.output_dir = output_dir;
  }
  try {
    const RunOutcome outcome = run(subcommand, cfg, opts);
    for (const auto& [name, v] : outcome.report["verdicts"].items()) {
      std::cout << name << ": " << v.get<std::string>() << '\n';
    }
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::cerr << subcommand << ": " << e.what() << '\n';
    return 3;
  }
}
