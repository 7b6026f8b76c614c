#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace patchdyn;

int main(int argc, char** argv) {
  CLI::App app{"Patch dynamics with mesoscale coupling: spectra, evolution, error bounds, 2D Ginzburg-Landau, "
               "communication ledgers"};
  app.require_subcommand(1);
  // -h would clash with --h, the microscale spacing.
  app.set_help_flag("--help", "print this help message and exit");

  std::string config_path;
  app.add_option("--config", config_path, "sectioned key=value config file")->check(CLI::ExistingFile);

  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<std::string, CLI::Option*>> flags;
  for (const auto& key : config_schema()) {
    auto* opt = app.add_option(key.flag(), flag_values[key.name],
                               key.help + " [" + key.section + "] (default: " +
                                   (key.default_value.empty() ? "none" : key.default_value) + ")");
    flags.emplace_back(key.name, opt);
  }

  const std::vector<std::pair<std::string, std::function<int(const ExperimentConfig&)>>> commands{
      {"eig", cli::run_eig},         {"evolve", cli::run_evolve}, {"bounds", cli::run_bounds},
      {"figures", cli::run_figures}, {"gl2d", cli::run_gl2d},     {"comms", cli::run_comms},
  };
  const std::map<std::string, std::string> descriptions{
      {"eig", "analytic and numeric spectra, biorthonormality and identity residuals"},
      {"evolve", "exact, mesoscale and direct trajectories with their differences"},
      {"bounds", "remainder and macroscale error bound tables"},
      {"figures", "canned figure data sets (--which)"},
      {"gl2d", "2D Ginzburg-Landau patch experiment"},
      {"comms", "message ledgers for micro and meso cadences"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, fn] : commands) subs[name] = app.add_subcommand(name, descriptions.at(name))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    ExperimentConfig cfg;
    for (const auto& [name, fn] : commands) {
      if (!subs[name]->parsed()) continue;
      if (!config_path.empty()) cfg.load(config_path);
      cli::apply_subcommand_defaults(name, cfg);
      for (const auto& [key, opt] : flags)
        if (opt->count() > 0) cfg.override_value(key, flag_values[key]);
      return fn(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
