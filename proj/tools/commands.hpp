#pragma once

#include <string>

#include "patchdyn/config.hpp"

namespace patchdyn::cli {

int run_eig(const ExperimentConfig& cfg);
int run_evolve(const ExperimentConfig& cfg);
int run_bounds(const ExperimentConfig& cfg);
int run_figures(const ExperimentConfig& cfg);
int run_gl2d(const ExperimentConfig& cfg);
int run_comms(const ExperimentConfig& cfg);

// Defaults that differ from the schema for one subcommand.
void apply_subcommand_defaults(const std::string& name, ExperimentConfig& cfg);

}  // namespace patchdyn::cli
