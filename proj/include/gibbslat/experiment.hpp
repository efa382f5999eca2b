#pragma once

#include <filesystem>

#include "gibbslat/io.hpp"

namespace gibbslat {

struct RegimeCell {
  double theta1 = 0.0;  // ignored for uniform moves
  std::vector<double> theta2;
  double range = 0.5;
  double hardcore_r = 0.0;
  double ell = 8.0;  // observation window [-ell, ell)^d
};

struct ExperimentConfig {
  GibbsModel base_model;  // family, dimension, lattice; theta/range overridden per cell
  std::vector<RegimeCell> cells;
  int replicates = 50;
  uint64_t seed = 0;
  int burn_in = 10000;
  int sweeps = 1000;
  std::optional<double> sim_margin;  // auto when unset
  EstimatorConfig estimator;
  Json echo;
};

ExperimentConfig parse_experiment_config(const Json& root);

struct CellSummary {
  RegimeCell cell;
  int K = 0;
  int n_failed = 0;    // replicates whose fit raised an error
  int n_diverged = 0;  // divergence-flagged fits (failures included)
  std::vector<std::string> component_names;
  std::vector<double> mean, sd, rmse;  // per component, over successful fits
};

struct ExperimentTable {
  std::vector<CellSummary> rows;
};

// A fit counts as divergent when it did not converge, sits on a bound, or is
// grossly biased (some component off truth by more than max(1, |truth|)).
bool divergence_flag(const FitResult& fr, const std::vector<double>& theta_true);

GibbsModel cell_model(const GibbsModel& base, const RegimeCell& cell);
SimulationPlan cell_plan(const ExperimentConfig& cfg, const RegimeCell& cell, uint64_t cell_seed);

ExperimentTable run_experiment(const ExperimentConfig& cfg, int jobs);

std::string table_to_csv(const ExperimentTable& table);
void write_experiment_outputs(const ExperimentTable& table, const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir);

}  // namespace gibbslat
