#include "gibbslat/experiment.hpp"

#include <cmath>
#include <sstream>

#include "gibbslat/parallel.hpp"

namespace gibbslat {

ExperimentConfig parse_experiment_config(const Json& root) {
  if (!root.contains("model")) throw ConfigError("missing config key: model");
  ExperimentConfig cfg;
  cfg.base_model = parse_model(root["model"]);

  if (!root.contains("experiment") || !root["experiment"].is_object())
    throw ConfigError("missing config key: experiment");
  const Json& ex = root["experiment"];
  cfg.replicates = ex.value("replicates", 50);
  if (cfg.replicates < 1) throw ConfigError("experiment.replicates must be >= 1");

  const Json& sim = root.contains("simulate") ? root["simulate"] : Json::object();
  cfg.burn_in = sim.value("burn_in", 10000);
  cfg.sweeps = sim.value("sweeps", 1000);
  cfg.seed = sim.value("seed", static_cast<uint64_t>(20260810));
  if (sim.contains("sim_margin") && sim["sim_margin"].is_number())
    cfg.sim_margin = sim["sim_margin"].get<double>();

  cfg.estimator = root.contains("estimate") ? parse_estimator_config(root["estimate"])
                                            : EstimatorConfig{};

  if (!ex.contains("grid") || !ex["grid"].is_array() || ex["grid"].empty())
    throw ConfigError("experiment.grid must be a nonempty array");
  for (const Json& g : ex["grid"]) {
    RegimeCell proto;
    proto.theta1 = g.value("theta1", 1.0);
    if (g.contains("theta2") && g["theta2"].is_array())
      proto.theta2 = g["theta2"].get<std::vector<double>>();
    else
      proto.theta2 = {g.value("theta2", 0.0)};
    proto.range = g.value("R", cfg.base_model.interaction.range());
    proto.hardcore_r = g.value("hardcore_r", cfg.base_model.interaction.hardcore_r);
    if (!g.contains("ell")) throw ConfigError("experiment.grid entries need an 'ell' list");
    for (const auto& e : g["ell"]) {
      RegimeCell cell = proto;
      cell.ell = e.get<double>();
      cfg.cells.push_back(cell);
    }
  }
  cfg.echo = root;
  return cfg;
}

GibbsModel cell_model(const GibbsModel& base, const RegimeCell& cell) {
  GibbsModel gm = base;
  if (gm.move.p1() == 1) gm.move.theta1 = cell.theta1;
  gm.interaction.hardcore_r = cell.hardcore_r;
  gm.interaction.theta2 = cell.theta2;
  if (gm.interaction.breakpoints.size() == 1) {
    gm.interaction.breakpoints = {cell.range};
  } else {
    // Multi-band grids rescale the outer edge only.
    gm.interaction.breakpoints.back() = cell.range;
  }
  gm.validate();
  return gm;
}

SimulationPlan cell_plan(const ExperimentConfig& cfg, const RegimeCell& cell, uint64_t cell_seed) {
  SimulationPlan plan;
  plan.model = cell_model(cfg.base_model, cell);
  plan.obs_window = Window::cube(plan.model.dim(), cell.ell);
  if (cfg.sim_margin) {
    Window w = plan.obs_window;
    for (int k = 0; k < w.dim; ++k) {
      w.lower[k] -= *cfg.sim_margin;
      w.upper[k] += *cfg.sim_margin;
    }
    plan.sim_window = w;
  } else {
    plan.sim_window = SimulationPlan::default_sim_window(plan.obs_window, plan.model);
  }
  plan.burn_in = cfg.burn_in;
  plan.sweeps = cfg.sweeps;
  plan.seed = cell_seed;
  return plan;
}

bool divergence_flag(const FitResult& fr, const std::vector<double>& theta_true) {
  if (!fr.converged || fr.at_bound) return true;
  const std::vector<double> hat = fr.theta_hat.flat();
  for (size_t j = 0; j < hat.size(); ++j) {
    if (std::abs(hat[j] - theta_true[j]) > std::max(1.0, std::abs(theta_true[j]))) return true;
  }
  return false;
}

namespace {

std::vector<std::string> component_names(const GibbsModel& gm) {
  std::vector<std::string> names;
  if (gm.move.p1() == 1) names.push_back("theta1");
  if (gm.interaction.p2() == 1) {
    names.push_back("theta2");
  } else {
    for (int j = 0; j < gm.interaction.p2(); ++j) names.push_back("theta2_" + std::to_string(j));
  }
  return names;
}

}  // namespace

ExperimentTable run_experiment(const ExperimentConfig& cfg, int jobs) {
  ExperimentTable table;
  for (size_t ci = 0; ci < cfg.cells.size(); ++ci) {
    const RegimeCell& cell = cfg.cells[ci];
    const GibbsModel gm = cell_model(cfg.base_model, cell);
    const std::vector<double> theta_true = gm.theta().flat();
    const uint64_t cell_seed = child_seed(cfg.seed, static_cast<uint64_t>(ci));

    const int K = cfg.replicates;
    std::vector<std::optional<FitResult>> fits(static_cast<size_t>(K));
    std::vector<std::string> errors(static_cast<size_t>(K));
    parallel_for(K, jobs, [&](int k) {
      try {
        SimulationPlan plan = cell_plan(cfg, cell, child_seed(cell_seed, static_cast<uint64_t>(k)));
        const SimulateResult sim = simulate(plan);
        const Observation obs = Observation::from_f1(sim.f1, sim.shift);
        fits[static_cast<size_t>(k)] = fit_takacs_fiksel(obs, gm, cfg.estimator);
      } catch (const std::exception& e) {
        errors[static_cast<size_t>(k)] = e.what();  // partial failure: row keeps going
      }
    });

    CellSummary row;
    row.cell = cell;
    row.K = K;
    row.component_names = component_names(gm);
    const int p = static_cast<int>(theta_true.size());
    std::vector<std::vector<double>> comp(static_cast<size_t>(p));
    for (int k = 0; k < K; ++k) {
      if (!fits[static_cast<size_t>(k)]) {
        ++row.n_failed;
        ++row.n_diverged;
        continue;
      }
      const FitResult& fr = *fits[static_cast<size_t>(k)];
      if (divergence_flag(fr, theta_true)) ++row.n_diverged;
      const std::vector<double> hat = fr.theta_hat.flat();
      for (int j = 0; j < p; ++j) comp[static_cast<size_t>(j)].push_back(hat[static_cast<size_t>(j)]);
    }
    for (int j = 0; j < p; ++j) {
      const std::vector<double>& xs = comp[static_cast<size_t>(j)];
      const double m = mean(xs);
      const double s = sample_sd(xs);
      double mse = 0;
      for (double x : xs) mse += (x - theta_true[static_cast<size_t>(j)]) * (x - theta_true[static_cast<size_t>(j)]);
      mse = xs.empty() ? 0.0 : mse / static_cast<double>(xs.size());
      row.mean.push_back(m);
      row.sd.push_back(s);
      row.rmse.push_back(std::sqrt(mse));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string table_to_csv(const ExperimentTable& table) {
  std::ostringstream os;
  os << "theta1_true,theta2_true,R,hardcore_r,ell,K,n_failed,n_diverged";
  size_t maxp = 0;
  for (const CellSummary& row : table.rows) maxp = std::max(maxp, row.component_names.size());
  for (const CellSummary& row : table.rows) {
    if (row.component_names.size() == maxp) {
      for (const std::string& n : row.component_names)
        os << ",mean_" << n << ",sd_" << n << ",rmse_" << n;
      break;
    }
  }
  os << "\n";
  for (const CellSummary& row : table.rows) {
    os << format_double(row.cell.theta1) << "," << format_double(row.cell.theta2[0]) << ","
       << format_double(row.cell.range) << "," << format_double(row.cell.hardcore_r) << ","
       << format_double(row.cell.ell) << "," << row.K << "," << row.n_failed << ","
       << row.n_diverged;
    for (size_t j = 0; j < row.component_names.size(); ++j)
      os << "," << format_double(row.mean[j]) << "," << format_double(row.sd[j]) << ","
         << format_double(row.rmse[j]);
    os << "\n";
  }
  return os.str();
}

void write_experiment_outputs(const ExperimentTable& table, const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "table.csv", table_to_csv(table));
  Json j;
  j["schema"] = "gibbslat/1";
  j["config"] = cfg.echo;
  Json rows = Json::array();
  for (const CellSummary& row : table.rows) {
    Json r;
    r["theta1_true"] = row.cell.theta1;
    r["theta2_true"] = row.cell.theta2;
    r["R"] = row.cell.range;
    r["hardcore_r"] = row.cell.hardcore_r;
    r["ell"] = row.cell.ell;
    r["K"] = row.K;
    r["n_failed"] = row.n_failed;
    r["n_diverged"] = row.n_diverged;
    for (size_t c = 0; c < row.component_names.size(); ++c) {
      r["mean_" + row.component_names[c]] = row.mean[c];
      r["sd_" + row.component_names[c]] = row.sd[c];
      r["rmse_" + row.component_names[c]] = row.rmse[c];
    }
    rows.push_back(r);
  }
  j["rows"] = rows;
  write_text_file(out_dir / "experiment.json", j.dump(2) + "\n");
}

}  // namespace gibbslat
