#include <iostream>

#include <CLI11.hpp>

#include "gibbslat/experiment.hpp"
#include "gibbslat/parallel.hpp"

namespace gl = gibbslat;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out;
  int jobs = 1;
  int64_t seed_override = -1;
};

gl::Json load_config(const CommonOpts& opts) { return gl::load_json_file(opts.config_path); }

gl::SimulationPlan plan_from_config(const gl::Json& root, int64_t seed_override) {
  if (!root.contains("model")) throw gl::ConfigError("missing config key: model");
  gl::SimulationPlan plan;
  plan.model = gl::parse_model(root["model"]);
  const gl::Json sim = root.contains("simulate") ? root["simulate"] : gl::Json::object();
  const int dim = plan.model.dim();
  if (sim.contains("obs_window")) {
    plan.obs_window = gl::parse_window(sim["obs_window"], dim);
  } else if (sim.contains("obs_halfwidth")) {
    plan.obs_window = gl::Window::cube(dim, sim["obs_halfwidth"].get<double>());
  } else {
    throw gl::ConfigError("simulate needs obs_halfwidth or obs_window");
  }
  if (sim.contains("sim_margin") && sim["sim_margin"].is_number()) {
    gl::Window w = plan.obs_window;
    for (int k = 0; k < dim; ++k) {
      w.lower[k] -= sim["sim_margin"].get<double>();
      w.upper[k] += sim["sim_margin"].get<double>();
    }
    plan.sim_window = w;
  } else {
    plan.sim_window = gl::SimulationPlan::default_sim_window(plan.obs_window, plan.model);
  }
  plan.burn_in = sim.value("burn_in", 10000);
  plan.sweeps = sim.value("sweeps", 1000);
  plan.seed = sim.value("seed", static_cast<uint64_t>(20260810));
  if (seed_override >= 0) plan.seed = static_cast<uint64_t>(seed_override);
  if (sim.contains("shift") && sim["shift"].is_array()) {
    gl::Vec u;
    int k = 0;
    for (const auto& e : sim["shift"]) u[k++] = e.get<double>();
    plan.fixed_shift = u;
  }
  plan.validate();
  return plan;
}

int cmd_simulate(const CommonOpts& opts) {
  const gl::Json root = load_config(opts);
  const gl::SimulationPlan plan = plan_from_config(root, opts.seed_override);
  const int K = root.contains("simulate") ? root["simulate"].value("replicates", 1) : 1;
  const fs::path out_dir = opts.out.empty() ? fs::path("out") : fs::path(opts.out);
  fs::create_directories(out_dir);

  const std::vector<gl::SimulateResult> reps = gl::replicate(plan, K, opts.jobs);
  const int dim = plan.model.dim();
  for (int k = 0; k < K; ++k) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "rep%04d", k);
    const gl::SimulateResult& r = reps[static_cast<size_t>(k)];
    gl::write_f1_csv(out_dir / (std::string(stem) + "_f1.csv"), r.f1);
    gl::write_f2_csv(out_dir / (std::string(stem) + "_f2.csv"), r.f2);
    gl::PatternMeta meta;
    meta.window = plan.obs_window;
    meta.shift = r.shift;
    meta.seed = gl::child_seed(plan.seed, static_cast<uint64_t>(k));
    meta.theta = plan.model.theta();
    meta.model = gl::model_to_json(plan.model);
    meta.framework = "F1+F2";
    meta.replicate = k;
    meta.config_echo = root;
    gl::write_meta_json(out_dir / (std::string(stem) + "_meta.json"), meta, dim);
    std::cout << stem << ": " << r.f1.sites.size() << " pairs, " << r.f2.points.size()
              << " points, acceptance " << r.acceptance_rate << "\n";
  }
  return 0;
}

int cmd_estimate(const CommonOpts& opts, const std::string& pattern_path) {
  const gl::Json root = load_config(opts);
  if (!root.contains("model")) throw gl::ConfigError("missing config key: model");
  const gl::GibbsModel gm = gl::parse_model(root["model"]);
  const gl::EstimatorConfig cfg = root.contains("estimate")
                                      ? gl::parse_estimator_config(root["estimate"])
                                      : gl::EstimatorConfig{};
  const gl::Observation obs = gl::read_observation(pattern_path);

  gl::FitResult fit;
  if (obs.framework == gl::Framework::F1) {
    fit = gl::fit_takacs_fiksel(obs, gm, cfg);
  } else {
    fit = gl::fit_variational(obs, gm, cfg);
  }
  gl::Json echo;
  echo["model"] = gl::model_to_json(gm);
  echo["estimate"] = gl::estimator_config_to_json(cfg);
  echo["pattern"] = pattern_path;
  const gl::Json out = gl::fit_result_to_json(fit, echo);
  if (opts.out.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    gl::write_text_file(opts.out, out.dump(2) + "\n");
  }
  return 0;
}

int cmd_diagnose(const CommonOpts& opts, const std::string& glob) {
  const gl::Json root = load_config(opts);
  if (!root.contains("model")) throw gl::ConfigError("missing config key: model");
  const gl::GibbsModel gm = gl::parse_model(root["model"]);
  const gl::EstimatorConfig cfg = root.contains("estimate")
                                      ? gl::parse_estimator_config(root["estimate"])
                                      : gl::EstimatorConfig{};
  const gl::Json diag = root.contains("diagnose") ? root["diagnose"] : gl::Json::object();
  std::vector<double> radii = {2, 3, 4, 6, 8, 10, 12};
  if (diag.contains("radii")) radii = diag["radii"].get<std::vector<double>>();

  const std::vector<fs::path> files = gl::glob_files(glob);
  if (files.empty()) throw gl::DataError("no pattern files match: " + glob);
  const fs::path out_dir = opts.out.empty() ? fs::path("out") : fs::path(opts.out);
  fs::create_directories(out_dir);

  std::vector<gl::PointPattern> patterns;
  std::vector<std::pair<std::string, gl::Observation>> f1_obs;
  for (const fs::path& f : files) {
    const gl::Observation obs = gl::read_observation(f);
    if (obs.framework == gl::Framework::F2) {
      gl::PointPattern p;
      p.points = obs.points;
      p.window = obs.window;
      p.dim = gm.dim();
      patterns.push_back(std::move(p));
    } else {
      f1_obs.emplace_back(f.filename().string(), obs);
    }
  }

  gl::Json summary;
  summary["schema"] = "gibbslat/1";
  summary["files"] = files.size();

  if (!patterns.empty()) {
    const gl::VarianceCurve curve = gl::variance_curve(patterns, radii);
    std::string csv = "r,ratio,se\n";
    for (size_t i = 0; i < curve.radii.size(); ++i)
      csv += gl::format_double(curve.radii[i]) + "," + gl::format_double(curve.ratios[i]) + "," +
             gl::format_double(curve.standard_errors[i]) + "\n";
    gl::write_text_file(out_dir / "variance_curve.csv", csv);
    summary["variance_replicates"] = curve.n_replicates;
  }

  if (!f1_obs.empty()) {
    auto bank = gl::score_bank(gm.p());
    bank.push_back(gl::constant_test_function());
    std::string csv = "file,function,a_avg,b_avg,scaled_residual\n";
    for (const auto& [name, obs] : f1_obs) {
      const gl::ResidualReport rep = gl::residual_report(obs, gm, gm.theta(), bank, cfg);
      for (size_t i = 0; i < rep.names.size(); ++i)
        csv += name + "," + rep.names[i] + "," + gl::format_double(rep.a_avg[i]) + "," +
               gl::format_double(rep.b_avg[i]) + "," + gl::format_double(rep.scaled_residual[i]) +
               "\n";
    }
    gl::write_text_file(out_dir / "residuals.csv", csv);
    summary["residual_files"] = f1_obs.size();
  }
  gl::write_text_file(out_dir / "diagnose.json", summary.dump(2) + "\n");
  std::cout << "diagnose: " << patterns.size() << " point patterns, " << f1_obs.size()
            << " pair patterns\n";
  return 0;
}

int cmd_experiment(const CommonOpts& opts) {
  const gl::Json root = load_config(opts);
  gl::ExperimentConfig cfg = gl::parse_experiment_config(root);
  if (opts.seed_override >= 0) cfg.seed = static_cast<uint64_t>(opts.seed_override);
  const gl::ExperimentTable table = gl::run_experiment(cfg, opts.jobs);
  const fs::path out_dir = opts.out.empty() ? fs::path("out") : fs::path(opts.out);
  gl::write_experiment_outputs(table, cfg, out_dir);
  std::cout << gl::table_to_csv(table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs perturbed lattice simulation, estimation and diagnostics"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string pattern_arg;

  auto add_common = [&](CLI::App* sub, bool needs_jobs) {
    sub->add_option("--config", opts.config_path, "JSON config path")->required();
    sub->add_option("--out", opts.out, "output directory or file");
    if (needs_jobs) sub->add_option("--jobs", opts.jobs, "worker threads");
    sub->add_option("--seed", opts.seed_override, "seed override");
  };

  CLI::App* sim = app.add_subcommand("simulate", "simulate replicated patterns");
  add_common(sim, true);
  CLI::App* est = app.add_subcommand("estimate", "fit parameters from one pattern file");
  add_common(est, false);
  est->add_option("--pattern", pattern_arg, "pattern CSV (rep*_f1.csv or rep*_f2.csv)")->required();
  CLI::App* dia = app.add_subcommand("diagnose", "variance curves and residual reports");
  add_common(dia, false);
  dia->add_option("--patterns", pattern_arg, "pattern file glob")->required();
  CLI::App* exp = app.add_subcommand("experiment", "simulate/estimate grid, emit summary table");
  add_common(exp, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(opts);
    if (est->parsed()) return cmd_estimate(opts, pattern_arg);
    if (dia->parsed()) return cmd_diagnose(opts, pattern_arg);
    if (exp->parsed()) return cmd_experiment(opts);
  } catch (const gibbslat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gibbslat::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const gibbslat::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
