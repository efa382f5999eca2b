#include "gibbslat/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gibbslat {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("config parse failure in " + path.string() + ": " + e.what());
  }
}

namespace {

const char* kAxis[kMaxDim] = {"x", "y", "z", "w"};

double require_number(const Json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError("missing or non-numeric config key: " + key);
  return j[key].get<double>();
}

std::vector<double> number_list(const Json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_array())
    throw ConfigError("missing or non-array config key: " + key);
  std::vector<double> v;
  for (const auto& e : j[key]) {
    if (!e.is_number()) throw ConfigError("non-numeric entry under config key: " + key);
    v.push_back(e.get<double>());
  }
  return v;
}

}  // namespace

GibbsModel parse_model(const Json& j) {
  GibbsModel gm;
  const int dim = static_cast<int>(require_number(j, "dimension"));
  if (dim < 1 || dim > kMaxDim) throw ConfigError("model dimension must be in [1,4]");

  if (!j.contains("move") || !j["move"].is_object()) throw ConfigError("missing model key: move");
  const Json& mv = j["move"];
  const std::string family = mv.value("family", "");
  if (family == "uniform") {
    const double hw = require_number(mv, "halfwidth");
    gm.move = MoveModel::uniform(Window::cube(dim, hw));
  } else if (family == "gaussian") {
    gm.move = MoveModel::gaussian(dim, require_number(mv, "theta1"));
  } else if (family == "exponential") {
    gm.move = MoveModel::exponential(dim, require_number(mv, "theta1"));
  } else {
    throw ConfigError("unknown move family: '" + family + "'");
  }

  if (!j.contains("interaction") || !j["interaction"].is_object())
    throw ConfigError("missing model key: interaction");
  const Json& in = j["interaction"];
  gm.interaction.hardcore_r = in.value("hardcore_r", 0.0);
  gm.interaction.breakpoints = number_list(in, "breakpoints");
  gm.interaction.theta2 = number_list(in, "theta2");

  if (j.contains("lattice") && j["lattice"].is_object() && j["lattice"].contains("basis") &&
      j["lattice"]["basis"].is_array()) {
    gm.lattice.dim = dim;
    for (const auto& row : j["lattice"]["basis"]) {
      Vec a;
      int k = 0;
      for (const auto& e : row) a[k++] = e.get<double>();
      gm.lattice.basis.push_back(a);
    }
  } else {
    gm.lattice = LatticeSpec::integer(dim);
  }
  gm.validate();
  return gm;
}

Json model_to_json(const GibbsModel& gm) {
  Json j;
  j["dimension"] = gm.dim();
  Json mv;
  switch (gm.move.family) {
    case MoveFamily::Uniform:
      mv["family"] = "uniform";
      mv["halfwidth"] = 0.5 * (gm.move.support.upper[0] - gm.move.support.lower[0]);
      break;
    case MoveFamily::GaussianIsotropic:
      mv["family"] = "gaussian";
      mv["theta1"] = gm.move.theta1;
      break;
    case MoveFamily::ExponentialOrthant:
      mv["family"] = "exponential";
      mv["theta1"] = gm.move.theta1;
      break;
  }
  j["move"] = mv;
  Json in;
  in["hardcore_r"] = gm.interaction.hardcore_r;
  in["breakpoints"] = gm.interaction.breakpoints;
  in["theta2"] = gm.interaction.theta2;
  j["interaction"] = in;
  if (!gm.lattice.is_integer_lattice()) {
    Json basis = Json::array();
    for (const Vec& a : gm.lattice.basis) {
      Json row = Json::array();
      for (int k = 0; k < gm.dim(); ++k) row.push_back(a[k]);
      basis.push_back(row);
    }
    j["lattice"] = Json{{"basis", basis}};
  } else {
    j["lattice"] = Json{{"basis", "identity"}};
  }
  return j;
}

EstimatorConfig parse_estimator_config(const Json& j) {
  EstimatorConfig cfg;
  cfg.beta = j.value("beta", 1.0);
  if (cfg.beta <= 0.5 && !j.contains("fixed_m"))
    throw ConfigError("estimate.beta must exceed 1/2");
  if (j.contains("fixed_m") && j["fixed_m"].is_number())
    cfg.fixed_m = j["fixed_m"].get<double>();
  cfg.quad_resolution = j.value("quad_resolution", 60);
  cfg.refine_tol = j.value("refine_tol", 1e-4);
  cfg.refine_depth = j.value("refine_depth", 6);
  const std::string opt = j.value("optimizer", "simplex");
  if (opt == "simplex")
    cfg.optimizer = OptimizerKind::Simplex;
  else if (opt == "gradient")
    cfg.optimizer = OptimizerKind::Gradient;
  else
    throw ConfigError("unknown optimizer: '" + opt + "'");
  const std::string bank = j.value("test_functions", "score");
  if (bank != "score") throw ConfigError("config test_functions supports 'score' (custom banks are API-level)");
  cfg.bank = BankKind::Score;
  if (j.contains("theta_bounds") && j["theta_bounds"].is_object()) {
    cfg.theta_lo = number_list(j["theta_bounds"], "lower");
    cfg.theta_hi = number_list(j["theta_bounds"], "upper");
  }
  if (j.contains("theta_init") && j["theta_init"].is_array()) cfg.theta_init = number_list(j, "theta_init");
  cfg.ftol = j.value("ftol", 1e-8);
  cfg.max_iter = j.value("max_iter", 2000);
  cfg.variational_taper = j.value("variational_taper", 0.2);
  return cfg;
}

Json estimator_config_to_json(const EstimatorConfig& cfg) {
  Json j;
  j["beta"] = cfg.beta;
  if (cfg.fixed_m) j["fixed_m"] = *cfg.fixed_m;
  j["quad_resolution"] = cfg.quad_resolution;
  j["refine_tol"] = cfg.refine_tol;
  j["refine_depth"] = cfg.refine_depth;
  j["optimizer"] = cfg.optimizer == OptimizerKind::Simplex ? "simplex" : "gradient";
  j["test_functions"] = "score";
  if (cfg.theta_lo && cfg.theta_hi) {
    j["theta_bounds"] = Json{{"lower", *cfg.theta_lo}, {"upper", *cfg.theta_hi}};
  } else {
    j["theta_bounds"] = "auto";
  }
  if (cfg.theta_init)
    j["theta_init"] = *cfg.theta_init;
  else
    j["theta_init"] = "auto";
  j["ftol"] = cfg.ftol;
  j["max_iter"] = cfg.max_iter;
  j["variational_taper"] = cfg.variational_taper;
  return j;
}

Json window_to_json(const Window& w) {
  Json lower = Json::array(), upper = Json::array();
  for (int k = 0; k < w.dim; ++k) {
    lower.push_back(w.lower[k]);
    upper.push_back(w.upper[k]);
  }
  return Json{{"lower", lower}, {"upper", upper}};
}

Window parse_window(const Json& j, int dim) {
  const std::vector<double> lo = number_list(j, "lower");
  const std::vector<double> hi = number_list(j, "upper");
  if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim)
    throw ConfigError("window bounds have wrong dimension");
  Vec l, u;
  for (int k = 0; k < dim; ++k) {
    l[k] = lo[static_cast<size_t>(k)];
    u[k] = hi[static_cast<size_t>(k)];
  }
  return Window::box(dim, l, u);
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path.string());
  out << content;
}

void write_f1_csv(const fs::path& path, const PairPattern& p) {
  std::ostringstream os;
  for (int k = 0; k < p.dim; ++k) os << (k ? "," : "") << "site_" << kAxis[k];
  for (int k = 0; k < p.dim; ++k) os << ",disp_" << kAxis[k];
  os << "\n";
  for (size_t i = 0; i < p.sites.size(); ++i) {
    for (int k = 0; k < p.dim; ++k) os << (k ? "," : "") << format_double(p.sites[i][k]);
    for (int k = 0; k < p.dim; ++k) os << "," << format_double(p.disps[i][k]);
    os << "\n";
  }
  write_text_file(path, os.str());
}

void write_f2_csv(const fs::path& path, const PointPattern& p) {
  std::ostringstream os;
  for (int k = 0; k < p.dim; ++k) os << (k ? "," : "") << kAxis[k];
  os << "\n";
  for (const Vec& pt : p.points) {
    for (int k = 0; k < p.dim; ++k) os << (k ? "," : "") << format_double(pt[k]);
    os << "\n";
  }
  write_text_file(path, os.str());
}

void write_meta_json(const fs::path& path, const PatternMeta& meta, int dim) {
  Json j;
  j["schema"] = "gibbslat/1";
  j["framework"] = meta.framework;
  j["window"] = window_to_json(meta.window);
  Json shift = Json::array();
  for (int k = 0; k < dim; ++k) shift.push_back(meta.shift[k]);
  j["shift"] = shift;
  j["seed"] = meta.seed;
  j["theta"] = Json{{"theta1", meta.theta.theta1}, {"theta2", meta.theta.theta2}};
  j["model"] = meta.model;
  j["replicate"] = meta.replicate;
  if (!meta.config_echo.is_null()) j["config"] = meta.config_echo;
  write_text_file(path, j.dump(2) + "\n");
}

namespace {

std::vector<double> parse_csv_row(const std::string& line, size_t expected, size_t lineno,
                                  const fs::path& path) {
  std::vector<double> vals;
  size_t start = 0;
  while (start <= line.size()) {
    size_t comma = line.find(',', start);
    const std::string tok =
        line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw DataError("CSV parse error at " + path.string() + ":" + std::to_string(lineno) +
                      " (token '" + tok + "')");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (vals.size() != expected)
    throw DataError("CSV parse error at " + path.string() + ":" + std::to_string(lineno) +
                    " (expected " + std::to_string(expected) + " columns)");
  return vals;
}

}  // namespace

Observation read_observation(const fs::path& csv_path) {
  const std::string name = csv_path.filename().string();
  std::string framework;
  if (name.size() > 7 && name.substr(name.size() - 7) == "_f1.csv")
    framework = "F1";
  else if (name.size() > 7 && name.substr(name.size() - 7) == "_f2.csv")
    framework = "F2";
  else
    throw DataError("pattern file must end in _f1.csv or _f2.csv: " + name);

  fs::path meta_path = csv_path;
  meta_path.replace_filename(name.substr(0, name.size() - 7) + "_meta.json");
  if (!fs::exists(meta_path)) throw DataError("missing pattern sidecar: " + meta_path.string());
  Json meta;
  try {
    std::ifstream in(meta_path);
    meta = Json::parse(in);
  } catch (const std::exception& e) {
    throw DataError("sidecar parse failure in " + meta_path.string() + ": " + e.what());
  }
  const int dim = static_cast<int>(meta["model"]["dimension"].get<double>());
  Observation obs;
  obs.window = parse_window(meta["window"], dim);
  int k = 0;
  for (const auto& e : meta["shift"]) obs.shift[k++] = e.get<double>();

  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot open pattern file: " + csv_path.string());
  std::string line;
  if (!std::getline(in, line))
    throw DataError("pattern file is empty: " + csv_path.string());
  size_t lineno = 1;
  if (framework == "F1") {
    obs.framework = Framework::F1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const std::vector<double> vals = parse_csv_row(line, static_cast<size_t>(2 * dim), lineno, csv_path);
      Vec site, disp;
      for (int c = 0; c < dim; ++c) {
        site[c] = vals[static_cast<size_t>(c)];
        disp[c] = vals[static_cast<size_t>(dim + c)];
      }
      obs.sites.push_back(site);
      obs.disps.push_back(disp);
      obs.points.push_back(add(site, disp, dim));
    }
  } else {
    obs.framework = Framework::F2;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const std::vector<double> vals = parse_csv_row(line, static_cast<size_t>(dim), lineno, csv_path);
      Vec pt;
      for (int c = 0; c < dim; ++c) pt[c] = vals[static_cast<size_t>(c)];
      obs.points.push_back(pt);
    }
  }
  obs.validate();
  return obs;
}

Json fit_result_to_json(const FitResult& fr, const Json& config_echo) {
  Json j;
  j["schema"] = "gibbslat/1";
  j["theta_hat"] = Json{{"theta1", fr.theta_hat.theta1}, {"theta2", fr.theta_hat.theta2}};
  j["criterion"] = fr.criterion;
  j["converged"] = fr.converged;
  j["at_bound"] = fr.at_bound;
  j["n_sites_used"] = fr.n_sites_used;
  Json res;
  for (size_t k = 0; k < fr.residuals.size(); ++k)
    res[fr.residual_names[k]] = fr.residuals[k];
  j["residuals"] = res;
  if (!config_echo.is_null()) j["config"] = config_echo;
  return j;
}

std::vector<fs::path> glob_files(const std::string& pattern) {
  const fs::path pat(pattern);
  const fs::path dir = pat.parent_path().empty() ? fs::path(".") : pat.parent_path();
  const std::string name = pat.filename().string();

  auto match = [](const std::string& s, const std::string& p) {
    // Iterative '*' wildcard match.
    size_t si = 0, pi = 0, star = std::string::npos, mark = 0;
    while (si < s.size()) {
      if (pi < p.size() && (p[pi] == s[si])) {
        ++si;
        ++pi;
      } else if (pi < p.size() && p[pi] == '*') {
        star = pi++;
        mark = si;
      } else if (star != std::string::npos) {
        pi = star + 1;
        si = ++mark;
      } else {
        return false;
      }
    }
    while (pi < p.size() && p[pi] == '*') ++pi;
    return pi == p.size();
  };

  std::vector<fs::path> out;
  if (!fs::exists(dir)) throw DataError("pattern directory does not exist: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (match(entry.path().filename().string(), name)) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gibbslat
