#include "gibbslat/inference.hpp"

#include <algorithm>
#include <cmath>

#include "gibbslat/optim.hpp"

namespace gibbslat {

Observation Observation::from_f1(const PairPattern& p, const Vec& shift) {
  Observation o;
  o.framework = Framework::F1;
  o.sites = p.sites;
  o.disps = p.disps;
  o.points.resize(p.sites.size());
  for (size_t k = 0; k < p.sites.size(); ++k) o.points[k] = add(p.sites[k], p.disps[k], p.dim);
  o.window = p.window;
  o.shift = shift;
  return o;
}

Observation Observation::from_f2(const PointPattern& p, const Vec& shift) {
  Observation o;
  o.framework = Framework::F2;
  o.points = p.points;
  o.window = p.window;
  o.shift = shift;
  return o;
}

void Observation::validate() const {
  if (framework == Framework::F1) {
    if (sites.size() != disps.size() || sites.size() != points.size())
      throw DataError("framework-1 observation arrays have mismatched lengths");
    for (size_t k = 0; k < sites.size(); ++k) {
      if (!window.contains(sites[k]) || !window.contains(points[k]))
        throw DataError("framework-1 pair outside the observation window");
    }
  } else {
    for (const Vec& p : points)
      if (!window.contains(p)) throw DataError("framework-2 point outside the observation window");
  }
}

std::vector<TestFunction> score_bank(int p) {
  std::vector<TestFunction> bank;
  for (int j = 0; j < p; ++j) {
    bank.push_back(TestFunction{
        "score_" + std::to_string(j),
        [j](const Vec&, const Vec&, const std::vector<double>& s, const ThetaVector&) {
          return s[static_cast<size_t>(j)];
        }});
  }
  return bank;
}

TestFunction constant_test_function() {
  return TestFunction{"const",
                      [](const Vec&, const Vec&, const std::vector<double>&, const ThetaVector&) {
                        return 1.0;
                      }};
}

double EstimatorConfig::resolve_m(const Window& w, const MoveModel& move) const {
  if (fixed_m) return *fixed_m;
  if (move.family == MoveFamily::Uniform) {
    // Compact support: the support radius makes the site clause sufficient.
    double r = 0;
    for (int k = 0; k < move.dim; ++k)
      r = std::max(r, std::max(std::abs(move.support.lower[k]), std::abs(move.support.upper[k])));
    return r;
  }
  return beta * std::log(w.volume());
}

// ---------------------------------------------------------------------------
// DlrEngine

DlrEngine::DlrEngine(const Observation& obs, const GibbsModel& gm, const EstimatorConfig& cfg,
                     double theta1_lo, double theta1_hi, bool keep_positions)
    : keep_positions_(keep_positions), move_(gm.move) {
  if (obs.framework != Framework::F1)
    throw DataError("border-corrected estimating equations need framework-1 data");
  obs.validate();
  dim_ = gm.dim();
  p1_ = gm.move.p1();
  p2_ = gm.interaction.p2();
  p_ = p1_ + p2_;
  if (p2_ > 6) throw ConfigError("at most 6 interaction bands are supported by the fit cache");
  wvol_ = obs.window.volume();

  const double range = gm.interaction.range();
  const double m = cfg.resolve_m(obs.window, gm.move);
  const Window site_win = erode(obs.window, m + range);
  const Window point_win = erode(obs.window, range);
  if (site_win.empty)
    throw DataError("insufficient data: eroded window is empty (m=" + std::to_string(m) + ")");

  CellGrid grid;
  grid.init(obs.window, std::max(range, 1e-6));
  for (size_t k = 0; k < obs.points.size(); ++k) grid.insert(static_cast<int>(k), obs.points[k]);

  RefineParams rp;
  rp.theta1_lo = theta1_lo;
  rp.theta1_hi = theta1_hi;
  rp.cell_err_tol = cfg.refine_tol;
  rp.max_depth = cfg.refine_depth;

  PointsView others;
  others.pts = &obs.points;
  others.grid = &grid;

  std::vector<int> counts(static_cast<size_t>(p2_));
  for (size_t k = 0; k < obs.sites.size(); ++k) {
    const Vec site = obs.sites[k];
    const Vec pt = obs.points[k];
    if (!site_win.contains(site) || !point_win.contains(pt)) continue;

    others.exclude = static_cast<int>(k);
    SiteData sd;
    sd.site = site;
    sd.xobs = obs.disps[k];
    const JointStatistic js = joint_statistic(gm, site, obs.disps[k], others);
    if (js.hardcore)
      throw DataError("observed pattern violates the hard-core radius of the fitted model");
    sd.s_obs = js.s;

    Window clip = point_win;
    for (int c = 0; c < dim_; ++c) {
      clip.lower[c] -= site[c];
      clip.upper[c] -= site[c];
    }
    const std::vector<CellBox> cells =
        refine_cells_for_site(gm, site, others, cfg.quad_resolution, clip, rp);

    // Distinct per-axis edge coordinates (bitwise equality is safe: child
    // edges are midpoints computed identically across sibling cells).
    for (int c = 0; c < dim_; ++c) {
      std::vector<double>& coords = sd.axis_coords[static_cast<size_t>(c)];
      coords.reserve(2 * cells.size());
      for (const CellBox& cb : cells) {
        coords.push_back(cb.lo[c]);
        coords.push_back(cb.hi[c]);
      }
      std::sort(coords.begin(), coords.end());
      coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
      if (coords.size() > 60000) throw NumericError("site quadrature mesh too fine to index");
    }

    sd.begin = entries_.size();
    for (const CellBox& cb : cells) {
      Vec center;
      for (int c = 0; c < dim_; ++c) center[c] = 0.5 * (cb.lo[c] + cb.hi[c]);
      const Vec y = add(site, center, dim_);
      const bool ok = accumulate_bands(gm.interaction, y, others, dim_, counts.data());
      if (!ok) continue;  // hard-core cells carry no conditional mass
      Entry e{};
      for (int c = 0; c < dim_; ++c) {
        const std::vector<double>& coords = sd.axis_coords[static_cast<size_t>(c)];
        const auto lo = std::lower_bound(coords.begin(), coords.end(), cb.lo[c]);
        const auto hi = std::lower_bound(coords.begin(), coords.end(), cb.hi[c]);
        e.edge[static_cast<size_t>(2 * c)] = static_cast<uint16_t>(lo - coords.begin());
        e.edge[static_cast<size_t>(2 * c + 1)] = static_cast<uint16_t>(hi - coords.begin());
      }
      for (int j = 0; j < p2_; ++j) {
        if (counts[static_cast<size_t>(j)] > 250)
          throw DataError("interaction band count overflow (pattern too dense)");
        e.counts[static_cast<size_t>(j)] = static_cast<uint8_t>(counts[static_cast<size_t>(j)]);
      }
      e.hc = 0;
      entries_.push_back(e);
      if (keep_positions_) {
        std::array<float, kMaxDim> xf{};
        for (int c = 0; c < dim_; ++c) xf[static_cast<size_t>(c)] = static_cast<float>(center[c]);
        positions_.push_back(xf);
      }
    }
    sd.end = entries_.size();
    if (sd.end == sd.begin)
      throw NumericError("degenerate site: no usable quadrature mass at " +
                         std::to_string(site[0]));
    sd.min_count = 255;
    sd.max_count = 0;
    for (size_t q = sd.begin; q < sd.end; ++q) {
      const int c = entries_[q].counts[0];
      sd.min_count = std::min(sd.min_count, c);
      sd.max_count = std::max(sd.max_count, c);
    }
    sites_.push_back(std::move(sd));
  }
  if (sites_.empty()) throw DataError("insufficient data: no usable sites after border correction");
}

void DlrEngine::fill_axis_tables(const SiteData& sd, double theta1, AxisTables* tables) const {
  for (int c = 0; c < dim_; ++c) {
    move_axis_cumulatives(move_, theta1, c, sd.axis_coords[static_cast<size_t>(c)],
                          &tables->g0[static_cast<size_t>(c)],
                          p1_ == 1 ? &tables->gs[static_cast<size_t>(c)] : nullptr);
  }
}

double DlrEngine::site_logz_means(const SiteData& sd, const ThetaVector& theta,
                                  double* mean_s) const {
  AxisTables tables;
  fill_axis_tables(sd, p1_ == 1 ? theta.theta1[0] : 0.0, &tables);

  double z = 0;
  if (mean_s)
    for (int j = 0; j < p_; ++j) mean_s[j] = 0;
  std::array<double, kMaxDim> dg0{}, dgs{};

  if (p2_ == 1) {
    // single band: the exponent is theta2 * count with count <= 250, so the
    // log-sum-exp shift and the exponentials collapse into a small table
    const double t2 = theta.theta2[0];
    const double emin = t2 >= 0 ? t2 * sd.min_count : t2 * sd.max_count;
    double etab[256];
    for (int c = sd.min_count; c <= sd.max_count; ++c) etab[c] = std::exp(emin - t2 * c);
    for (size_t q = sd.begin; q < sd.end; ++q) {
      const Entry& e = entries_[q];
      double w = 1.0;
      for (int c = 0; c < dim_; ++c) {
        const auto& g0 = tables.g0[static_cast<size_t>(c)];
        dg0[static_cast<size_t>(c)] = g0[e.edge[static_cast<size_t>(2 * c + 1)]] -
                                      g0[e.edge[static_cast<size_t>(2 * c)]];
        w *= dg0[static_cast<size_t>(c)];
      }
      if (!(w > 0.0)) continue;
      const double ex = etab[e.counts[0]];
      const double val = w * ex;
      z += val;
      if (mean_s) {
        if (p1_ == 1) {
          double s1w = 0;
          for (int c = 0; c < dim_; ++c) {
            const auto& gs = tables.gs[static_cast<size_t>(c)];
            dgs[static_cast<size_t>(c)] = gs[e.edge[static_cast<size_t>(2 * c + 1)]] -
                                          gs[e.edge[static_cast<size_t>(2 * c)]];
          }
          for (int c = 0; c < dim_; ++c) {
            double term = dgs[static_cast<size_t>(c)];
            for (int c2 = 0; c2 < dim_; ++c2)
              if (c2 != c) term *= dg0[static_cast<size_t>(c2)];
            s1w += term;
          }
          mean_s[0] += s1w * ex;
        }
        mean_s[p1_] += val * e.counts[0];
      }
    }
    if (!(z > 0))
      throw NumericError("degenerate site: vanished conditional mass during evaluation");
    if (mean_s)
      for (int j = 0; j < p_; ++j) mean_s[j] /= z;
    return std::log(z) - emin;
  }

  double emin = kInf;
  for (size_t q = sd.begin; q < sd.end; ++q) {
    const Entry& e = entries_[q];
    double t = 0;
    for (int j = 0; j < p2_; ++j)
      t += theta.theta2[static_cast<size_t>(j)] * e.counts[static_cast<size_t>(j)];
    if (t < emin) emin = t;
  }
  for (size_t q = sd.begin; q < sd.end; ++q) {
    const Entry& e = entries_[q];
    double w = 1.0;
    for (int c = 0; c < dim_; ++c) {
      const auto& g0 = tables.g0[static_cast<size_t>(c)];
      dg0[static_cast<size_t>(c)] = g0[e.edge[static_cast<size_t>(2 * c + 1)]] -
                                    g0[e.edge[static_cast<size_t>(2 * c)]];
      w *= dg0[static_cast<size_t>(c)];
    }
    if (!(w > 0.0)) continue;
    double t = 0;
    for (int j = 0; j < p2_; ++j)
      t += theta.theta2[static_cast<size_t>(j)] * e.counts[static_cast<size_t>(j)];
    const double val = w * std::exp(emin - t);
    z += val;
    if (mean_s) {
      if (p1_ == 1) {
        double s1w = 0;
        for (int c = 0; c < dim_; ++c) {
          const auto& gs = tables.gs[static_cast<size_t>(c)];
          dgs[static_cast<size_t>(c)] = gs[e.edge[static_cast<size_t>(2 * c + 1)]] -
                                        gs[e.edge[static_cast<size_t>(2 * c)]];
        }
        for (int c = 0; c < dim_; ++c) {
          double term = dgs[static_cast<size_t>(c)];
          for (int c2 = 0; c2 < dim_; ++c2)
            if (c2 != c) term *= dg0[static_cast<size_t>(c2)];
          s1w += term;
        }
        mean_s[0] += s1w * std::exp(emin - t);
      }
      for (int j = 0; j < p2_; ++j)
        mean_s[p1_ + j] += val * e.counts[static_cast<size_t>(j)];
    }
  }
  if (!(z > 0))
    throw NumericError("degenerate site: vanished conditional mass during evaluation");
  if (mean_s)
    for (int j = 0; j < p_; ++j) mean_s[j] /= z;
  return std::log(z) - emin;
}

std::vector<double> DlrEngine::dlr_score(const ThetaVector& theta) const {
  std::vector<double> out(static_cast<size_t>(p_), 0.0);
  std::vector<double> mean_s(static_cast<size_t>(p_));
  for (const SiteData& sd : sites_) {
    site_logz_means(sd, theta, mean_s.data());
    for (int j = 0; j < p_; ++j)
      out[static_cast<size_t>(j)] += sd.s_obs[static_cast<size_t>(j)] - mean_s[static_cast<size_t>(j)];
  }
  return out;
}

double DlrEngine::lpl(const ThetaVector& theta) const {
  double acc = 0;
  const std::vector<double> tflat = theta.flat();
  const double c1 = p1_ == 1 ? move_.log_partition_at(theta.theta1[0]) : move_.log_partition_at(0.0);
  for (const SiteData& sd : sites_) {
    const double logz = site_logz_means(sd, theta, nullptr);
    double ts = 0;
    for (int j = 0; j < p_; ++j) ts += tflat[static_cast<size_t>(j)] * sd.s_obs[static_cast<size_t>(j)];
    acc += -ts - logz - c1;
  }
  return acc;
}

void DlrEngine::lpl_with_gradient(const ThetaVector& theta, double* lpl_out,
                                  std::vector<double>* grad_out) const {
  double acc = 0;
  std::vector<double> grad(static_cast<size_t>(p_), 0.0);
  std::vector<double> mean_s(static_cast<size_t>(p_));
  const std::vector<double> tflat = theta.flat();
  const double c1 = p1_ == 1 ? move_.log_partition_at(theta.theta1[0]) : move_.log_partition_at(0.0);
  for (const SiteData& sd : sites_) {
    const double logz = site_logz_means(sd, theta, mean_s.data());
    double ts = 0;
    for (int j = 0; j < p_; ++j) {
      ts += tflat[static_cast<size_t>(j)] * sd.s_obs[static_cast<size_t>(j)];
      grad[static_cast<size_t>(j)] +=
          mean_s[static_cast<size_t>(j)] - sd.s_obs[static_cast<size_t>(j)];
    }
    acc += -ts - logz - c1;
  }
  if (lpl_out) *lpl_out = acc;
  if (grad_out) *grad_out = std::move(grad);
}

double DlrEngine::dlr_general(const ThetaVector& theta, const TestFunction& f) const {
  const auto [a, b] = ab_sums(theta, f);
  return a - b;
}

std::pair<double, double> DlrEngine::ab_sums(const ThetaVector& theta,
                                             const TestFunction& f) const {
  double a = 0, b = 0;
  std::vector<double> s_node(static_cast<size_t>(p_));
  Vec x;
  std::array<double, kMaxDim> dg0{}, dgs{};
  for (const SiteData& sd : sites_) {
    a += f.eval(sd.site, sd.xobs, sd.s_obs, theta);

    AxisTables tables;
    fill_axis_tables(sd, p1_ == 1 ? theta.theta1[0] : 0.0, &tables);
    double emin = kInf;
    for (size_t q = sd.begin; q < sd.end; ++q) {
      const Entry& e = entries_[q];
      double t = 0;
      for (int j = 0; j < p2_; ++j)
        t += theta.theta2[static_cast<size_t>(j)] * e.counts[static_cast<size_t>(j)];
      if (t < emin) emin = t;
    }
    double z = 0, num = 0;
    for (size_t q = sd.begin; q < sd.end; ++q) {
      const Entry& e = entries_[q];
      double w = 1.0;
      for (int c = 0; c < dim_; ++c) {
        const auto& g0 = tables.g0[static_cast<size_t>(c)];
        dg0[static_cast<size_t>(c)] = g0[e.edge[static_cast<size_t>(2 * c + 1)]] -
                                      g0[e.edge[static_cast<size_t>(2 * c)]];
        w *= dg0[static_cast<size_t>(c)];
      }
      if (!(w > 0.0)) continue;
      double t = 0;
      for (int j = 0; j < p2_; ++j)
        t += theta.theta2[static_cast<size_t>(j)] * e.counts[static_cast<size_t>(j)];
      const double val = w * std::exp(emin - t);
      z += val;
      if (p1_ == 1) {
        double s1w = 0;
        for (int c = 0; c < dim_; ++c) {
          const auto& gs = tables.gs[static_cast<size_t>(c)];
          dgs[static_cast<size_t>(c)] = gs[e.edge[static_cast<size_t>(2 * c + 1)]] -
                                        gs[e.edge[static_cast<size_t>(2 * c)]];
        }
        for (int c = 0; c < dim_; ++c) {
          double term = dgs[static_cast<size_t>(c)];
          for (int c2 = 0; c2 < dim_; ++c2)
            if (c2 != c) term *= dg0[static_cast<size_t>(c2)];
          s1w += term;
        }
        s_node[0] = s1w / w;  // cell-averaged move statistic
      }
      for (int j = 0; j < p2_; ++j)
        s_node[static_cast<size_t>(p1_ + j)] = e.counts[static_cast<size_t>(j)];
      if (keep_positions_) {
        const auto& xf = positions_[q];
        for (int c = 0; c < dim_; ++c) x[c] = xf[static_cast<size_t>(c)];
      }
      num += val * f.eval(sd.site, x, s_node, theta);
    }
    if (!(z > 0)) throw NumericError("degenerate site: vanished conditional mass");
    b += num / z;
  }
  return {a, b};
}

// ---------------------------------------------------------------------------
// One-shot wrappers

namespace {

// Fixed bounds (when configured) keep the cell decomposition identical
// across calls, so repeated evaluations differentiate one function.
std::pair<double, double> refine_theta_span(const GibbsModel& gm, const ThetaVector& theta,
                                            const EstimatorConfig& cfg) {
  if (gm.move.p1() == 0) return {1.0, 1.0};
  if (cfg.theta_lo && cfg.theta_hi && !cfg.theta_lo->empty())
    return {(*cfg.theta_lo)[0], (*cfg.theta_hi)[0]};
  return {theta.theta1[0], theta.theta1[0]};
}

}  // namespace

double dlr_statistic(const Observation& obs, const GibbsModel& gm, const ThetaVector& theta,
                     const TestFunction& f, const EstimatorConfig& cfg) {
  const auto [lo, hi] = refine_theta_span(gm, theta, cfg);
  DlrEngine engine(obs, gm, cfg, lo, hi, true);
  return engine.dlr_general(theta, f);
}

double tf_criterion(const Observation& obs, const GibbsModel& gm, const ThetaVector& theta,
                    const std::vector<TestFunction>& bank, const EstimatorConfig& cfg) {
  if (static_cast<int>(bank.size()) < gm.p())
    throw ConfigError("test-function bank must have at least p members");
  const auto [lo, hi] = refine_theta_span(gm, theta, cfg);
  DlrEngine engine(obs, gm, cfg, lo, hi, true);
  double acc = 0;
  for (const TestFunction& f : bank) {
    const double d = engine.dlr_general(theta, f);
    acc += d * d;
  }
  return acc;
}

std::pair<double, std::vector<double>> lpl_and_gradient(const Observation& obs,
                                                        const GibbsModel& gm,
                                                        const ThetaVector& theta,
                                                        const EstimatorConfig& cfg) {
  const auto [lo, hi] = refine_theta_span(gm, theta, cfg);
  DlrEngine engine(obs, gm, cfg, lo, hi, false);
  double l = 0;
  std::vector<double> g;
  engine.lpl_with_gradient(theta, &l, &g);
  return {l, g};
}

std::vector<double> default_theta_init(const Observation& obs, const GibbsModel& gm) {
  std::vector<double> init;
  if (gm.move.p1() == 1) {
    if (obs.framework != Framework::F1)
      throw DataError("moment initialization of theta1 needs framework-1 displacements");
    double acc = 0;
    for (const Vec& x : obs.disps) acc += gm.move.s1_scalar(x);
    const double ms = acc / std::max<size_t>(1, obs.disps.size());
    double t1;
    if (gm.move.family == MoveFamily::GaussianIsotropic)
      t1 = gm.dim() / (2.0 * std::max(ms, 1e-12));
    else
      t1 = gm.dim() / std::max(ms, 1e-12);
    init.push_back(std::clamp(t1, 1e-3, 1e6));
  }
  for (int j = 0; j < gm.interaction.p2(); ++j) init.push_back(0.0);
  return init;
}

void default_theta_bounds(const std::vector<double>& init, const GibbsModel& gm,
                          std::vector<double>* lo, std::vector<double>* hi) {
  lo->clear();
  hi->clear();
  size_t k = 0;
  if (gm.move.p1() == 1) {
    // The moment start is accurate to a few percent; a factor-2 box keeps
    // the integration mesh small while still catching runaway fits at the
    // bound.
    lo->push_back(init[k] / 2.0);
    hi->push_back(init[k] * 2.0);
    ++k;
  }
  for (int j = 0; j < gm.interaction.p2(); ++j) {
    lo->push_back(-3.0);
    hi->push_back(50.0);
  }
}

FitResult fit_takacs_fiksel(const Observation& obs, const GibbsModel& gm,
                            const EstimatorConfig& cfg) {
  gm.validate();
  const int p = gm.p();
  const std::vector<double> init = cfg.theta_init ? *cfg.theta_init : default_theta_init(obs, gm);
  if (static_cast<int>(init.size()) != p) throw ConfigError("theta_init has wrong length");
  std::vector<double> lo, hi;
  if (cfg.theta_lo && cfg.theta_hi) {
    lo = *cfg.theta_lo;
    hi = *cfg.theta_hi;
  } else {
    default_theta_bounds(init, gm, &lo, &hi);
  }
  if (static_cast<int>(lo.size()) != p || static_cast<int>(hi.size()) != p)
    throw ConfigError("theta bounds have wrong length");
  for (int j = 0; j < p; ++j)
    if (!(lo[static_cast<size_t>(j)] <= init[static_cast<size_t>(j)] &&
          init[static_cast<size_t>(j)] <= hi[static_cast<size_t>(j)]))
      throw ConfigError("theta_init must lie inside the bounds");

  const int p1 = gm.move.p1();
  const double t1lo = p1 == 1 ? lo[0] : 1.0;
  const double t1hi = p1 == 1 ? hi[0] : 1.0;
  const bool custom = cfg.bank == BankKind::Custom;
  const std::vector<TestFunction> bank = custom ? cfg.custom_bank : score_bank(p);
  if (static_cast<int>(bank.size()) < p)
    throw ConfigError("test-function bank must have at least p members");
  DlrEngine engine(obs, gm, cfg, t1lo, t1hi, custom);

  auto criterion = [&](const std::vector<double>& tflat) {
    const ThetaVector th = ThetaVector::from_flat(tflat, p1);
    double acc = 0;
    if (custom) {
      for (const TestFunction& f : bank) {
        const double d = engine.dlr_general(th, f);
        acc += d * d;
      }
    } else {
      for (double d : engine.dlr_score(th)) acc += d * d;
    }
    return acc;
  };

  OptimResult opt;
  if (cfg.optimizer == OptimizerKind::Simplex) {
    opt = nelder_mead(criterion, init, lo, hi, cfg.ftol, cfg.max_iter);
  } else {
    if (custom) throw ConfigError("gradient optimizer supports the score bank only");
    auto negative_lpl = [&](const std::vector<double>& tflat, std::vector<double>* grad) {
      const ThetaVector th = ThetaVector::from_flat(tflat, p1);
      double l = 0;
      if (grad) {
        engine.lpl_with_gradient(th, &l, grad);
        for (double& g : *grad) g = -g;
        return -l;
      }
      return -engine.lpl(th);
    };
    opt = projected_gradient(negative_lpl, init, lo, hi, cfg.ftol, cfg.max_iter);
    opt.value = criterion(opt.x);
  }

  FitResult res;
  res.theta_hat = ThetaVector::from_flat(opt.x, p1);
  res.criterion = criterion(opt.x);
  res.converged = opt.converged;
  res.n_sites_used = engine.n_sites();
  for (int j = 0; j < p; ++j) {
    const double span = hi[static_cast<size_t>(j)] - lo[static_cast<size_t>(j)];
    if (std::min(opt.x[static_cast<size_t>(j)] - lo[static_cast<size_t>(j)],
                 hi[static_cast<size_t>(j)] - opt.x[static_cast<size_t>(j)]) < 1e-6 * span)
      res.at_bound = true;
  }
  if (custom) {
    for (const TestFunction& f : bank) {
      res.residuals.push_back(engine.dlr_general(res.theta_hat, f) / engine.window_volume());
      res.residual_names.push_back(f.name);
    }
  } else {
    const std::vector<double> d = engine.dlr_score(res.theta_hat);
    for (int j = 0; j < p; ++j) {
      res.residuals.push_back(d[static_cast<size_t>(j)] / engine.window_volume());
      res.residual_names.push_back(bank[static_cast<size_t>(j)].name);
    }
  }
  return res;
}

}  // namespace gibbslat
