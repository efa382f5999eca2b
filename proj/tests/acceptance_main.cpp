// Acceptance gate: end-to-end checks of the sampler, estimators and
// diagnostics at study scale. Each criterion prints one PASS/FAIL line with
// the measured quantities; the exit code is nonzero if any failed.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <thread>
#include <vector>

#include "gibbslat/diagnostics.hpp"
#include "gibbslat/experiment.hpp"
#include "gibbslat/parallel.hpp"

using namespace gibbslat;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %-34s %s\n", ok ? "PASS" : "FAIL", criterion, name,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

int jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 4 : static_cast<int>(hw);
}

GibbsModel gaussian_strauss(double theta1, double theta2, double range) {
  GibbsModel gm;
  gm.move = MoveModel::gaussian(2, theta1);
  gm.interaction = InteractionModel::strauss(0.0, range, theta2);
  gm.lattice = LatticeSpec::integer(2);
  return gm;
}

// Acceptance-scale chain lengths: these regimes equilibrate in O(100)
// sweeps (validated against the exact two-site law and the independent
// no-interaction draw), so 2500 + 500 keeps the suite inside its budget.
constexpr int kBurnIn = 2500;
constexpr int kSweeps = 500;

struct Study {
  std::vector<FitResult> fits;
  std::vector<std::string> errors;
  std::vector<Observation> observations;
};

Study run_study(const GibbsModel& gm, double ell, int K, uint64_t seed, bool keep_obs) {
  Study st;
  st.fits.resize(static_cast<size_t>(K));
  st.errors.assign(static_cast<size_t>(K), "");
  if (keep_obs) st.observations.resize(static_cast<size_t>(K));
  parallel_for(K, jobs(), [&](int rep) {
    try {
      SimulationPlan plan;
      plan.model = gm;
      plan.obs_window = Window::cube(2, ell);
      plan.sim_window = SimulationPlan::default_sim_window(plan.obs_window, gm);
      plan.burn_in = kBurnIn;
      plan.sweeps = kSweeps;
      plan.seed = child_seed(seed, static_cast<uint64_t>(rep));
      const SimulateResult sim = simulate(plan);
      const Observation obs = Observation::from_f1(sim.f1, sim.shift);
      EstimatorConfig cfg;
      st.fits[static_cast<size_t>(rep)] = fit_takacs_fiksel(obs, gm, cfg);
      if (keep_obs) st.observations[static_cast<size_t>(rep)] = obs;
    } catch (const std::exception& e) {
      st.errors[static_cast<size_t>(rep)] = e.what();
    }
  });
  return st;
}

std::vector<double> component(const Study& st, int j) {
  std::vector<double> xs;
  for (size_t k = 0; k < st.fits.size(); ++k)
    if (st.errors[k].empty()) xs.push_back(st.fits[k].theta_hat.flat()[static_cast<size_t>(j)]);
  return xs;
}

double rmse_of(const std::vector<double>& xs, double truth) {
  double acc = 0;
  for (double x : xs) acc += (x - truth) * (x - truth);
  return std::sqrt(acc / std::max<size_t>(1, xs.size()));
}

double ks_vs_cdf(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (size_t k = 0; k < xs.size(); ++k) {
    const double f = cdf(xs[k]);
    d = std::max(d, std::abs(f - static_cast<double>(k) / n));
    d = std::max(d, std::abs(f - static_cast<double>(k + 1) / n));
  }
  return d;
}

}  // namespace

int main() {
  const double kTheta2Easy = std::log(2.0);        // 0.6931
  const double kTheta2Weak = std::log(10.0 / 9.0); // 0.1054
  const double kTheta2Hard = std::log(10.0);       // 2.3026

  // Shared replicate studies (regimes from the reproduction experiment).
  const GibbsModel regimeA = gaussian_strauss(1.0, kTheta2Easy, 0.5);
  const GibbsModel regimeB = gaussian_strauss(4.0, kTheta2Weak, 0.5);

  const Study a12 = run_study(regimeA, 12.0, 50, 101, true);
  const Study a8 = run_study(regimeA, 8.0, 50, 102, false);
  const Study b12 = run_study(regimeB, 12.0, 50, 103, false);
  const Study b8 = run_study(regimeB, 8.0, 50, 104, false);

  // 1. easy-regime reproduction at ell = 12
  {
    const std::vector<double> t1 = component(a12, 0);
    const std::vector<double> t2 = component(a12, 1);
    const double m1 = mean(t1), m2 = mean(t2);
    const double s1 = sample_sd(t1), s2 = sample_sd(t2);
    const bool ok = t1.size() == 50 && m1 >= 0.85 && m1 <= 1.15 && m2 >= 0.45 && m2 <= 0.95 &&
                    s1 <= 0.08 && s2 <= 0.34;
    report(1, "table regime (1, 0.69), ell=12", ok,
           fmt("mean=(%.3f, %.3f) in [0.85,1.15]x[0.45,0.95], sd=(%.3f, %.3f) <= (0.08, 0.34)",
               m1, m2, s1, s2));
  }

  // 2. second-regime reproduction at ell = 12
  {
    const std::vector<double> t1 = component(b12, 0);
    const std::vector<double> t2 = component(b12, 1);
    const double m1 = mean(t1), m2 = mean(t2);
    const bool ok =
        t1.size() == 50 && m1 >= 3.6 && m1 <= 4.4 && m2 >= -0.15 && m2 <= 0.30;
    report(2, "table regime (4, 0.105), ell=12", ok,
           fmt("mean=(%.3f, %.3f) in [3.6,4.4]x[-0.15,0.30]", m1, m2));
  }

  // 3. RMSE decay in the window size for theta1
  {
    const double ra12 = rmse_of(component(a12, 0), 1.0);
    const double ra8 = rmse_of(component(a8, 0), 1.0);
    const double rb12 = rmse_of(component(b12, 0), 4.0);
    const double rb8 = rmse_of(component(b8, 0), 4.0);
    const bool ok = ra12 < ra8 && rb12 < rb8;
    report(3, "rmse(ell=12) < rmse(ell=8)", ok,
           fmt("regime A: %.4f < %.4f, regime B: %.4f < %.4f", ra12, ra8, rb12, rb8));
  }

  // 4. known-hard regime diverges in at least half the replicates
  {
    const GibbsModel hard = gaussian_strauss(4.0, kTheta2Hard, 1.5);
    const Study h8 = run_study(hard, 8.0, 20, 105, false);
    const std::vector<double> truth = hard.theta().flat();
    int n_div = 0;
    for (size_t k = 0; k < h8.fits.size(); ++k) {
      if (!h8.errors[k].empty() || divergence_flag(h8.fits[k], truth)) ++n_div;
    }
    const bool ok = n_div >= 10;
    report(4, "hard regime (4, 2.30, R=1.5) flags", ok, fmt("diverged %d/20 >= 10", n_div));
  }

  // 5. two-site conditional law against the quadrature oracle
  {
    GibbsModel gm;
    gm.move = MoveModel::uniform(Window::cube(1, 0.4));
    gm.interaction = InteractionModel::strauss(0.0, 0.6, 1.0);
    gm.lattice = LatticeSpec::integer(1);
    MhSampler chain(gm, Window::box(1, Vec::fill(1, -0.5), Vec::fill(1, 1.5)),
                    GlobalShift{Vec::zero()});
    chain.set_displacement(1, Vec::fill(1, -0.2));
    Rng rng(106);
    std::vector<double> xs;
    xs.reserve(100000);
    for (int it = 0; it < 100000; ++it) {
      chain.site_update(0, rng);
      xs.push_back(chain.config().disp[0][0]);
    }
    // normalized conditional density: 1 on [-0.4, 0.2), e^{-1} on [0.2, 0.4]
    const double norm = 0.6 + 0.2 * std::exp(-1.0);
    auto cdf = [norm](double x) {
      if (x < -0.4) return 0.0;
      if (x < 0.2) return (x + 0.4) / norm;
      if (x < 0.4) return (0.6 + (x - 0.2) * std::exp(-1.0)) / norm;
      return 1.0;
    };
    const double ks = ks_vs_cdf(xs, cdf);
    report(5, "two-site sampler exactness", ks < 0.02, fmt("KS=%.4f < 0.02", ks));
  }

  // 6. DLR unbiasedness at the truth over the regime-A replicates
  {
    EstimatorConfig cfg;
    const ThetaVector truth = regimeA.theta();
    const std::vector<TestFunction> bank = score_bank(2);
    const int K = static_cast<int>(a12.observations.size());
    std::vector<double> r1(static_cast<size_t>(K)), r2(static_cast<size_t>(K));
    std::vector<char> used(static_cast<size_t>(K), 0);
    parallel_for(K, jobs(), [&](int rep) {
      if (!a12.errors[static_cast<size_t>(rep)].empty()) return;
      const Observation& obs = a12.observations[static_cast<size_t>(rep)];
      const ResidualReport rr = residual_report(obs, regimeA, truth, bank, cfg);
      r1[static_cast<size_t>(rep)] = rr.scaled_residual[0];
      r2[static_cast<size_t>(rep)] = rr.scaled_residual[1];
      used[static_cast<size_t>(rep)] = 1;
    });
    std::vector<double> v1, v2;
    for (int rep = 0; rep < K; ++rep)
      if (used[static_cast<size_t>(rep)]) {
        v1.push_back(r1[static_cast<size_t>(rep)]);
        v2.push_back(r2[static_cast<size_t>(rep)]);
      }
    const double n = static_cast<double>(v1.size());
    const double z1 = std::abs(mean(v1)) / (sample_sd(v1) / std::sqrt(n));
    const double z2 = std::abs(mean(v2)) / (sample_sd(v2) / std::sqrt(n));
    const bool ok = z1 <= 4.0 && z2 <= 4.0;
    report(6, "scaled DLR at truth is centered", ok,
           fmt("|mean|/SE = (%.2f, %.2f) <= 4 over %d replicates", z1, z2,
               static_cast<int>(n)));
  }

  // 7. gradient correctness and the score identity
  {
    const GibbsModel gm = gaussian_strauss(2.0, 0.4, 0.5);
    SimulationPlan plan;
    plan.model = gm;
    plan.obs_window = Window::cube(2, 8.0);
    plan.sim_window = SimulationPlan::default_sim_window(plan.obs_window, gm);
    plan.burn_in = kBurnIn;
    plan.sweeps = kSweeps;
    plan.seed = 107;
    const SimulateResult sim = simulate(plan);
    const Observation obs = Observation::from_f1(sim.f1, sim.shift);
    EstimatorConfig cfg;
    cfg.beta = 0.75;
    cfg.theta_lo = std::vector<double>{0.8, -1.0};
    cfg.theta_hi = std::vector<double>{3.5, 1.8};
    const std::vector<TestFunction> bank = score_bank(2);
    Rng rng(108);
    double worst_fd = 0, worst_id = 0;
    for (int it = 0; it < 20; ++it) {
      const ThetaVector th{{1.0 + 2.0 * rng.uniform()}, {-0.5 + 1.5 * rng.uniform()}};
      const auto [lpl, grad] = lpl_and_gradient(obs, gm, th, cfg);
      (void)lpl;
      for (int j = 0; j < 2; ++j) {
        const double h = 1e-5;
        ThetaVector up = th, dn = th;
        (j == 0 ? up.theta1[0] : up.theta2[0]) += h;
        (j == 0 ? dn.theta1[0] : dn.theta2[0]) -= h;
        const double fd = (lpl_and_gradient(obs, gm, up, cfg).first -
                           lpl_and_gradient(obs, gm, dn, cfg).first) /
                          (2 * h);
        worst_fd = std::max(worst_fd, std::abs(fd - grad[static_cast<size_t>(j)]) /
                                          std::max(1.0, std::abs(grad[static_cast<size_t>(j)])));
        const double dlr = dlr_statistic(obs, gm, th, bank[static_cast<size_t>(j)], cfg);
        worst_id = std::max(worst_id, std::abs(grad[static_cast<size_t>(j)] + dlr) /
                                          std::max(1.0, std::abs(dlr)));
      }
    }
    const bool ok = worst_fd < 1e-4 && worst_id <= 1e-10;
    report(7, "LPL gradient: FD and score identity", ok,
           fmt("max FD rel err %.2e < 1e-4, max identity gap %.2e <= 1e-10", worst_fd,
               worst_id));
  }

  // 8. conditional-intensity normalization and refinement decay
  {
    double worst = 0, mean_def = 0, mean_ref = 0;
    const int trials = 200;
    std::vector<double> errs_def(trials), errs_ref(trials);
    parallel_for(trials, jobs(), [&](int it) {
      Rng local(child_seed(109, static_cast<uint64_t>(it)));
      const double th1 = 0.5 + 3.5 * local.uniform();
      const double th2 = 1.5 * local.uniform();
      const double range = 0.3 + 0.7 * local.uniform();
      const double hc = local.uniform() < 0.5 ? 0.0 : 0.3 * range;
      GibbsModel gm = gaussian_strauss(th1, th2, range);
      gm.interaction.hardcore_r = hc;
      const ThetaVector th{{th1}, {th2}};
      std::vector<Vec> others;
      const int n = 3 + static_cast<int>(local.below(8));
      for (int k = 0; k < n; ++k) {
        const double r = (range + 1.0) * local.uniform() + 0.5 * hc;
        const double a = 2 * M_PI * local.uniform();
        Vec p;
        p[0] = r * std::cos(a);
        p[1] = r * std::sin(a);
        others.push_back(p);
      }
      PointsView pv;
      pv.pts = &others;
      const RefineParams def = RefineParams::normalization_grade(th1, th1);
      RefineParams refd = def;
      refd.cell_err_tol /= 4.0;
      refd.max_depth += 1;
      const RefineParams reference{th1, th1, 1e-9, 14};
      const Vec site = Vec::zero();
      const double zr = partition_z_cells(gm, th, site, pv, 180, std::nullopt, reference);
      errs_def[static_cast<size_t>(it)] =
          std::abs(partition_z_cells(gm, th, site, pv, 60, std::nullopt, def) / zr - 1.0);
      errs_ref[static_cast<size_t>(it)] =
          std::abs(partition_z_cells(gm, th, site, pv, 120, std::nullopt, refd) / zr - 1.0);
    });
    for (int it = 0; it < trials; ++it) {
      worst = std::max(worst, errs_def[static_cast<size_t>(it)]);
      mean_def += errs_def[static_cast<size_t>(it)] / trials;
      mean_ref += errs_ref[static_cast<size_t>(it)] / trials;
    }
    const bool ok = worst <= 2e-4 && mean_ref <= 0.5 * mean_def;
    report(8, "normalization of the conditional law", ok,
           fmt("max |int - 1| = %.2e <= 2e-4, refined mean %.2e <= half of %.2e", worst,
               mean_ref, mean_def));
  }

  // 9. hyperuniformity signal in the count-variance curve
  {
    const int K = 200;
    std::vector<PointPattern> pats(static_cast<size_t>(K));
    parallel_for(K, jobs(), [&](int rep) {
      SimulationPlan plan;
      plan.model = regimeA;
      plan.obs_window = Window::cube(2, 13.0);
      plan.sim_window = SimulationPlan::default_sim_window(plan.obs_window, regimeA);
      plan.burn_in = kBurnIn;
      plan.sweeps = kSweeps;
      plan.seed = child_seed(110, static_cast<uint64_t>(rep));
      pats[static_cast<size_t>(rep)] = simulate(plan).f2;
    });
    const VarianceCurve curve = variance_curve(pats, {3.0, 12.0});
    const bool ok = curve.ratios[1] < 0.5 * curve.ratios[0];
    report(9, "variance ratio falls with radius", ok,
           fmt("ratio(12)=%.4f < 0.5 * ratio(3)=%.4f", curve.ratios[1], 0.5 * curve.ratios[0]));
  }

  // 10. variational and Takacs-Fiksel estimates agree on uniform moves
  {
    GibbsModel gm;
    gm.move = MoveModel::uniform(Window::cube(2, 0.5));
    gm.interaction = InteractionModel::strauss(0.0, 0.5, kTheta2Easy);
    gm.lattice = LatticeSpec::integer(2);
    const int K = 50;
    std::vector<double> tf_hat(static_cast<size_t>(K)), var_hat(static_cast<size_t>(K));
    parallel_for(K, jobs(), [&](int rep) {
      SimulationPlan plan;
      plan.model = gm;
      plan.obs_window = Window::cube(2, 12.0);
      plan.sim_window = SimulationPlan::default_sim_window(plan.obs_window, gm);
      plan.burn_in = kBurnIn;
      plan.sweeps = kSweeps;
      plan.seed = child_seed(111, static_cast<uint64_t>(rep));
      const SimulateResult sim = simulate(plan);
      EstimatorConfig cfg;
      tf_hat[static_cast<size_t>(rep)] =
          fit_takacs_fiksel(Observation::from_f1(sim.f1, sim.shift), gm, cfg)
              .theta_hat.theta2[0];
      var_hat[static_cast<size_t>(rep)] =
          fit_variational(Observation::from_f2(sim.f2, sim.shift), gm, cfg)
              .theta_hat.theta2[0];
    });
    const double gap = std::abs(mean(var_hat) - mean(tf_hat));
    const double band = 3.0 * sample_sd(tf_hat);
    report(10, "variational vs TF cross-check", gap <= band,
           fmt("|mean %.3f - mean %.3f| = %.3f <= 3 sd(TF) = %.3f", mean(var_hat),
               mean(tf_hat), gap, band));
  }

  std::printf("%s: %d criterion(s) failed\n",
              g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", g_failures);
  return g_failures == 0 ? 0 : 1;
}
