#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "gibbslat/sampler.hpp"

using namespace gibbslat;

namespace {

GibbsModel model2d(MoveModel mv, double hc, double range, double theta2) {
  GibbsModel gm;
  gm.move = std::move(mv);
  gm.interaction = InteractionModel::strauss(hc, range, theta2);
  gm.lattice = LatticeSpec::integer(gm.move.dim);
  return gm;
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

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("no interaction: every proposal is accepted") {
  const GibbsModel gm = model2d(MoveModel::gaussian(2, 1.0), 0.0, 0.5, 0.0);
  MhSampler chain(gm, Window::cube(2, 4.0), GlobalShift{Vec::zero()});
  Rng rng(1);
  for (int s = 0; s < 5; ++s) CHECK(chain.sweep(rng) == 1.0);
}

TEST_CASE("hard-core proposals are rejected and never entered") {
  const GibbsModel gm = model2d(MoveModel::uniform(Window::cube(2, 0.5)), 0.8, 0.9, 0.5);
  MhSampler chain(gm, Window::cube(2, 4.0), GlobalShift{Vec::zero()});
  Rng rng(2);
  for (int s = 0; s < 20; ++s) {
    const double rate = chain.sweep(rng);
    CHECK(std::isfinite(rate));
    CHECK(rate >= 0.0);
    CHECK(rate < 0.6);
    CHECK(std::isfinite(total_energy(gm.interaction, chain.points(), 2)));
  }
}

TEST_CASE("fixed seed reproduces the run bit for bit") {
  GibbsModel gm = model2d(MoveModel::gaussian(2, 1.0), 0.0, 0.5, 0.69);
  SimulationPlan plan;
  plan.model = gm;
  plan.obs_window = Window::cube(2, 3.0);
  plan.sim_window = SimulationPlan::default_sim_window(plan.obs_window, gm);
  plan.burn_in = 30;
  plan.sweeps = 10;
  plan.seed = 777;
  const SimulateResult a = simulate(plan);
  const SimulateResult b = simulate(plan);
  REQUIRE(a.f2.points.size() == b.f2.points.size());
  for (size_t k = 0; k < a.f2.points.size(); ++k) {
    CHECK(a.f2.points[k][0] == b.f2.points[k][0]);
    CHECK(a.f2.points[k][1] == b.f2.points[k][1]);
  }
  CHECK(a.acceptance_rate == b.acceptance_rate);
  plan.seed = 778;
  const SimulateResult c = simulate(plan);
  CHECK(a.shift[0] != c.shift[0]);
}

TEST_CASE("isolated site: chain marginal equals the move density") {
  const GibbsModel gm = model2d(MoveModel::gaussian(2, 2.0), 0.0, 0.5, 1.0);
  MhSampler chain(gm, Window::cube(2, 0.45), GlobalShift{Vec::zero()});
  REQUIRE(chain.n_sites() == 1);
  Rng rng(3);
  const int n = 100000;
  std::vector<double> chain_xs, direct_xs;
  chain_xs.reserve(n);
  direct_xs.reserve(n);
  for (int it = 0; it < n; ++it) {
    chain.site_update(0, rng);
    chain_xs.push_back(chain.config().disp[0][0]);
  }
  Rng rng2(4);
  for (int it = 0; it < n; ++it) direct_xs.push_back(gm.move.sample(rng2)[0]);
  CHECK(ks_two_sample(chain_xs, direct_xs) < 0.02);
}

TEST_CASE("two-site chain matches the exact conditional law") {
  // Sites {0,1} on the line, uniform moves on [-0.4,0.4], Strauss range 0.6,
  // theta2 = 1. With site 1 frozen at -0.2 its point sits at 0.8, so site
  // 0's displacement is in-band exactly when x >= 0.2:
  //   density prop. to 1 on [-0.4,0.2), e^{-1} on [0.2,0.4].
  GibbsModel gm;
  gm.move = MoveModel::uniform(Window::cube(1, 0.4));
  gm.interaction = InteractionModel::strauss(0.0, 0.6, 1.0);
  gm.lattice = LatticeSpec::integer(1);

  const Window simw = Window::box(1, Vec::fill(1, -0.5), Vec::fill(1, 1.5));
  MhSampler chain(gm, simw, GlobalShift{Vec::zero()});
  REQUIRE(chain.n_sites() == 2);
  chain.set_displacement(1, Vec::fill(1, -0.2));

  Rng rng(5);
  const int n = 100000;
  std::vector<double> xs;
  xs.reserve(n);
  for (int it = 0; it < n; ++it) {
    chain.site_update(0, rng);
    xs.push_back(chain.config().disp[0][0]);
  }
  const double norm = 0.6 + 0.2 * std::exp(-1.0);
  auto cdf = [norm](double x) {
    if (x < -0.4) return 0.0;
    if (x < 0.2) return (x + 0.4) / norm;
    if (x < 0.4) return (0.6 + (x - 0.2) * std::exp(-1.0)) / norm;
    return 1.0;
  };
  CHECK(ks_vs_cdf(xs, cdf) < 0.02);
}

TEST_CASE("accepted updates telescope the total energy") {
  const GibbsModel gm = model2d(MoveModel::uniform(Window::cube(2, 0.5)), 0.1, 0.7, 0.8);
  MhSampler chain(gm, Window::cube(2, 2.5), GlobalShift{Vec::zero()});
  Rng rng(6);
  double total = total_energy(gm.interaction, chain.points(), 2);
  int accepted = 0;
  for (int sweep = 0; sweep < 8; ++sweep) {
    for (int k = 0; k < chain.n_sites(); ++k) {
      const std::vector<Vec> before = chain.points();
      PointsView others;
      others.pts = &before;
      others.exclude = k;
      const double h_old = local_energy(gm.interaction, before[static_cast<size_t>(k)], others, 2);
      if (chain.site_update(k, rng)) {
        ++accepted;
        const std::vector<Vec>& now = chain.points();
        const double h_new = local_energy(gm.interaction, now[static_cast<size_t>(k)], others, 2);
        const double fresh = total_energy(gm.interaction, now, 2);
        CHECK(fresh == doctest::Approx(total + (h_new - h_old)).epsilon(1e-9));
        total = fresh;
      }
    }
  }
  CHECK(accepted > 50);
}

TEST_CASE("no-interaction point count matches the thinning oracle") {
  GibbsModel gm = model2d(MoveModel::uniform(Window::cube(2, 0.5)), 0.0, 0.5, 0.0);
  SimulationPlan plan;
  plan.model = gm;
  plan.obs_window = Window::cube(2, 3.0);
  plan.sim_window = Window::cube(2, 5.0);
  plan.burn_in = 2;
  plan.sweeps = 1;
  plan.seed = 99;
  Vec u;
  u[0] = 0.3;
  u[1] = 0.7;
  plan.fixed_shift = u;
  const SimulateResult r = simulate(plan);

  // independent displacements: the count sums Bernoulli(vol((W-i) cap Q))
  double mean = 0, var = 0;
  for (const Site& s : shifted_sites(gm.lattice, GlobalShift{u}, plan.sim_window)) {
    Window shifted = plan.obs_window;
    for (int k = 0; k < 2; ++k) {
      shifted.lower[k] -= s.pos[k];
      shifted.upper[k] -= s.pos[k];
    }
    const double p = intersect(shifted, gm.move.support).volume();
    mean += p;
    var += p * (1.0 - p);
  }
  CHECK(std::abs(static_cast<double>(r.f2.points.size()) - mean) <= 4.0 * std::sqrt(var));
}

TEST_CASE("hard-core model emits patterns with the minimum spacing") {
  GibbsModel gm = model2d(MoveModel::gaussian(2, 4.0), 0.25, 0.5, 0.11);
  SimulationPlan plan;
  plan.model = gm;
  plan.obs_window = Window::cube(2, 4.0);
  plan.sim_window = SimulationPlan::default_sim_window(plan.obs_window, gm);
  plan.burn_in = 100;
  plan.sweeps = 20;
  plan.seed = 31;
  const SimulateResult r = simulate(plan);
  double min_d2 = kInf;
  for (size_t a = 0; a < r.f2.points.size(); ++a)
    for (size_t b = a + 1; b < r.f2.points.size(); ++b)
      min_d2 = std::min(min_d2, dist2(r.f2.points[a], r.f2.points[b], 2));
  CHECK(std::sqrt(min_d2) >= 0.25);
}

TEST_CASE("clipping: framework memberships hold") {
  GibbsModel gm = model2d(MoveModel::gaussian(2, 1.0), 0.0, 0.5, 0.69);
  SimulationPlan plan;
  plan.model = gm;
  plan.obs_window = Window::cube(2, 3.0);
  plan.sim_window = SimulationPlan::default_sim_window(plan.obs_window, gm);
  plan.burn_in = 50;
  plan.sweeps = 10;
  plan.seed = 12;
  const SimulateResult r = simulate(plan);
  REQUIRE(!r.f1.sites.empty());
  for (size_t k = 0; k < r.f1.sites.size(); ++k) {
    CHECK(plan.obs_window.contains(r.f1.sites[k]));
    CHECK(plan.obs_window.contains(add(r.f1.sites[k], r.f1.disps[k], 2)));
  }
  for (const Vec& p : r.f2.points) CHECK(plan.obs_window.contains(p));
  for (size_t k = 0; k < r.f1.sites.size(); ++k) {
    const Vec pt = add(r.f1.sites[k], r.f1.disps[k], 2);
    bool found = false;
    for (const Vec& p : r.f2.points)
      if (dist2(p, pt, 2) == 0.0) found = true;
    CHECK(found);  // pair-derived points appear among the bare points
  }
}

TEST_CASE("replicate streams: definition, distinctness, independence") {
  GibbsModel gm = model2d(MoveModel::uniform(Window::cube(2, 0.5)), 0.0, 0.5, 0.3);
  SimulationPlan plan;
  plan.model = gm;
  plan.obs_window = Window::cube(2, 3.0);
  plan.sim_window = Window::cube(2, 5.0);
  plan.burn_in = 20;
  plan.sweeps = 5;
  plan.seed = 1234;

  // replicate k is simulate() at the k-th child seed
  const std::vector<SimulateResult> reps = replicate(plan, 3, 2);
  SimulationPlan p0 = plan;
  p0.seed = child_seed(plan.seed, 0);
  const SimulateResult direct = simulate(p0);
  REQUIRE(reps[0].f2.points.size() == direct.f2.points.size());
  CHECK(reps[0].shift[0] == direct.shift[0]);

  // distinct child seeds
  std::vector<uint64_t> seeds;
  for (uint64_t k = 0; k < 1000; ++k) seeds.push_back(child_seed(plan.seed, k));
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());

  // per-replicate counts pass a lag-1 shuffle test at level 0.01
  const std::vector<SimulateResult> many = replicate(plan, 200, 4);
  std::vector<double> counts;
  for (const SimulateResult& r : many) counts.push_back(static_cast<double>(r.f2.points.size()));
  const double m = mean(counts);
  auto lag1 = [m](const std::vector<double>& xs) {
    double num = 0, den = 0;
    for (size_t k = 0; k < xs.size(); ++k) {
      den += (xs[k] - m) * (xs[k] - m);
      if (k + 1 < xs.size()) num += (xs[k] - m) * (xs[k + 1] - m);
    }
    return num / den;
  };
  const double observed = std::abs(lag1(counts));
  Rng rng(777);
  int geq = 0;
  const int nperm = 999;
  std::vector<double> shuffled = counts;
  for (int it = 0; it < nperm; ++it) {
    for (size_t k = shuffled.size(); k > 1; --k)
      std::swap(shuffled[k - 1], shuffled[rng.below(k)]);
    if (std::abs(lag1(shuffled)) >= observed) ++geq;
  }
  CHECK((geq + 1.0) / (nperm + 1.0) > 0.01);
}

TEST_CASE("plan validation rejects a thin simulation margin") {
  GibbsModel gm = model2d(MoveModel::gaussian(2, 1.0), 0.0, 0.5, 0.1);
  SimulationPlan plan;
  plan.model = gm;
  plan.obs_window = Window::cube(2, 3.0);
  plan.sim_window = Window::cube(2, 3.5);  // thinner than range + truncation
  plan.seed = 1;
  CHECK_THROWS_AS(simulate(plan), ConfigError);
}
