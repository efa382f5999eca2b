#include "gibbslat/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "gibbslat/parallel.hpp"

namespace gibbslat {

void SimulationPlan::validate() const {
  model.validate();
  if (obs_window.empty || sim_window.empty) throw ConfigError("simulation windows must be nonempty");
  const double margin = model.interaction.range() +
                        model.move.truncation_radius_at(
                            model.move.family == MoveFamily::Uniform ? 0.0 : model.move.theta1);
  for (int k = 0; k < obs_window.dim; ++k) {
    if (sim_window.lower[k] > obs_window.lower[k] - margin ||
        sim_window.upper[k] < obs_window.upper[k] + margin)
      throw ConfigError("simulation window margin must cover range + move truncation radius");
  }
  if (sweeps < 1 || burn_in < 0) throw ConfigError("sweeps must be >= 1 and burn_in >= 0");
}

Window SimulationPlan::default_sim_window(const Window& obs, const GibbsModel& gm) {
  const double margin =
      gm.interaction.range() +
      gm.move.truncation_radius_at(gm.move.family == MoveFamily::Uniform ? 0.0 : gm.move.theta1) +
      5.0 * gm.lattice.size_parameter();
  Window w = obs;
  for (int k = 0; k < obs.dim; ++k) {
    w.lower[k] -= margin;
    w.upper[k] += margin;
  }
  return w;
}

std::vector<Vec> LatticeConfiguration::points() const {
  // Unused trailing components are zero, so adding over kMaxDim is exact.
  std::vector<Vec> pts(sites.size());
  for (size_t k = 0; k < sites.size(); ++k) pts[k] = add(sites[k].pos, disp[k], kMaxDim);
  return pts;
}

MhSampler::MhSampler(const GibbsModel& gm, const Window& sim_window, const GlobalShift& shift)
    : gm_(gm) {
  const int d = gm.dim();
  cfg_.shift = shift;
  cfg_.sites = shifted_sites(gm.lattice, shift, sim_window);
  if (cfg_.sites.empty()) throw ConfigError("simulation window contains no lattice sites");
  const Vec x0 = gm.move.initial_displacement();
  cfg_.disp.assign(cfg_.sites.size(), x0);
  pts_.resize(cfg_.sites.size());
  for (size_t k = 0; k < cfg_.sites.size(); ++k) pts_[k] = add(cfg_.sites[k].pos, x0, d);

  // Every reachable point stays inside the padded box (proposals are
  // truncated draws), so the dense grid never sees an outside point.
  const double pad =
      gm.move.truncation_radius_at(gm.move.family == MoveFamily::Uniform ? 0.0 : gm.move.theta1) +
      gm.interaction.range() + 1.0;
  Window box = sim_window;
  for (int k = 0; k < d; ++k) {
    box.lower[k] -= pad;
    box.upper[k] += pad;
  }
  grid_.init(box, std::max(gm.interaction.range(), 1e-6));
  for (size_t k = 0; k < pts_.size(); ++k) grid_.insert(static_cast<int>(k), pts_[k]);
  scratch_counts_.assign(static_cast<size_t>(gm.interaction.p2()), 0);
}

void MhSampler::set_displacement(int site_index, const Vec& x) {
  const int d = gm_.dim();
  const Vec to = add(cfg_.sites[static_cast<size_t>(site_index)].pos, x, d);
  grid_.move(site_index, pts_[static_cast<size_t>(site_index)], to);
  cfg_.disp[static_cast<size_t>(site_index)] = x;
  pts_[static_cast<size_t>(site_index)] = to;
}

bool MhSampler::site_update(int site_index, Rng& rng) {
  const int d = gm_.dim();
  const size_t k = static_cast<size_t>(site_index);
  const Vec proposal = gm_.move.sample(rng);
  const Vec p_new = add(cfg_.sites[k].pos, proposal, d);

  PointsView others;
  others.pts = &pts_;
  others.grid = &grid_;
  others.exclude = site_index;

  int* counts = scratch_counts_.data();
  double h_new;
  if (!accumulate_bands(gm_.interaction, p_new, others, d, counts)) {
    return false;  // hard-core proposals have acceptance zero
  } else {
    h_new = 0;
    for (int j = 0; j < gm_.interaction.p2(); ++j)
      h_new += gm_.interaction.theta2[static_cast<size_t>(j)] * counts[j];
  }
  double h_old;
  if (!accumulate_bands(gm_.interaction, pts_[k], others, d, counts)) {
    h_old = kInf;  // only reachable from a violating start; always escape
  } else {
    h_old = 0;
    for (int j = 0; j < gm_.interaction.p2(); ++j)
      h_old += gm_.interaction.theta2[static_cast<size_t>(j)] * counts[j];
  }

  const double log_ratio = h_old - h_new;
  if (log_ratio < 0.0) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    if (std::log(u) >= log_ratio) return false;
  }
  grid_.move(site_index, pts_[k], p_new);
  cfg_.disp[k] = proposal;
  pts_[k] = p_new;
  return true;
}

double MhSampler::sweep(Rng& rng) {
  int accepted = 0;
  const int n = n_sites();
  for (int k = 0; k < n; ++k) accepted += site_update(k, rng) ? 1 : 0;
  return static_cast<double>(accepted) / static_cast<double>(n);
}

SimulateResult simulate(const SimulationPlan& plan) {
  plan.validate();
  const int d = plan.model.dim();
  Rng rng(plan.seed);
  const GlobalShift shift =
      plan.fixed_shift ? GlobalShift{*plan.fixed_shift} : sample_shift(plan.model.lattice, rng);

  MhSampler chain(plan.model, plan.sim_window, shift);
  for (int s = 0; s < plan.burn_in; ++s) chain.sweep(rng);
  double acc = 0;
  for (int s = 0; s < plan.sweeps; ++s) acc += chain.sweep(rng);

  SimulateResult out;
  out.config = chain.config();
  out.shift = shift.u;
  out.acceptance_rate = acc / plan.sweeps;

  out.f1.window = plan.obs_window;
  out.f1.dim = d;
  out.f2.window = plan.obs_window;
  out.f2.dim = d;
  for (size_t k = 0; k < out.config.sites.size(); ++k) {
    const Vec site = out.config.sites[k].pos;
    const Vec pt = add(site, out.config.disp[k], d);
    if (plan.obs_window.contains(pt)) out.f2.points.push_back(pt);
    if (plan.obs_window.contains(site) && plan.obs_window.contains(pt)) {
      out.f1.sites.push_back(site);
      out.f1.disps.push_back(out.config.disp[k]);
    }
  }
  return out;
}

std::vector<SimulateResult> replicate(const SimulationPlan& plan, int K, int jobs) {
  if (K < 1) throw ConfigError("replicate count must be >= 1");
  std::vector<SimulateResult> out(static_cast<size_t>(K));
  parallel_for(K, jobs, [&](int k) {
    SimulationPlan p = plan;
    p.seed = child_seed(plan.seed, static_cast<uint64_t>(k));
    out[static_cast<size_t>(k)] = simulate(p);
  });
  return out;
}

}  // namespace gibbslat
