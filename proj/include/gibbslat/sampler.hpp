#pragma once

#include <optional>
#include <vector>

#include "gibbslat/conditional_intensity.hpp"

namespace gibbslat {

struct SimulationPlan {
  GibbsModel model;  // parameters to simulate at live in the components
  Window sim_window;
  Window obs_window;
  int sweeps = 1000;
  int burn_in = 10000;
  uint64_t seed = 0;
  std::optional<Vec> fixed_shift;  // uniform over the fundamental domain when unset

  void validate() const;
  // sim window needed to shield obs_window from boundary effects.
  static Window default_sim_window(const Window& obs, const GibbsModel& gm);
};

struct LatticeConfiguration {
  GlobalShift shift;
  std::vector<Site> sites;  // shifted lattice inside the simulation window
  std::vector<Vec> disp;

  std::vector<Vec> points() const;
};

struct PointPattern {
  std::vector<Vec> points;
  Window window;
  int dim = 0;
};

// Site/displacement pairs with both the site and the displaced point inside
// the window.
struct PairPattern {
  std::vector<Vec> sites;
  std::vector<Vec> disps;
  Window window;
  int dim = 0;
};

struct SimulateResult {
  LatticeConfiguration config;
  Vec shift;
  PairPattern f1;
  PointPattern f2;
  double acceptance_rate = 0.0;  // mean over post-burn-in sweeps
};

// Single-site Metropolis-Hastings chain over the displacements. Proposals
// are independent draws from the move distribution, so the acceptance ratio
// is exp(h(old point) - h(new point)) against the local pair energy.
class MhSampler {
 public:
  MhSampler(const GibbsModel& gm, const Window& sim_window, const GlobalShift& shift);

  bool site_update(int site_index, Rng& rng);
  double sweep(Rng& rng);  // lexicographic pass; returns acceptance fraction

  const LatticeConfiguration& config() const { return cfg_; }
  const std::vector<Vec>& points() const { return pts_; }
  int n_sites() const { return static_cast<int>(cfg_.sites.size()); }
  // Force one displacement (test hook); keeps the grid consistent.
  void set_displacement(int site_index, const Vec& x);

 private:
  const GibbsModel& gm_;
  LatticeConfiguration cfg_;
  std::vector<Vec> pts_;
  CellGrid grid_;
  std::vector<int> scratch_counts_;
};

SimulateResult simulate(const SimulationPlan& plan);

// K independent streams; replicate k re-runs the plan with a child seed
// derived from (plan.seed, k).
std::vector<SimulateResult> replicate(const SimulationPlan& plan, int K, int jobs = 1);

}  // namespace gibbslat
