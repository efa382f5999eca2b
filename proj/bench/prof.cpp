#include <chrono>
#include <cstdio>
#include "gibbslat/inference.hpp"
using namespace gibbslat;
using Clock = std::chrono::steady_clock;
double ms(Clock::time_point a, Clock::time_point b){ return std::chrono::duration<double,std::milli>(b-a).count(); }
int main(){
  GibbsModel gm; gm.move = MoveModel::gaussian(2, 1.0);
  gm.interaction = InteractionModel::strauss(0.0, 0.5, 0.6931);
  gm.lattice = LatticeSpec::integer(2);
  SimulationPlan plan; plan.model = gm;
  plan.obs_window = Window::cube(2, 12.0);
  plan.sim_window = SimulationPlan::default_sim_window(plan.obs_window, gm);
  plan.burn_in = 2500; plan.sweeps = 500; plan.seed = 42;
  auto t0 = Clock::now();
  const SimulateResult sim = simulate(plan);
  auto t1 = Clock::now();
  printf("simulate: %.0f ms (sites=%zu, accept=%.3f)\n", ms(t0,t1), sim.config.sites.size(), sim.acceptance_rate);
  const Observation obs = Observation::from_f1(sim.f1, sim.shift);
  printf("pairs=%zu\n", obs.sites.size());
  EstimatorConfig cfg;
  const std::vector<double> init = default_theta_init(obs, gm);
  std::vector<double> lo, hi;
  default_theta_bounds(init, gm, &lo, &hi);
  printf("init=(%.3f, %.3f) bounds=[%.3f,%.3f]x[%.1f,%.1f]\n", init[0], init[1], lo[0], hi[0], lo[1], hi[1]);
  auto t2 = Clock::now();
  DlrEngine engine(obs, gm, cfg, lo[0], hi[0], false);
  auto t3 = Clock::now();
  printf("engine build: %.0f ms (sites=%d)\n", ms(t2,t3), engine.n_sites());
  ThetaVector th{{init[0]},{0.0}};
  auto t4 = Clock::now();
  for (int it=0; it<10; ++it) { volatile double v = engine.dlr_score(th)[0]; (void)v; }
  auto t5 = Clock::now();
  printf("dlr_score eval: %.1f ms each\n", ms(t4,t5)/10);
  auto t6 = Clock::now();
  const FitResult fit = fit_takacs_fiksel(obs, gm, cfg);
  auto t7 = Clock::now();
  printf("full fit: %.0f ms -> theta=(%.3f, %.3f) conv=%d sites=%d\n", ms(t6,t7),
    fit.theta_hat.theta1[0], fit.theta_hat.theta2[0], (int)fit.converged, fit.n_sites_used);
  return 0;
}
