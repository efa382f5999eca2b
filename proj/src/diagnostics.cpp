#include "gibbslat/diagnostics.hpp"

#include <cmath>

namespace gibbslat {

double ball_volume(int dim, double r) {
  // pi^{d/2} r^d / Gamma(d/2 + 1)
  return std::pow(M_PI, 0.5 * dim) * std::pow(r, dim) / std::tgamma(0.5 * dim + 1.0);
}

VarianceCurve variance_curve(const std::vector<PointPattern>& patterns,
                             const std::vector<double>& radii) {
  const int K = static_cast<int>(patterns.size());
  if (K < 10) throw DataError("variance curve needs at least 10 replicates");
  if (radii.empty()) throw ConfigError("variance curve needs at least one radius");
  double rmax = 0;
  for (size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] <= 0) throw ConfigError("variance curve radii must be positive");
    if (i > 0 && radii[i] <= radii[i - 1]) throw ConfigError("variance curve radii must increase");
    rmax = std::max(rmax, radii[i]);
  }
  const int d = patterns.front().dim;
  for (const PointPattern& p : patterns) {
    if (p.dim != d) throw DataError("variance curve patterns have mixed dimensions");
    for (int k = 0; k < d; ++k)
      if (p.window.lower[k] > -rmax || p.window.upper[k] < rmax)
        throw DataError("pattern window does not contain the ball B(0, r_max)");
  }

  VarianceCurve curve;
  curve.radii = radii;
  curve.n_replicates = K;
  for (double r : radii) {
    const double r2 = r * r;
    std::vector<double> counts;
    counts.reserve(static_cast<size_t>(K));
    for (const PointPattern& p : patterns) {
      int n = 0;
      for (const Vec& pt : p.points)
        if (norm2(pt, d) <= r2) ++n;
      counts.push_back(static_cast<double>(n));
    }
    const double sd = sample_sd(counts);
    const double var = sd * sd;
    const double vol = ball_volume(d, r);
    curve.ratios.push_back(var / vol);
    // chi-square spread of a sample variance under approximate normality
    curve.standard_errors.push_back(var * std::sqrt(2.0 / (K - 1)) / vol);
  }
  return curve;
}

std::pair<double, double> ergodic_averages(const Observation& obs, const GibbsModel& gm,
                                           const ThetaVector& theta, const TestFunction& f,
                                           const EstimatorConfig& cfg) {
  const double t1 = gm.move.p1() == 1 ? theta.theta1[0] : 1.0;
  DlrEngine engine(obs, gm, cfg, t1, t1, true);
  const auto [a, b] = engine.ab_sums(theta, f);
  const double wvol = engine.window_volume();
  return {a / wvol, b / wvol};
}

ResidualReport residual_report(const Observation& obs, const GibbsModel& gm,
                               const ThetaVector& theta, const std::vector<TestFunction>& bank,
                               const EstimatorConfig& cfg) {
  const double t1 = gm.move.p1() == 1 ? theta.theta1[0] : 1.0;
  DlrEngine engine(obs, gm, cfg, t1, t1, true);
  const double wvol = engine.window_volume();
  ResidualReport rep;
  for (const TestFunction& f : bank) {
    const auto [a, b] = engine.ab_sums(theta, f);
    rep.names.push_back(f.name);
    rep.a_avg.push_back(a / wvol);
    rep.b_avg.push_back(b / wvol);
    rep.scaled_residual.push_back(a / wvol - b / wvol);
  }
  return rep;
}

}  // namespace gibbslat
