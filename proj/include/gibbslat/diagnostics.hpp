#pragma once

#include <vector>

#include "gibbslat/inference.hpp"

namespace gibbslat {

struct VarianceCurve {
  std::vector<double> radii;
  std::vector<double> ratios;           // Var[N(B(0,r))] / vol(B(0,r))
  std::vector<double> standard_errors;  // chi-square variance approximation
  int n_replicates = 0;
};

// Count-variance-to-volume curve across independent replicates. Every
// pattern window must contain the ball B(0, max radius).
VarianceCurve variance_curve(const std::vector<PointPattern>& patterns,
                             const std::vector<double>& radii);

double ball_volume(int dim, double r);

// Observed-side and integral-side ergodic averages, |W|^{-1} A and |W|^{-1} B;
// their difference is the scaled DLR statistic.
std::pair<double, double> ergodic_averages(const Observation& obs, const GibbsModel& gm,
                                           const ThetaVector& theta, const TestFunction& f,
                                           const EstimatorConfig& cfg);

struct ResidualReport {
  std::vector<std::string> names;
  std::vector<double> a_avg;
  std::vector<double> b_avg;
  std::vector<double> scaled_residual;  // a_avg - b_avg
};

ResidualReport residual_report(const Observation& obs, const GibbsModel& gm,
                               const ThetaVector& theta, const std::vector<TestFunction>& bank,
                               const EstimatorConfig& cfg);

}  // namespace gibbslat
