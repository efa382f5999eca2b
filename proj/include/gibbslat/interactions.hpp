#pragma once

#include <vector>

#include "gibbslat/cell_grid.hpp"
#include "gibbslat/common.hpp"

namespace gibbslat {

// Pairwise band interaction with optional hard core. Band j collects
// neighbor distances in [edge_j, edge_{j+1}) where edge_0 = hardcore_r and
// the final band is closed at the range R = breakpoints.back(). Distances
// strictly below hardcore_r are forbidden (the boundary itself is allowed).
// One breakpoint gives the plain Strauss hard-core model.
struct InteractionModel {
  double hardcore_r = 0.0;
  std::vector<double> breakpoints;
  std::vector<double> theta2;

  static InteractionModel strauss(double hardcore_r, double range, double theta2);

  int p2() const { return static_cast<int>(breakpoints.size()); }
  double range() const { return breakpoints.back(); }
  void validate() const;

  // Band index for a squared distance, -1 if beyond range, -2 if hard-core.
  int band_of(double d2) const;
};

struct PairStatistic {
  std::vector<int> counts;
  bool hardcore_violated = false;
};

// View over a point set with one index optionally masked out (the point a
// statistic is being evaluated against never counts itself).
struct PointsView {
  const std::vector<Vec>* pts = nullptr;
  const CellGrid* grid = nullptr;  // optional; brute force when null
  int exclude = -1;
};

PairStatistic pair_statistic(const InteractionModel& m, const Vec& y, const PointsView& others,
                             int dim);

// Allocation-free band counter for hot loops; returns false on hard-core
// violation (counts are still filled).
bool accumulate_bands(const InteractionModel& m, const Vec& y, const PointsView& others, int dim,
                      int* counts);

// theta2' counts, +inf on hard-core violation.
double local_energy(const InteractionModel& m, const Vec& y, const PointsView& others, int dim);

// Sum of band potentials over unordered pairs; +inf on any hard-core pair.
double total_energy(const InteractionModel& m, const std::vector<Vec>& pts, int dim);

}  // namespace gibbslat
