#include "gibbslat/interactions.hpp"

#include <algorithm>
#include <cmath>

namespace gibbslat {

InteractionModel InteractionModel::strauss(double hardcore_r, double range, double theta2) {
  InteractionModel m;
  m.hardcore_r = hardcore_r;
  m.breakpoints = {range};
  m.theta2 = {theta2};
  m.validate();
  return m;
}

void InteractionModel::validate() const {
  if (breakpoints.empty()) throw ConfigError("interaction needs at least one band");
  if (hardcore_r < 0.0) throw ConfigError("hardcore radius must be nonnegative");
  double prev = hardcore_r;
  for (double b : breakpoints) {
    if (!(b > prev)) throw ConfigError("interaction breakpoints must increase from hardcore_r");
    prev = b;
  }
  if (theta2.size() != breakpoints.size())
    throw ConfigError("theta2 length must match the number of bands");
}

int InteractionModel::band_of(double d2) const {
  const double r2 = hardcore_r * hardcore_r;
  if (d2 < r2) return -2;
  const double rng2 = range() * range();
  if (d2 > rng2) return -1;
  const int nb = p2();
  for (int j = 0; j < nb - 1; ++j) {
    const double e = breakpoints[static_cast<size_t>(j)];
    if (d2 < e * e) return j;
  }
  return nb - 1;
}

bool accumulate_bands(const InteractionModel& m, const Vec& y, const PointsView& others, int dim,
                      int* counts) {
  for (int j = 0; j < m.p2(); ++j) counts[j] = 0;
  bool ok = true;
  const double rng2 = m.range() * m.range();
  auto visit = [&](int id) {
    if (id == others.exclude) return;
    const double d2 = dist2((*others.pts)[static_cast<size_t>(id)], y, dim);
    if (d2 > rng2) return;
    const int band = m.band_of(d2);
    if (band == -2)
      ok = false;
    else if (band >= 0)
      ++counts[band];
  };
  if (others.grid) {
    others.grid->for_candidates(y, visit);
  } else {
    for (int id = 0; id < static_cast<int>(others.pts->size()); ++id) visit(id);
  }
  return ok;
}

PairStatistic pair_statistic(const InteractionModel& m, const Vec& y, const PointsView& others,
                             int dim) {
  PairStatistic s;
  s.counts.assign(static_cast<size_t>(m.p2()), 0);
  s.hardcore_violated = !accumulate_bands(m, y, others, dim, s.counts.data());
  return s;
}

double local_energy(const InteractionModel& m, const Vec& y, const PointsView& others, int dim) {
  const PairStatistic s = pair_statistic(m, y, others, dim);
  if (s.hardcore_violated) return kInf;
  double e = 0;
  for (int j = 0; j < m.p2(); ++j) e += m.theta2[static_cast<size_t>(j)] * s.counts[static_cast<size_t>(j)];
  return e;
}

double total_energy(const InteractionModel& m, const std::vector<Vec>& pts, int dim) {
  double e = 0;
  const double rng2 = m.range() * m.range();
  for (size_t a = 0; a + 1 < pts.size(); ++a) {
    for (size_t b = a + 1; b < pts.size(); ++b) {
      const double d2 = dist2(pts[a], pts[b], dim);
      if (d2 > rng2) continue;
      const int band = m.band_of(d2);
      if (band == -2) return kInf;
      if (band >= 0) e += m.theta2[static_cast<size_t>(band)];
    }
  }
  return e;
}

}  // namespace gibbslat
