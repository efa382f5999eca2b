#include "gibbslat/conditional_intensity.hpp"

#include <algorithm>
#include <cmath>

namespace gibbslat {

double ThetaVector::dot(const std::vector<double>& s) const {
  double acc = 0;
  size_t k = 0;
  for (double t : theta1) acc += t * s[k++];
  for (double t : theta2) acc += t * s[k++];
  return acc;
}

std::vector<double> ThetaVector::flat() const {
  std::vector<double> v = theta1;
  v.insert(v.end(), theta2.begin(), theta2.end());
  return v;
}

ThetaVector ThetaVector::from_flat(const std::vector<double>& v, int p1) {
  ThetaVector t;
  t.theta1.assign(v.begin(), v.begin() + p1);
  t.theta2.assign(v.begin() + p1, v.end());
  return t;
}

ThetaVector GibbsModel::theta() const {
  ThetaVector t;
  if (move.p1() == 1) t.theta1 = {move.theta1};
  t.theta2 = interaction.theta2;
  return t;
}

void GibbsModel::validate() const {
  move.validate();
  interaction.validate();
  lattice.validate();
  if (lattice.dim != move.dim) throw ConfigError("lattice and move dimensions differ");
}

JointStatistic joint_statistic(const GibbsModel& gm, const Vec& i, const Vec& x,
                               const PointsView& others) {
  if (!gm.move.in_support(x)) throw DataError("joint statistic evaluated outside the move support");
  JointStatistic js;
  js.s = gm.move.s1(x);
  const PairStatistic ps = pair_statistic(gm.interaction, add(i, x, gm.dim()), others, gm.dim());
  js.hardcore = ps.hardcore_violated;
  for (int c : ps.counts) js.s.push_back(static_cast<double>(c));
  return js;
}

double log_lambda(const GibbsModel& gm, const ThetaVector& theta, const Vec& i, const Vec& x,
                  const PointsView& others) {
  if (!gm.move.in_support(x)) return -kInf;
  const JointStatistic js = joint_statistic(gm, i, x, others);
  if (js.hardcore) return -kInf;
  const double c1 = theta.theta1.empty() ? gm.move.log_partition_at(0.0)
                                         : gm.move.log_partition_at(theta.theta1[0]);
  return -theta.dot(js.s) - c1;
}

double partition_z(const GibbsModel& gm, const ThetaVector& theta, const Vec& i,
                   const PointsView& others, const QuadratureRule& quad) {
  double z = 0;
  bool any_live = false;
  for (size_t q = 0; q < quad.nodes.size(); ++q) {
    const double ll = log_lambda(gm, theta, i, quad.nodes[q], others);
    if (ll == -kInf) continue;
    any_live = true;
    z += quad.weights[q] * std::exp(ll);
  }
  if (!any_live || z <= 0.0)
    throw NumericError("degenerate site: conditional law has no mass under the quadrature");
  return z;
}

double papangelou(const GibbsModel& gm, const ThetaVector& theta, const Vec& i, const Vec& x,
                  const PointsView& others, const QuadratureRule& quad) {
  const double ll = log_lambda(gm, theta, i, x, others);
  const double z = partition_z(gm, theta, i, others, quad);
  return ll == -kInf ? 0.0 : std::exp(ll) / z;
}

double papangelou_bordered(const GibbsModel& gm, const ThetaVector& theta, const Vec& i,
                           const Vec& x, const PointsView& others, const QuadratureRule& quad,
                           const Window& w, double m_n) {
  const double range = gm.interaction.range();
  if (!border_indicator(i, x, w, m_n, range)) return 0.0;
  const Window inner = erode(w, range);
  double z = 0;
  bool any_live = false;
  for (size_t q = 0; q < quad.nodes.size(); ++q) {
    if (!inner.contains(add(i, quad.nodes[q], gm.dim()))) continue;
    const double ll = log_lambda(gm, theta, i, quad.nodes[q], others);
    if (ll == -kInf) continue;
    any_live = true;
    z += quad.weights[q] * std::exp(ll);
  }
  if (!any_live || z <= 0.0)
    throw NumericError("degenerate site: bordered conditional law has empty denominator");
  return std::exp(log_lambda(gm, theta, i, x, others)) / z;
}

namespace {

struct Circle {
  Vec center;  // in displacement coordinates (point position minus site)
  double radius2;
};

struct Box {
  Vec lo, hi;
};

double dmin2(const Box& b, const Vec& q, int d) {
  double s = 0;
  for (int k = 0; k < d; ++k) {
    double t = 0;
    if (q[k] < b.lo[k])
      t = b.lo[k] - q[k];
    else if (q[k] > b.hi[k])
      t = q[k] - b.hi[k];
    s += t * t;
  }
  return s;
}

double dmax2(const Box& b, const Vec& q, int d) {
  double s = 0;
  for (int k = 0; k < d; ++k) {
    const double t = std::max(std::abs(q[k] - b.lo[k]), std::abs(q[k] - b.hi[k]));
    s += t * t;
  }
  return s;
}

bool straddles(const Box& b, const std::vector<Circle>& circles, int d) {
  for (const Circle& c : circles) {
    if (dmin2(b, c.center, d) < c.radius2 && c.radius2 < dmax2(b, c.center, d)) return true;
  }
  return false;
}

// Upper bound of the move density over the cell.
double density_bound(const MoveModel& move, double theta1_ref, const Box& b, int d) {
  switch (move.family) {
    case MoveFamily::Uniform:
      return 1.0 / move.support.volume();
    case MoveFamily::GaussianIsotropic: {
      const double c = move.log_partition_at(theta1_ref);
      return std::exp(-theta1_ref * dmin2(b, Vec::zero(), d) - c);
    }
    case MoveFamily::ExponentialOrthant: {
      double smin = 0;
      for (int k = 0; k < d; ++k) smin += std::max(0.0, b.lo[k]);
      return std::exp(-theta1_ref * smin - move.log_partition_at(theta1_ref));
    }
  }
  return 1.0;
}

double volume(const Box& b, int d) {
  double v = 1;
  for (int k = 0; k < d; ++k) v *= b.hi[k] - b.lo[k];
  return v;
}

double density_budget(const MoveModel& move, const RefineParams& params, const Box& b, int d) {
  return std::max(density_bound(move, params.theta1_lo, b, d),
                  density_bound(move, params.theta1_hi, b, d));
}

void refine_cell(const Box& b, int depth, int d, const MoveModel& move,
                 const std::vector<Circle>& circles, const RefineParams& params,
                 std::vector<CellBox>& out) {
  if (depth < params.max_depth && straddles(b, circles, d) &&
      volume(b, d) * density_budget(move, params, b, d) > params.cell_err_tol) {
    const int nchild = 1 << d;
    for (int mask = 0; mask < nchild; ++mask) {
      Box c;
      for (int k = 0; k < d; ++k) {
        const double mid = 0.5 * (b.lo[k] + b.hi[k]);
        c.lo[k] = ((mask >> k) & 1) ? mid : b.lo[k];
        c.hi[k] = ((mask >> k) & 1) ? b.hi[k] : mid;
      }
      refine_cell(c, depth + 1, d, move, circles, params, out);
    }
    return;
  }
  out.push_back(CellBox{b.lo, b.hi});
}

}  // namespace

std::vector<CellBox> refine_cells_for_site(const GibbsModel& gm, const Vec& i,
                                           const PointsView& others, int base_resolution,
                                           const std::optional<Window>& clip,
                                           const RefineParams& params) {
  const int d = gm.dim();
  Window box = gm.move.integration_box_at(params.theta1_lo);
  if (clip) box = intersect(box, *clip);
  if (box.empty) throw NumericError("degenerate site: clipped integration box is empty");

  // Discontinuity circles from every neighbor whose interaction shell can
  // reach the box: hard-core edge plus each band edge.
  std::vector<double> edges;
  if (gm.interaction.hardcore_r > 0.0) edges.push_back(gm.interaction.hardcore_r);
  for (double b : gm.interaction.breakpoints) edges.push_back(b);
  const double reach = gm.interaction.range();
  std::vector<Circle> circles;
  Box root;
  root.lo = box.lower;
  root.hi = box.upper;
  auto consider = [&](int id) {
    if (id == others.exclude) return;
    const Vec q = sub((*others.pts)[static_cast<size_t>(id)], i, d);
    if (dmin2(root, q, d) > reach * reach) return;
    for (double e : edges) circles.push_back(Circle{q, e * e});
  };
  if (others.grid) {
    // The grid block around i spans one interaction range; the integration
    // box may be wider, so fall back to a linear scan when it is.
    bool box_within_block = true;
    for (int k = 0; k < d; ++k)
      if (box.lower[k] < -reach || box.upper[k] > reach) box_within_block = false;
    if (box_within_block) {
      others.grid->for_candidates(i, consider);
    } else {
      for (int id = 0; id < static_cast<int>(others.pts->size()); ++id) consider(id);
    }
  } else {
    for (int id = 0; id < static_cast<int>(others.pts->size()); ++id) consider(id);
  }

  std::vector<CellBox> cells;

  // Per-axis base mesh (family-adapted), clipped to the working box.
  const double theta_grade = std::sqrt(params.theta1_lo * params.theta1_hi);
  std::vector<std::vector<double>> mesh(static_cast<size_t>(d));
  for (int k = 0; k < d; ++k) {
    std::vector<double> full =
        gm.move.axis_edges(k, base_resolution, params.theta1_lo, theta_grade);
    std::vector<double>& e = mesh[static_cast<size_t>(k)];
    e.push_back(box.lower[k]);
    for (double v : full)
      if (v > box.lower[k] && v < box.upper[k]) e.push_back(v);
    e.push_back(box.upper[k]);
  }

  std::array<int, kMaxDim> idx{};
  std::vector<Circle> near;  // circles that can straddle within one base cell
  while (true) {
    Box cell;
    for (int k = 0; k < d; ++k) {
      const auto& e = mesh[static_cast<size_t>(k)];
      cell.lo[k] = e[static_cast<size_t>(idx[static_cast<size_t>(k)])];
      cell.hi[k] = e[static_cast<size_t>(idx[static_cast<size_t>(k)]) + 1];
    }
    near.clear();
    for (const Circle& c : circles)
      if (dmin2(cell, c.center, d) < c.radius2 && c.radius2 < dmax2(cell, c.center, d))
        near.push_back(c);
    refine_cell(cell, 0, d, gm.move, near, params, cells);
    int k = d - 1;
    while (k >= 0) {
      if (++idx[static_cast<size_t>(k)] <
          static_cast<int>(mesh[static_cast<size_t>(k)].size()) - 1)
        break;
      idx[static_cast<size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return cells;
}

QuadratureRule refine_for_site(const GibbsModel& gm, const Vec& i, const PointsView& others,
                               int base_resolution, const std::optional<Window>& clip,
                               const RefineParams& params) {
  const int d = gm.dim();
  const std::vector<CellBox> cells =
      refine_cells_for_site(gm, i, others, base_resolution, clip, params);
  QuadratureRule rule;
  rule.dim = d;
  rule.truncation_radius = gm.move.truncation_radius_at(
      gm.move.family == MoveFamily::Uniform ? 0.0 : params.theta1_lo);
  rule.nodes.reserve(cells.size());
  rule.weights.reserve(cells.size());
  for (const CellBox& c : cells) {
    Vec x;
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      x[k] = 0.5 * (c.lo[k] + c.hi[k]);
      w *= c.hi[k] - c.lo[k];
    }
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
  }
  return rule;
}

double partition_z_cells(const GibbsModel& gm, const ThetaVector& theta, const Vec& i,
                         const PointsView& others, int base_resolution,
                         const std::optional<Window>& clip, const RefineParams& params) {
  const int d = gm.dim();
  const double t1 = gm.move.p1() == 1 ? theta.theta1[0] : 0.0;
  const std::vector<CellBox> cells =
      refine_cells_for_site(gm, i, others, base_resolution, clip, params);

  double z = 0;
  std::vector<int> counts(static_cast<size_t>(gm.interaction.p2()));
  std::vector<double> lo_g0(static_cast<size_t>(d)), hi_g0(static_cast<size_t>(d));
  for (const CellBox& cb : cells) {
    Vec center;
    for (int c = 0; c < d; ++c) center[c] = 0.5 * (cb.lo[c] + cb.hi[c]);
    if (!accumulate_bands(gm.interaction, add(i, center, d), others, d, counts.data())) continue;
    double t = 0;
    for (int j = 0; j < gm.interaction.p2(); ++j)
      t += theta.theta2[static_cast<size_t>(j)] * counts[static_cast<size_t>(j)];
    double w = 1.0;
    for (int c = 0; c < d; ++c) {
      std::vector<double> coords = {cb.lo[c], cb.hi[c]};
      std::vector<double> g0;
      move_axis_cumulatives(gm.move, t1, c, coords, &g0, nullptr);
      w *= g0[1] - g0[0];
    }
    if (w > 0.0) z += w * std::exp(-t);
  }
  if (!(z > 0))
    throw NumericError("degenerate site: conditional law has no mass under the quadrature");
  return z;
}

void move_axis_cumulatives(const MoveModel& move, double theta1, int axis,
                           const std::vector<double>& coords, std::vector<double>* g0,
                           std::vector<double>* gs) {
  const size_t n = coords.size();
  g0->resize(n);
  if (gs) gs->resize(n);
  switch (move.family) {
    case MoveFamily::Uniform: {
      const double lo = move.support.lower[axis];
      const double side = move.support.upper[axis] - move.support.lower[axis];
      for (size_t j = 0; j < n; ++j) (*g0)[j] = (coords[j] - lo) / side;
      if (gs) std::fill(gs->begin(), gs->end(), 0.0);
      return;
    }
    case MoveFamily::GaussianIsotropic: {
      // axis density sqrt(th/pi) e^{-th u^2}; second moment antiderivative
      // is G0/(2 th) - u g(u)/(2 th).
      const double s = std::sqrt(theta1);
      const double norm = std::sqrt(theta1 / M_PI);
      for (size_t j = 0; j < n; ++j) {
        const double u = coords[j];
        (*g0)[j] = 0.5 * (1.0 + std::erf(s * u));
        if (gs)
          (*gs)[j] = (*g0)[j] / (2.0 * theta1) -
                     u * norm * std::exp(-theta1 * u * u) / (2.0 * theta1);
      }
      return;
    }
    case MoveFamily::ExponentialOrthant: {
      for (size_t j = 0; j < n; ++j) {
        const double u = std::max(0.0, coords[j]);
        const double e = std::exp(-theta1 * u);
        (*g0)[j] = 1.0 - e;
        if (gs) (*gs)[j] = (1.0 - e) / theta1 - u * e;
      }
      return;
    }
  }
}

}  // namespace gibbslat
