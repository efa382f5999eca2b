#include <algorithm>
#include <cmath>

#include "gibbslat/inference.hpp"

namespace gibbslat {

namespace {

// Band-indicator taper with a C1 ramp of width `eps` straddling each edge.
// The ramp slope is a quadratic-ended trapezoid: constant across the exact
// band discontinuity (where the information lives) and tapering to zero at
// the ramp ends so the test functions stay continuous. With this shape the
// one-pair estimand is about 1.06 * 2 tanh(theta2/2), i.e. theta2 up to a
// small cubic correction.
struct BandTaper {
  double lo, hi, eps;

  static constexpr double kEnd = 0.15;  // quadratic end fraction of the ramp

  static double shape(double v) {
    const double c = 1.0 / (1.0 - kEnd);
    if (v <= 0.0) return 0.0;
    if (v >= 1.0) return 1.0;
    if (v < kEnd) return c * v * v / (2.0 * kEnd);
    if (v <= 1.0 - kEnd) return c * (v - 0.5 * kEnd);
    const double r = 1.0 - v;
    return 1.0 - c * r * r / (2.0 * kEnd);
  }
  static double shape_d(double v) {
    const double c = 1.0 / (1.0 - kEnd);
    if (v <= 0.0 || v >= 1.0) return 0.0;
    if (v < kEnd) return c * v / kEnd;
    if (v <= 1.0 - kEnd) return c;
    return c * (1.0 - v) / kEnd;
  }
  static double shape_dd(double v) {  // a.e.
    const double c = 1.0 / (1.0 - kEnd);
    if (v <= 0.0 || v >= 1.0) return 0.0;
    if (v < kEnd) return c / kEnd;
    if (v <= 1.0 - kEnd) return 0.0;
    return -c / kEnd;
  }

  // rising factor at the lower edge, falling factor at the upper edge
  double vlo(double t) const { return (t - lo) / eps + 0.5; }
  double vhi(double t) const { return (hi - t) / eps + 0.5; }

  double value(double t) const {
    double v = shape(vhi(t));
    if (lo > 0.0) v *= shape(vlo(t));
    return v;
  }
  double d1(double t) const {
    const double a = lo > 0.0 ? shape(vlo(t)) : 1.0;
    const double da = lo > 0.0 ? shape_d(vlo(t)) / eps : 0.0;
    const double b = shape(vhi(t));
    const double db = -shape_d(vhi(t)) / eps;
    return da * b + a * db;
  }
  double d2(double t) const {
    const double a = lo > 0.0 ? shape(vlo(t)) : 1.0;
    const double da = lo > 0.0 ? shape_d(vlo(t)) / eps : 0.0;
    const double dda = lo > 0.0 ? shape_dd(vlo(t)) / (eps * eps) : 0.0;
    const double b = shape(vhi(t));
    const double db = -shape_d(vhi(t)) / eps;
    const double ddb = shape_dd(vhi(t)) / (eps * eps);
    return dda * b + 2.0 * da * db + a * ddb;
  }
};

std::vector<BandTaper> build_tapers(const InteractionModel& m, double taper_frac) {
  std::vector<BandTaper> tapers;
  const double eps = taper_frac * m.range();
  double lo = m.hardcore_r;
  for (double hi : m.breakpoints) {
    if (hi - lo <= eps) throw ConfigError("variational taper wider than an interaction band");
    tapers.push_back(BandTaper{lo, hi, eps});
    lo = hi;
  }
  return tapers;
}

// Per-point smoothed pair statistic: value, per-coordinate first and second
// derivatives of each band component.
struct SmoothedStats {
  std::vector<double> grad;   // p2 x d, row-major
  std::vector<double> diag2;  // p2 x d second derivatives along each axis
};

SmoothedStats smoothed_stats(const std::vector<BandTaper>& tapers, const Vec& y,
                             const std::vector<Vec>& pts, int self, const CellGrid& grid, int d) {
  const int p2 = static_cast<int>(tapers.size());
  SmoothedStats st;
  st.grad.assign(static_cast<size_t>(p2 * d), 0.0);
  st.diag2.assign(static_cast<size_t>(p2 * d), 0.0);
  grid.for_candidates(y, [&](int id) {
    if (id == self) return;
    const Vec& pp = pts[static_cast<size_t>(id)];
    const double t2 = dist2(y, pp, d);
    const double t = std::sqrt(t2);
    if (t <= 0.0) return;
    for (int m = 0; m < p2; ++m) {
      const double w1 = tapers[static_cast<size_t>(m)].d1(t);
      const double w2 = tapers[static_cast<size_t>(m)].d2(t);
      if (w1 == 0.0 && w2 == 0.0) continue;
      for (int k = 0; k < d; ++k) {
        const double dk = y[k] - pp[k];
        st.grad[static_cast<size_t>(m * d + k)] += w1 * dk / t;
        st.diag2[static_cast<size_t>(m * d + k)] +=
            w2 * dk * dk / t2 + w1 * (1.0 / t - dk * dk / (t2 * t));
      }
    }
  });
  return st;
}

// Least squares by normal equations with a relative pivot guard.
std::vector<double> solve_least_squares(const std::vector<std::vector<double>>& rows,
                                        const std::vector<double>& rhs, int p) {
  std::vector<double> g(static_cast<size_t>(p * p), 0.0);
  std::vector<double> b(static_cast<size_t>(p), 0.0);
  double scale = 0.0;
  for (size_t r = 0; r < rows.size(); ++r) {
    for (int a = 0; a < p; ++a) {
      scale = std::max(scale, std::abs(rows[r][static_cast<size_t>(a)]));
      b[static_cast<size_t>(a)] += rows[r][static_cast<size_t>(a)] * rhs[r];
      for (int c = 0; c < p; ++c)
        g[static_cast<size_t>(a * p + c)] +=
            rows[r][static_cast<size_t>(a)] * rows[r][static_cast<size_t>(c)];
    }
  }
  if (scale <= 1e-12)
    throw DataError("identifiability: variational coefficient matrix is numerically zero");
  // Gaussian elimination with partial pivoting on the p x p system.
  std::vector<double> x(static_cast<size_t>(p), 0.0);
  std::vector<int> perm(static_cast<size_t>(p));
  for (int k = 0; k < p; ++k) perm[static_cast<size_t>(k)] = k;
  const double pivot_tol = 1e-12 * scale * scale;
  for (int col = 0; col < p; ++col) {
    int piv = col;
    for (int r = col + 1; r < p; ++r)
      if (std::abs(g[static_cast<size_t>(r * p + col)]) >
          std::abs(g[static_cast<size_t>(piv * p + col)]))
        piv = r;
    if (std::abs(g[static_cast<size_t>(piv * p + col)]) <= pivot_tol)
      throw DataError("identifiability: variational system is rank deficient");
    if (piv != col) {
      for (int c = 0; c < p; ++c)
        std::swap(g[static_cast<size_t>(piv * p + c)], g[static_cast<size_t>(col * p + c)]);
      std::swap(b[static_cast<size_t>(piv)], b[static_cast<size_t>(col)]);
    }
    for (int r = col + 1; r < p; ++r) {
      const double f = g[static_cast<size_t>(r * p + col)] / g[static_cast<size_t>(col * p + col)];
      for (int c = col; c < p; ++c)
        g[static_cast<size_t>(r * p + c)] -= f * g[static_cast<size_t>(col * p + c)];
      b[static_cast<size_t>(r)] -= f * b[static_cast<size_t>(col)];
    }
  }
  for (int r = p - 1; r >= 0; --r) {
    double acc = b[static_cast<size_t>(r)];
    for (int c = r + 1; c < p; ++c) acc -= g[static_cast<size_t>(r * p + c)] * x[static_cast<size_t>(c)];
    x[static_cast<size_t>(r)] = acc / g[static_cast<size_t>(r * p + r)];
  }
  return x;
}

}  // namespace

SmoothWindow default_smooth_window(const GibbsModel& gm, const Vec& shift) {
  const int d = gm.dim();
  const std::vector<double> binv = gm.lattice.inverse_basis();
  const bool uniform = gm.move.family == MoveFamily::Uniform;

  // Per-coordinate half-width of the support box (uniform case); the bump
  // vanishes where a displacement coordinate reaches the box edge.
  Vec halfwidth = Vec::fill(d, 0.5);
  if (uniform)
    for (int k = 0; k < d; ++k)
      halfwidth[k] = 0.5 * (gm.move.support.upper[k] - gm.move.support.lower[k]);

  auto cell_coords = [binv, shift, d](const Vec& y) {
    Vec t;
    const Vec rel = sub(y, shift, d);
    for (int r = 0; r < d; ++r) {
      double acc = 0;
      for (int c = 0; c < d; ++c) acc += binv[static_cast<size_t>(r * d + c)] * rel[c];
      t[r] = acc - std::floor(acc);  // fractional in-cell coordinate
    }
    return t;
  };

  SmoothWindow psi;
  if (uniform) {
    // prod_k cos^2(pi s_k / (2 a_k)) on the centered in-cell coordinate:
    // zero exactly on the support boundary translates.
    psi.value = [cell_coords, halfwidth, d](const Vec& y) {
      const Vec t = cell_coords(y);
      double v = 1.0;
      for (int k = 0; k < d; ++k) {
        const double s = t[k] < 0.5 ? t[k] : t[k] - 1.0;
        if (std::abs(s) >= halfwidth[k]) return 0.0;
        const double c = std::cos(M_PI * s / (2.0 * halfwidth[k]));
        v *= c * c;
      }
      return v;
    };
    psi.grad = [cell_coords, halfwidth, d](const Vec& y) {
      const Vec t = cell_coords(y);
      std::array<double, kMaxDim> f{}, df{};
      for (int k = 0; k < d; ++k) {
        const double s = t[k] < 0.5 ? t[k] : t[k] - 1.0;
        if (std::abs(s) >= halfwidth[k]) return Vec::zero();
        const double a = M_PI / (2.0 * halfwidth[k]);
        const double c = std::cos(a * s);
        f[static_cast<size_t>(k)] = c * c;
        df[static_cast<size_t>(k)] = -2.0 * a * c * std::sin(a * s);
      }
      Vec g;
      for (int k = 0; k < d; ++k) {
        double v = df[static_cast<size_t>(k)];
        for (int j = 0; j < d; ++j)
          if (j != k) v *= f[static_cast<size_t>(j)];
        g[k] = v;
      }
      return g;
    };
  } else {
    // prod_k sin^2(pi t_k): vanishes on every lattice coordinate hyperplane,
    // which contains the orthant boundary translates.
    psi.value = [cell_coords, d](const Vec& y) {
      const Vec t = cell_coords(y);
      double v = 1.0;
      for (int k = 0; k < d; ++k) {
        const double s = std::sin(M_PI * t[k]);
        v *= s * s;
      }
      return v;
    };
    psi.grad = [cell_coords, d](const Vec& y) {
      const Vec t = cell_coords(y);
      std::array<double, kMaxDim> f{}, df{};
      for (int k = 0; k < d; ++k) {
        const double s = std::sin(M_PI * t[k]);
        const double c = std::cos(M_PI * t[k]);
        f[static_cast<size_t>(k)] = s * s;
        df[static_cast<size_t>(k)] = 2.0 * M_PI * s * c;
      }
      Vec g;
      for (int k = 0; k < d; ++k) {
        double v = df[static_cast<size_t>(k)];
        for (int j = 0; j < d; ++j)
          if (j != k) v *= f[static_cast<size_t>(j)];
        g[k] = v;
      }
      return g;
    };
  }
  // Gradients above are with respect to the in-cell coordinate; correct for a
  // non-identity basis by the chain rule.
  if (!gm.lattice.is_integer_lattice()) {
    auto inner = psi.grad;
    psi.grad = [inner, binv, d](const Vec& y) {
      const Vec gt = inner(y);
      Vec g;
      for (int k = 0; k < d; ++k) {
        double acc = 0;
        for (int r = 0; r < d; ++r) acc += gt[r] * binv[static_cast<size_t>(r * d + k)];
        g[k] = acc;
      }
      return g;
    };
  }
  return psi;
}

VariationalSystem variational_system(const Observation& obs, const GibbsModel& gm,
                                     double taper_frac,
                                     const std::optional<SmoothWindow>& psi_in) {
  gm.validate();
  obs.validate();
  const int d = gm.dim();
  const bool uniform = gm.move.family == MoveFamily::Uniform;
  const bool exponential = gm.move.family == MoveFamily::ExponentialOrthant;
  if (!uniform && !exponential)
    throw ConfigError(
        "variational estimation needs uniform or exponential-orthant moves "
        "(the move gradient term is not observable otherwise)");

  const double range = gm.interaction.range();
  const Window usable_win = erode(obs.window, range);
  const int p2 = gm.interaction.p2();
  const int p = gm.p();

  CellGrid grid;
  grid.init(obs.window, std::max(range, 1e-6));
  for (size_t k = 0; k < obs.points.size(); ++k) grid.insert(static_cast<int>(k), obs.points[k]);

  const SmoothWindow psi = psi_in ? *psi_in : default_smooth_window(gm, obs.shift);
  if (!(taper_frac > 0.0) || taper_frac > 0.5)
    throw ConfigError("variational taper width must be in (0, 0.5] of the range");
  const std::vector<BandTaper> tapers = build_tapers(gm.interaction, taper_frac);

  // Row (block m, coordinate k):
  //   sum_y d_k phi = theta1 * sum_y phi [exponential only]
  //                 + sum_m' theta2_m' * sum_y phi * d_k S2_m'
  // with phi = psi (pure block, exponential only) or (z + d_k S2_m) psi.
  const int nblocks = exponential ? p2 + 1 : p2;
  VariationalSystem sys;
  sys.rows.assign(static_cast<size_t>(nblocks * d),
                  std::vector<double>(static_cast<size_t>(p), 0.0));
  sys.rhs.assign(static_cast<size_t>(nblocks * d), 0.0);

  for (size_t idx = 0; idx < obs.points.size(); ++idx) {
    const Vec& y = obs.points[idx];
    if (!usable_win.contains(y)) continue;
    ++sys.n_points_used;
    const SmoothedStats st =
        smoothed_stats(tapers, y, obs.points, static_cast<int>(idx), grid, d);
    const double pv = psi.value(y);
    const Vec pg = psi.grad(y);
    const double z = exponential ? 1.0 : 0.0;
    for (int blk = 0; blk < nblocks; ++blk) {
      const int m = exponential ? blk - 1 : blk;  // -1 is the pure-psi block
      for (int k = 0; k < d; ++k) {
        const size_t row = static_cast<size_t>(blk * d + k);
        double phi, dphi;
        if (m < 0) {
          phi = pv;
          dphi = pg[k];
        } else {
          const double gk = st.grad[static_cast<size_t>(m * d + k)];
          const double hk = st.diag2[static_cast<size_t>(m * d + k)];
          phi = (z + gk) * pv;
          dphi = hk * pv + (z + gk) * pg[k];
        }
        sys.rhs[row] += dphi;
        int col = 0;
        if (exponential) sys.rows[row][static_cast<size_t>(col++)] += phi;
        for (int mp = 0; mp < p2; ++mp)
          sys.rows[row][static_cast<size_t>(col + mp)] +=
              phi * st.grad[static_cast<size_t>(mp * d + k)];
      }
    }
  }
  if (sys.n_points_used == 0)
    throw DataError("insufficient data: no points inside the eroded window");
  return sys;
}

FitResult fit_variational(const Observation& obs, const GibbsModel& gm, const EstimatorConfig& cfg,
                          const std::optional<SmoothWindow>& psi_in) {
  const VariationalSystem sys = variational_system(obs, gm, cfg.variational_taper, psi_in);
  const int p = gm.p();
  const bool exponential = gm.move.family == MoveFamily::ExponentialOrthant;
  const std::vector<double> theta = solve_least_squares(sys.rows, sys.rhs, p);

  FitResult res;
  res.theta_hat = ThetaVector::from_flat(theta, exponential ? 1 : 0);
  res.n_sites_used = sys.n_points_used;
  res.converged = true;
  const double wvol = obs.window.volume();
  double sse = 0;
  for (size_t r = 0; r < sys.rows.size(); ++r) {
    double fit = 0;
    for (int c = 0; c < p; ++c)
      fit += sys.rows[r][static_cast<size_t>(c)] * theta[static_cast<size_t>(c)];
    const double resid = fit - sys.rhs[r];
    sse += resid * resid;
    res.residuals.push_back(resid / wvol);
    res.residual_names.push_back("vare_row_" + std::to_string(r));
  }
  res.criterion = sse;
  (void)cfg;
  return res;
}

}  // namespace gibbslat
