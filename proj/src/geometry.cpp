#include "gibbslat/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace gibbslat {

Window Window::box(int dim, const Vec& lo, const Vec& hi) {
  Window w;
  w.dim = dim;
  w.lower = lo;
  w.upper = hi;
  for (int k = 0; k < dim; ++k)
    if (!(lo[k] <= hi[k])) w.empty = true;
  return w;
}

Window Window::cube(int dim, double halfwidth) {
  return box(dim, Vec::fill(dim, -halfwidth), Vec::fill(dim, halfwidth));
}

bool Window::contains(const Vec& x) const {
  if (empty) return false;
  for (int k = 0; k < dim; ++k)
    if (x[k] < lower[k] || x[k] >= upper[k]) return false;
  return true;
}

double Window::volume() const {
  if (empty) return 0.0;
  double v = 1.0;
  for (int k = 0; k < dim; ++k) v *= upper[k] - lower[k];
  return v;
}

Window erode(const Window& w, double r) {
  if (w.empty) return w;
  Window e = w;
  for (int k = 0; k < w.dim; ++k) {
    e.lower[k] = w.lower[k] + r;
    e.upper[k] = w.upper[k] - r;
    if (e.lower[k] > e.upper[k]) e.empty = true;
  }
  return e;
}

Window intersect(const Window& a, const Window& b) {
  Window r = a;
  if (a.empty || b.empty) {
    r.empty = true;
    return r;
  }
  for (int k = 0; k < a.dim; ++k) {
    r.lower[k] = std::max(a.lower[k], b.lower[k]);
    r.upper[k] = std::min(a.upper[k], b.upper[k]);
    if (r.lower[k] >= r.upper[k]) r.empty = true;
  }
  return r;
}

LatticeSpec LatticeSpec::integer(int dim) {
  LatticeSpec l;
  l.dim = dim;
  l.basis.resize(static_cast<size_t>(dim));
  for (int k = 0; k < dim; ++k) l.basis[static_cast<size_t>(k)][k] = 1.0;
  return l;
}

bool LatticeSpec::is_integer_lattice() const {
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if (basis[static_cast<size_t>(r)][c] != (r == c ? 1.0 : 0.0)) return false;
  return true;
}

namespace {

// Row-major dim x dim inverse by Gauss-Jordan with partial pivoting.
std::vector<double> invert(const std::vector<double>& m, int dim) {
  std::vector<double> a = m;
  std::vector<double> inv(static_cast<size_t>(dim * dim), 0.0);
  for (int k = 0; k < dim; ++k) inv[static_cast<size_t>(k * dim + k)] = 1.0;
  for (int col = 0; col < dim; ++col) {
    int piv = col;
    for (int r = col + 1; r < dim; ++r)
      if (std::abs(a[static_cast<size_t>(r * dim + col)]) >
          std::abs(a[static_cast<size_t>(piv * dim + col)]))
        piv = r;
    if (std::abs(a[static_cast<size_t>(piv * dim + col)]) < 1e-14)
      throw ConfigError("lattice basis is rank deficient");
    if (piv != col)
      for (int c = 0; c < dim; ++c) {
        std::swap(a[static_cast<size_t>(piv * dim + c)], a[static_cast<size_t>(col * dim + c)]);
        std::swap(inv[static_cast<size_t>(piv * dim + c)],
                  inv[static_cast<size_t>(col * dim + c)]);
      }
    const double d = a[static_cast<size_t>(col * dim + col)];
    for (int c = 0; c < dim; ++c) {
      a[static_cast<size_t>(col * dim + c)] /= d;
      inv[static_cast<size_t>(col * dim + c)] /= d;
    }
    for (int r = 0; r < dim; ++r) {
      if (r == col) continue;
      const double f = a[static_cast<size_t>(r * dim + col)];
      if (f == 0.0) continue;
      for (int c = 0; c < dim; ++c) {
        a[static_cast<size_t>(r * dim + c)] -= f * a[static_cast<size_t>(col * dim + c)];
        inv[static_cast<size_t>(r * dim + c)] -= f * inv[static_cast<size_t>(col * dim + c)];
      }
    }
  }
  return inv;
}

}  // namespace

void LatticeSpec::validate() const {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("lattice dimension must be in [1,4]");
  if (static_cast<int>(basis.size()) != dim) throw ConfigError("lattice basis size != dimension");
  inverse_basis();  // throws on rank deficiency
  if (size_parameter() <= 0.0) throw ConfigError("lattice size parameter must be positive");
}

double LatticeSpec::size_parameter() const {
  double best = kInf;
  std::array<int, kMaxDim> c{};
  const int lo = -3, hi = 3;
  // Odometer over coefficient vectors in [-3,3]^dim.
  for (int k = 0; k < dim; ++k) c[static_cast<size_t>(k)] = lo;
  while (true) {
    bool all_zero = true;
    for (int k = 0; k < dim; ++k)
      if (c[static_cast<size_t>(k)] != 0) all_zero = false;
    if (!all_zero) {
      Vec p;
      for (int k = 0; k < dim; ++k)
        for (int j = 0; j < dim; ++j)
          p[j] += c[static_cast<size_t>(k)] * basis[static_cast<size_t>(k)][j];
      best = std::min(best, std::sqrt(norm2(p, dim)));
    }
    int k = 0;
    while (k < dim && ++c[static_cast<size_t>(k)] > hi) c[static_cast<size_t>(k++)] = lo;
    if (k == dim) break;
  }
  return best;
}

Vec LatticeSpec::site_position(const std::array<int, kMaxDim>& idx) const {
  Vec p;
  for (int k = 0; k < dim; ++k)
    for (int j = 0; j < dim; ++j) p[j] += idx[static_cast<size_t>(k)] * basis[static_cast<size_t>(k)][j];
  return p;
}

std::vector<double> LatticeSpec::inverse_basis() const {
  std::vector<double> m(static_cast<size_t>(dim * dim));
  // Column k of m is basis vector a_k, so m maps coefficients to positions.
  for (int k = 0; k < dim; ++k)
    for (int j = 0; j < dim; ++j) m[static_cast<size_t>(j * dim + k)] = basis[static_cast<size_t>(k)][j];
  return invert(m, dim);
}

std::vector<Site> shifted_sites(const LatticeSpec& lat, const GlobalShift& u, const Window& w) {
  std::vector<Site> out;
  if (w.empty) return out;
  const int d = lat.dim;

  // Integer coefficient bounds from the preimage of the window corners.
  const std::vector<double> binv = lat.inverse_basis();
  std::array<double, kMaxDim> clo{}, chi{};
  for (int k = 0; k < d; ++k) {
    clo[static_cast<size_t>(k)] = kInf;
    chi[static_cast<size_t>(k)] = -kInf;
  }
  const int ncorners = 1 << d;
  for (int mask = 0; mask < ncorners; ++mask) {
    Vec corner;
    for (int k = 0; k < d; ++k)
      corner[k] = ((mask >> k) & 1) ? w.upper[k] : w.lower[k];
    const Vec rel = sub(corner, u.u, d);
    for (int r = 0; r < d; ++r) {
      double t = 0;
      for (int c = 0; c < d; ++c) t += binv[static_cast<size_t>(r * d + c)] * rel[c];
      clo[static_cast<size_t>(r)] = std::min(clo[static_cast<size_t>(r)], t);
      chi[static_cast<size_t>(r)] = std::max(chi[static_cast<size_t>(r)], t);
    }
  }

  std::array<int, kMaxDim> lo{}, hi{}, idx{};
  for (int k = 0; k < d; ++k) {
    lo[static_cast<size_t>(k)] = static_cast<int>(std::floor(clo[static_cast<size_t>(k)])) - 1;
    hi[static_cast<size_t>(k)] = static_cast<int>(std::ceil(chi[static_cast<size_t>(k)])) + 1;
  }

  idx = lo;
  while (true) {
    Vec pos = add(lat.site_position(idx), u.u, d);
    if (w.contains(pos)) {
      Site s;
      s.idx = idx;
      s.pos = pos;
      out.push_back(s);
    }
    int k = d - 1;  // last coordinate fastest: lexicographic output order
    while (k >= 0) {
      if (++idx[static_cast<size_t>(k)] <= hi[static_cast<size_t>(k)]) break;
      idx[static_cast<size_t>(k)] = lo[static_cast<size_t>(k)];
      --k;
    }
    if (k < 0) break;
  }
  return out;
}

GlobalShift sample_shift(const LatticeSpec& lat, Rng& rng) {
  Vec u;
  for (int k = 0; k < lat.dim; ++k) {
    const double t = rng.uniform();
    for (int j = 0; j < lat.dim; ++j) u[j] += t * lat.basis[static_cast<size_t>(k)][j];
  }
  return GlobalShift{u};
}

bool border_indicator(const Vec& i, const Vec& x, const Window& w, double m, double range) {
  if (w.empty) return false;
  return erode(w, m + range).contains(i) && erode(w, range).contains(add(i, x, w.dim));
}

}  // namespace gibbslat
