#include "gibbslat/moves.hpp"

#include <cmath>

namespace gibbslat {

MoveModel MoveModel::uniform(const Window& box) {
  MoveModel m;
  m.family = MoveFamily::Uniform;
  m.dim = box.dim;
  m.support = box;
  return m;
}

MoveModel MoveModel::gaussian(int dim, double theta1, double mass_tol) {
  MoveModel m;
  m.family = MoveFamily::GaussianIsotropic;
  m.dim = dim;
  m.theta1 = theta1;
  m.mass_tol = mass_tol;
  m.own_truncation_radius = m.truncation_radius_at(theta1);
  return m;
}

MoveModel MoveModel::exponential(int dim, double theta1, double mass_tol) {
  MoveModel m;
  m.family = MoveFamily::ExponentialOrthant;
  m.dim = dim;
  m.theta1 = theta1;
  m.mass_tol = mass_tol;
  m.own_truncation_radius = m.truncation_radius_at(theta1);
  return m;
}

void MoveModel::validate() const {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("move dimension must be in [1,4]");
  if (family == MoveFamily::Uniform) {
    if (support.empty || support.volume() <= 0.0)
      throw ConfigError("uniform move support must have positive volume");
  } else if (!(theta1 > 0.0)) {
    throw ConfigError("move theta1 must be positive");
  }
}

std::vector<double> MoveModel::s1(const Vec& x) const {
  if (!in_support(x)) throw DataError("move statistic evaluated outside the support");
  if (family == MoveFamily::Uniform) return {};
  return {s1_scalar(x)};
}

double MoveModel::s1_scalar(const Vec& x) const {
  switch (family) {
    case MoveFamily::Uniform:
      return 0.0;
    case MoveFamily::GaussianIsotropic:
      return norm2(x, dim);
    case MoveFamily::ExponentialOrthant:
      return sum(x, dim);
  }
  return 0.0;
}

bool MoveModel::in_support(const Vec& x) const {
  switch (family) {
    case MoveFamily::Uniform:
      // Support membership is closed on both sides; the boundary carries no mass.
      for (int k = 0; k < dim; ++k)
        if (x[k] < support.lower[k] || x[k] > support.upper[k]) return false;
      return true;
    case MoveFamily::GaussianIsotropic:
      return true;
    case MoveFamily::ExponentialOrthant:
      for (int k = 0; k < dim; ++k)
        if (x[k] < 0.0) return false;
      return true;
  }
  return false;
}

double MoveModel::log_partition_at(double th) const {
  switch (family) {
    case MoveFamily::Uniform:
      return std::log(support.volume());
    case MoveFamily::GaussianIsotropic:
      return 0.5 * dim * std::log(M_PI / th);
    case MoveFamily::ExponentialOrthant:
      return -dim * std::log(th);
  }
  return 0.0;
}

double MoveModel::log_density(const Vec& x) const {
  if (!in_support(x)) return -kInf;
  return -theta1 * s1_scalar(x) - log_partition();
}

double MoveModel::truncation_radius_at(double th) const {
  switch (family) {
    case MoveFamily::Uniform: {
      double r = 0;
      for (int k = 0; k < dim; ++k)
        r = std::max(r, std::max(std::abs(support.lower[k]), std::abs(support.upper[k])));
      return r;
    }
    case MoveFamily::GaussianIsotropic: {
      // Smallest t with dim * erfc(t sqrt(th)) < mass_tol (per-coordinate
      // union bound on the box tail).
      double lo = 0.0, hi = 1.0;
      const double s = std::sqrt(th);
      while (dim * std::erfc(hi * s) >= mass_tol) hi *= 2.0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (dim * std::erfc(mid * s) < mass_tol ? hi : lo) = mid;
      }
      return hi;
    }
    case MoveFamily::ExponentialOrthant:
      return std::log(dim / mass_tol) / th;
  }
  return 0.0;
}

Window MoveModel::integration_box_at(double th) const {
  switch (family) {
    case MoveFamily::Uniform:
      return support;
    case MoveFamily::GaussianIsotropic: {
      const double t = truncation_radius_at(th);
      return Window::box(dim, Vec::fill(dim, -t), Vec::fill(dim, t));
    }
    case MoveFamily::ExponentialOrthant: {
      const double t = truncation_radius_at(th);
      return Window::box(dim, Vec::zero(), Vec::fill(dim, t));
    }
  }
  return support;
}

Vec MoveModel::sample(Rng& rng) const {
  switch (family) {
    case MoveFamily::Uniform: {
      Vec x;
      for (int k = 0; k < dim; ++k)
        x[k] = support.lower[k] + rng.uniform() * (support.upper[k] - support.lower[k]);
      return x;
    }
    case MoveFamily::GaussianIsotropic: {
      // Per-coordinate N(0, 1/(2 theta1)); redraw outside the truncation box.
      const double sd = 1.0 / std::sqrt(2.0 * theta1);
      const double t = own_truncation_radius;
      while (true) {
        Vec x;
        bool ok = true;
        for (int k = 0; k < dim; ++k) {
          x[k] = sd * rng.normal();
          if (std::abs(x[k]) > t) ok = false;
        }
        if (ok) return x;
      }
    }
    case MoveFamily::ExponentialOrthant: {
      const double t = own_truncation_radius;
      while (true) {
        Vec x;
        bool ok = true;
        for (int k = 0; k < dim; ++k) {
          x[k] = rng.exponential() / theta1;
          if (x[k] > t) ok = false;
        }
        if (ok) return x;
      }
    }
  }
  return Vec::zero();
}

Vec MoveModel::initial_displacement() const {
  if (family == MoveFamily::ExponentialOrthant) return Vec::fill(dim, 1.0 / theta1);
  return Vec::zero();
}

std::vector<double> MoveModel::axis_edges(int axis, int resolution, double theta_box,
                                          double theta_grade) const {
  if (resolution < 2) throw ConfigError("quadrature resolution must be >= 2");
  std::vector<double> edges(static_cast<size_t>(resolution) + 1);
  if (family == MoveFamily::ExponentialOrthant) {
    const double t = truncation_radius_at(theta_box);
    const double c = 1.0 - std::exp(-theta_grade * t / 3.0);
    for (int j = 0; j <= resolution; ++j) {
      const double u = c * static_cast<double>(j) / resolution;
      edges[static_cast<size_t>(j)] =
          j == resolution ? t : -3.0 / theta_grade * std::log1p(-u);
    }
    return edges;
  }
  const Window box = integration_box_at(theta_box);
  const double lo = box.lower[axis];
  const double h = box.side(axis) / resolution;
  for (int j = 0; j <= resolution; ++j) edges[static_cast<size_t>(j)] = lo + j * h;
  edges.back() = box.upper[axis];
  return edges;
}

QuadratureRule midpoint_rule(const Window& box, int resolution) {
  if (resolution < 2) throw ConfigError("quadrature resolution must be >= 2");
  if (box.empty) throw ConfigError("quadrature over an empty box");
  const int d = box.dim;
  QuadratureRule rule;
  rule.dim = d;
  double cellvol = 1.0;
  std::array<double, kMaxDim> h{};
  for (int k = 0; k < d; ++k) {
    h[static_cast<size_t>(k)] = box.side(k) / resolution;
    cellvol *= h[static_cast<size_t>(k)];
  }
  std::array<int, kMaxDim> idx{};
  const size_t total = [&] {
    size_t t = 1;
    for (int k = 0; k < d; ++k) t *= static_cast<size_t>(resolution);
    return t;
  }();
  rule.nodes.reserve(total);
  rule.weights.reserve(total);
  while (true) {
    Vec x;
    for (int k = 0; k < d; ++k)
      x[k] = box.lower[k] + (idx[static_cast<size_t>(k)] + 0.5) * h[static_cast<size_t>(k)];
    rule.nodes.push_back(x);
    rule.weights.push_back(cellvol);
    int k = d - 1;
    while (k >= 0) {
      if (++idx[static_cast<size_t>(k)] < resolution) break;
      idx[static_cast<size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return rule;
}

QuadratureRule quadrature(const MoveModel& m, int resolution) {
  const int d = m.dim;
  std::vector<std::vector<double>> edges(static_cast<size_t>(d));
  for (int k = 0; k < d; ++k) edges[static_cast<size_t>(k)] = m.axis_edges(k, resolution, m.theta1, m.theta1);

  QuadratureRule rule;
  rule.dim = d;
  rule.truncation_radius = m.truncation_radius_at(m.family == MoveFamily::Uniform ? 0.0 : m.theta1);
  std::array<int, kMaxDim> idx{};
  while (true) {
    Vec x;
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      const auto& e = edges[static_cast<size_t>(k)];
      const double a = e[static_cast<size_t>(idx[static_cast<size_t>(k)])];
      const double b = e[static_cast<size_t>(idx[static_cast<size_t>(k)]) + 1];
      x[k] = 0.5 * (a + b);
      w *= b - a;
    }
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
    int k = d - 1;
    while (k >= 0) {
      if (++idx[static_cast<size_t>(k)] < resolution) break;
      idx[static_cast<size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return rule;
}

}  // namespace gibbslat
