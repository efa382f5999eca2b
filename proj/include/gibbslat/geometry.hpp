#pragma once

#include <vector>

#include "gibbslat/common.hpp"
#include "gibbslat/rng.hpp"

namespace gibbslat {

// Axis-aligned box with half-open membership [lower, upper).
struct Window {
  Vec lower;
  Vec upper;
  int dim = 0;
  bool empty = false;

  static Window box(int dim, const Vec& lo, const Vec& hi);
  // Centered cube [-h, h)^dim.
  static Window cube(int dim, double halfwidth);

  bool contains(const Vec& x) const;
  double volume() const;
  double side(int k) const { return upper[k] - lower[k]; }
};

// Shrinks every side by r; an inverted side yields the empty window.
Window erode(const Window& w, double r);

Window intersect(const Window& a, const Window& b);

// Full-rank lattice spanned by integer combinations of `basis`.
struct LatticeSpec {
  int dim = 0;
  std::vector<Vec> basis;  // basis[k] = a_k

  static LatticeSpec integer(int dim);  // Z^dim

  void validate() const;
  bool is_integer_lattice() const;
  // Minimal nonzero lattice-vector norm (coefficient search over [-3,3]^dim;
  // exact for Z^dim and any well-conditioned basis).
  double size_parameter() const;
  Vec site_position(const std::array<int, kMaxDim>& idx) const;
  // Inverse basis, row-major dim x dim.
  std::vector<double> inverse_basis() const;
};

// Point of the fundamental domain, u = sum t_k a_k with t_k in [0,1).
struct GlobalShift {
  Vec u;
};

struct Site {
  std::array<int, kMaxDim> idx{};
  Vec pos;  // idx through the basis, plus the shift
};

// All shifted lattice sites inside w, ordered lexicographically by integer
// coordinates.
std::vector<Site> shifted_sites(const LatticeSpec& lat, const GlobalShift& u, const Window& w);

// Uniform draw from the fundamental domain.
GlobalShift sample_shift(const LatticeSpec& lat, Rng& rng);

// 1 iff i lies in w eroded by (m + range) and i+x lies in w eroded by range.
bool border_indicator(const Vec& i, const Vec& x, const Window& w, double m, double range);

}  // namespace gibbslat
