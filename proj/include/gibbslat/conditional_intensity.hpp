#pragma once

#include <optional>
#include <vector>

#include "gibbslat/interactions.hpp"
#include "gibbslat/moves.hpp"

namespace gibbslat {

struct ThetaVector {
  std::vector<double> theta1;
  std::vector<double> theta2;

  int p() const { return static_cast<int>(theta1.size() + theta2.size()); }
  int p1() const { return static_cast<int>(theta1.size()); }

  // S is ordered (S1.., S2..), matching joint_statistic.
  double dot(const std::vector<double>& s) const;
  std::vector<double> flat() const;
  static ThetaVector from_flat(const std::vector<double>& v, int p1);
};

struct GibbsModel {
  MoveModel move;
  InteractionModel interaction;
  LatticeSpec lattice;

  int dim() const { return move.dim; }
  int p() const { return move.p1() + interaction.p2(); }
  ThetaVector theta() const;  // parameters currently stored in the components
  void validate() const;
};

struct JointStatistic {
  std::vector<double> s;  // (S1(x), band counts at i+x)
  bool hardcore = false;
};

JointStatistic joint_statistic(const GibbsModel& gm, const Vec& i, const Vec& x,
                               const PointsView& others);

// log of the unnormalized conditional density: -theta'S(i,x,gamma) - c(theta1);
// -inf outside the support or on hard-core violation.
double log_lambda(const GibbsModel& gm, const ThetaVector& theta, const Vec& i, const Vec& x,
                  const PointsView& others);

// sum_q w_q exp(log_lambda(x_q)); throws NumericError when every node is
// excluded (the conditional law would have no mass).
double partition_z(const GibbsModel& gm, const ThetaVector& theta, const Vec& i,
                   const PointsView& others, const QuadratureRule& quad);

double papangelou(const GibbsModel& gm, const ThetaVector& theta, const Vec& i, const Vec& x,
                  const PointsView& others, const QuadratureRule& quad);

// Border-corrected variant: numerator and denominator both carry the border
// indicator; the denominator keeps only nodes with i+x_q inside w eroded by
// the interaction range.
double papangelou_bordered(const GibbsModel& gm, const ThetaVector& theta, const Vec& i,
                           const Vec& x, const PointsView& others, const QuadratureRule& quad,
                           const Window& w, double m_n);

// Midpoint rule refined around the interaction discontinuities: cells
// straddling a hard-core or band-edge circle of some neighbor are split until
// their potential mass error drops under cell_err_tol (gauged against the
// move density at theta1_ref) or max_depth is reached. Keeps plain-midpoint
// behaviour away from the arcs, where the integrand is smooth.
struct RefineParams {
  double theta1_lo = 1.0;  // integration box covers the widest density
  double theta1_hi = 1.0;  // error budget covers the most peaked one
  double cell_err_tol = 1e-4;
  int max_depth = 6;

  // Meets the 2e-4 normalization gate (leaf budgets accumulate like sqrt(N)).
  static RefineParams normalization_grade(double t1lo, double t1hi) {
    return RefineParams{t1lo, t1hi, 2e-6, 10};
  }
  // Z stable to ~1e-3: plenty for estimation, an order of magnitude cheaper.
  static RefineParams fit_grade(double t1lo, double t1hi) {
    return RefineParams{t1lo, t1hi, 1e-4, 6};
  }
};

QuadratureRule refine_for_site(const GibbsModel& gm, const Vec& i, const PointsView& others,
                               int base_resolution, const std::optional<Window>& clip,
                               const RefineParams& params);

// Cell decomposition behind refine_for_site. Off the interaction arcs the
// band counts are constant per cell, so the move factor can be integrated
// exactly over each box; the estimating-equation engine relies on that.
struct CellBox {
  Vec lo, hi;
};

std::vector<CellBox> refine_cells_for_site(const GibbsModel& gm, const Vec& i,
                                           const PointsView& others, int base_resolution,
                                           const std::optional<Window>& clip,
                                           const RefineParams& params);

// Partition function over the refined cells with the move factor integrated
// exactly per cell (per-axis cumulative differences); normalized flavor, so
// theta2 = 0 gives the clipped move mass. This is the production Z behind
// the estimating equations.
double partition_z_cells(const GibbsModel& gm, const ThetaVector& theta, const Vec& i,
                         const PointsView& others, int base_resolution,
                         const std::optional<Window>& clip, const RefineParams& params);

// Per-axis cumulative mass and second/first moment of the normalized move
// density, used for exact per-cell integrals:
//   G0(u) = integral of the axis density up to u
//   GS(u) = integral of (u'^2 axis density) for Gaussian,
//           integral of (u' axis density) for the exponential orthant,
//           unused for uniform moves.
void move_axis_cumulatives(const MoveModel& move, double theta1, int axis,
                           const std::vector<double>& coords, std::vector<double>* g0,
                           std::vector<double>* gs);

}  // namespace gibbslat
