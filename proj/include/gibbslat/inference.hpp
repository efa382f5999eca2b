#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gibbslat/conditional_intensity.hpp"
#include "gibbslat/sampler.hpp"

namespace gibbslat {

enum class Framework { F1, F2 };

struct Observation {
  Framework framework = Framework::F1;
  std::vector<Vec> sites;   // F1 pairs
  std::vector<Vec> disps;   // F1 pairs
  std::vector<Vec> points;  // F2 list; for F1 derived as site + displacement
  Vec shift;
  Window window;

  static Observation from_f1(const PairPattern& p, const Vec& shift);
  static Observation from_f2(const PointPattern& p, const Vec& shift);
  void validate() const;
};

// Test functions receive the site, the displacement, the joint statistic at
// (site, x, configuration-without-that-site) and the parameter.
struct TestFunction {
  std::string name;
  std::function<double(const Vec& site, const Vec& x, const std::vector<double>& s,
                       const ThetaVector& theta)>
      eval;
};

std::vector<TestFunction> score_bank(int p);
TestFunction constant_test_function();

enum class OptimizerKind { Simplex, Gradient };
enum class BankKind { Score, Custom };

struct EstimatorConfig {
  double beta = 1.0;               // m_n = beta log|W_n|
  std::optional<double> fixed_m;   // compact-support override
  int quad_resolution = 60;
  double refine_tol = 1e-4;        // per-cell mass error budget for subdivision
  int refine_depth = 6;
  OptimizerKind optimizer = OptimizerKind::Simplex;
  BankKind bank = BankKind::Score;
  std::vector<TestFunction> custom_bank;
  std::optional<std::vector<double>> theta_lo;    // flat (theta1.., theta2..)
  std::optional<std::vector<double>> theta_hi;
  std::optional<std::vector<double>> theta_init;
  double ftol = 1e-8;
  int max_iter = 2000;
  // Half-width of the C1 band-edge taper in the variational path, as a
  // fraction of the interaction range.
  double variational_taper = 0.2;

  double resolve_m(const Window& w, const MoveModel& move) const;
};

struct FitResult {
  ThetaVector theta_hat;
  double criterion = 0.0;
  int n_sites_used = 0;
  bool converged = false;
  bool at_bound = false;
  std::vector<double> residuals;  // |W|^{-1} DLR(f_l) at theta_hat
  std::vector<std::string> residual_names;
};

// Precomputed border-corrected estimating-equation state for one F1
// observation: usable sites, their observed statistics, and the clipped
// site-refined quadrature with cached statistics at every node. Everything
// here is theta-independent; evaluations at different theta reuse it.
class DlrEngine {
 public:
  DlrEngine(const Observation& obs, const GibbsModel& gm, const EstimatorConfig& cfg,
            double theta1_lo, double theta1_hi, bool keep_positions);

  int n_sites() const { return static_cast<int>(sites_.size()); }
  double window_volume() const { return wvol_; }
  int p() const { return p_; }

  std::vector<double> dlr_score(const ThetaVector& theta) const;
  double lpl(const ThetaVector& theta) const;
  void lpl_with_gradient(const ThetaVector& theta, double* lpl_out,
                         std::vector<double>* grad_out) const;

  double dlr_general(const ThetaVector& theta, const TestFunction& f) const;
  // Raw (unscaled) observed-side and integral-side sums whose difference is
  // the DLR statistic.
  std::pair<double, double> ab_sums(const ThetaVector& theta, const TestFunction& f) const;

 private:
  // One refinement cell: per-axis edge indices into the site's coordinate
  // arrays plus the (constant) band counts over the cell. The move-density
  // mass of the cell is an exact per-axis cumulative difference, so the only
  // quadrature error left lives in cells still straddling an arc.
  struct Entry {
    std::array<uint16_t, 2 * kMaxDim> edge;  // lo,hi per axis
    std::array<uint8_t, 6> counts;
    uint8_t hc;
  };
  struct SiteData {
    Vec site;
    Vec xobs;
    std::vector<double> s_obs;
    std::array<std::vector<double>, kMaxDim> axis_coords;
    size_t begin = 0, end = 0;
    int min_count = 0, max_count = 0;  // over entries, per band sum (p2 == 1 fast path)
  };
  struct AxisTables {
    std::array<std::vector<double>, kMaxDim> g0;  // cumulative mass at coords
    std::array<std::vector<double>, kMaxDim> gs;  // cumulative statistic moment
  };

  void fill_axis_tables(const SiteData& sd, double theta1, AxisTables* tables) const;
  // Returns log of the normalized clipped partition function and fills the
  // conditional mean of the joint statistic.
  double site_logz_means(const SiteData& sd, const ThetaVector& theta, double* mean_s) const;

  int dim_ = 0;
  int p_ = 0;
  int p1_ = 0;
  int p2_ = 0;
  double wvol_ = 0.0;
  bool keep_positions_ = false;
  MoveModel move_;
  std::vector<SiteData> sites_;
  std::vector<Entry> entries_;
  std::vector<std::array<float, kMaxDim>> positions_;
};

// One-shot conveniences over a freshly built engine.
double dlr_statistic(const Observation& obs, const GibbsModel& gm, const ThetaVector& theta,
                     const TestFunction& f, const EstimatorConfig& cfg);
double tf_criterion(const Observation& obs, const GibbsModel& gm, const ThetaVector& theta,
                    const std::vector<TestFunction>& bank, const EstimatorConfig& cfg);
std::pair<double, std::vector<double>> lpl_and_gradient(const Observation& obs,
                                                        const GibbsModel& gm,
                                                        const ThetaVector& theta,
                                                        const EstimatorConfig& cfg);

FitResult fit_takacs_fiksel(const Observation& obs, const GibbsModel& gm,
                            const EstimatorConfig& cfg);

// Smooth window multiplier for the variational estimator; must vanish on
// the move-support boundary translates.
struct SmoothWindow {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
};

SmoothWindow default_smooth_window(const GibbsModel& gm, const Vec& shift);

// Stacked coordinate equations of the empirical variational identity,
// linear in theta: rows * theta = rhs at the estimator, and
// rhs - rows * theta_true is the empirical estimating-equation residual.
struct VariationalSystem {
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  int n_points_used = 0;
};

VariationalSystem variational_system(const Observation& obs, const GibbsModel& gm,
                                     double taper_frac = 0.2,
                                     const std::optional<SmoothWindow>& psi = std::nullopt);

// Linear estimator from the integration-by-parts identity; move family must
// be Uniform (gradient term vanishes) or ExponentialOrthant (constant).
FitResult fit_variational(const Observation& obs, const GibbsModel& gm,
                          const EstimatorConfig& cfg,
                          const std::optional<SmoothWindow>& psi = std::nullopt);

// Moment-matching starting point for theta1; theta2 starts at zero.
std::vector<double> default_theta_init(const Observation& obs, const GibbsModel& gm);
void default_theta_bounds(const std::vector<double>& init, const GibbsModel& gm,
                          std::vector<double>* lo, std::vector<double>* hi);

}  // namespace gibbslat
