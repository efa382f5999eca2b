#include <doctest.h>

#include <cmath>

#include "gibbslat/conditional_intensity.hpp"

using namespace gibbslat;

namespace {

Vec v2(double x, double y) {
  Vec v;
  v[0] = x;
  v[1] = y;
  return v;
}

Vec v1(double x) {
  Vec v;
  v[0] = x;
  return v;
}

PointsView view(const std::vector<Vec>& pts) {
  PointsView pv;
  pv.pts = &pts;
  return pv;
}

GibbsModel uniform1d_model(double theta2, double hardcore_r = 0.0, double range = 0.6) {
  GibbsModel gm;
  gm.move = MoveModel::uniform(Window::cube(1, 0.5));
  gm.interaction = InteractionModel::strauss(hardcore_r, range, theta2);
  gm.lattice = LatticeSpec::integer(1);
  return gm;
}

GibbsModel gaussian2d_model(double theta1, double theta2, double range = 0.5,
                            double hardcore_r = 0.0) {
  GibbsModel gm;
  gm.move = MoveModel::gaussian(2, theta1);
  gm.interaction = InteractionModel::strauss(hardcore_r, range, theta2);
  gm.lattice = LatticeSpec::integer(2);
  return gm;
}

}  // namespace

TEST_CASE("joint statistic concatenates move and pair parts") {
  const GibbsModel gm = gaussian2d_model(1.0, 0.5);
  std::vector<Vec> others = {v2(3.2, 4.0)};  // within 0.5 of i+x below
  const JointStatistic js = joint_statistic(gm, v2(0, 0), v2(3, 4), view(others));
  REQUIRE(js.s.size() == 2);
  CHECK(js.s[0] == doctest::Approx(25.0));
  CHECK(js.s[1] == doctest::Approx(1.0));
  CHECK_FALSE(js.hardcore);

  std::vector<Vec> empty;
  const GibbsModel gu = uniform1d_model(0.7);
  const JointStatistic j2 = joint_statistic(gu, v1(0), v1(0.1), view(empty));
  CHECK(j2.s == std::vector<double>{0.0});

  const GibbsModel gh = gaussian2d_model(1.0, 0.5, 0.5, 0.2);
  std::vector<Vec> tight = {v2(3.05, 4.0), v2(3.4, 4.0)};
  const JointStatistic j3 = joint_statistic(gh, v2(0, 0), v2(3, 4), view(tight));
  CHECK(j3.hardcore);
  CHECK(j3.s[1] == doctest::Approx(1.0));  // the in-band neighbor is still reported
}

TEST_CASE("log_lambda: interaction off, hard core, arithmetic") {
  const GibbsModel gm = gaussian2d_model(2.0, 0.0);
  std::vector<Vec> others = {v2(0.1, 0.2)};
  const ThetaVector th{{2.0}, {0.0}};
  const Vec x = v2(0.3, -0.2);
  CHECK(log_lambda(gm, th, v2(0, 0), x, view(others)) ==
        doctest::Approx(gm.move.log_density(x)));

  const GibbsModel gh = gaussian2d_model(1.0, 0.5, 0.5, 0.2);
  std::vector<Vec> tight = {v2(0.35, 0.0)};
  CHECK(log_lambda(gh, ThetaVector{{1.0}, {0.5}}, v2(0, 0), v2(0.3, 0), view(tight)) == -kInf);

  const GibbsModel gu = uniform1d_model(0.69);
  std::vector<Vec> one = {v1(0.4)};
  CHECK(log_lambda(gu, ThetaVector{{}, {0.69}}, v1(0), v1(0.1), view(one)) ==
        doctest::Approx(-0.69));
}

TEST_CASE("partition_z: normalized move density when interaction is off") {
  const GibbsModel gm = gaussian2d_model(1.0, 0.0);
  std::vector<Vec> empty;
  const QuadratureRule rule = quadrature(gm.move, 60);
  const double z = partition_z(gm, ThetaVector{{1.0}, {0.0}}, v2(0, 0), view(empty), rule);
  CHECK(std::abs(z - 1.0) < 1e-4);
}

TEST_CASE("partition_z: hard blocker removes known mass") {
  // Uniform on [-0.5,0.5], hard core 0.2, one point at i+0.6: the excluded
  // displacement set is (0.4, 0.5], so Z = 0.9.
  const GibbsModel gm = uniform1d_model(0.0, 0.2, 0.6);
  const ThetaVector th{{}, {0.0}};
  std::vector<Vec> blocker = {v1(0.6)};
  const QuadratureRule fine =
      refine_for_site(gm, v1(0), view(blocker), 10000, std::nullopt, RefineParams{1, 1, 1e-9, 12});
  CHECK(std::abs(partition_z(gm, th, v1(0), view(blocker), fine) - 0.9) < 1e-6);
  const QuadratureRule coarse =
      refine_for_site(gm, v1(0), view(blocker), 60, std::nullopt, RefineParams{1, 1, 1e-6, 8});
  CHECK(std::abs(partition_z(gm, th, v1(0), view(blocker), coarse) - 0.9) < 1e-4);

  const double papa = papangelou(gm, th, v1(0), v1(0.0), view(blocker), fine);
  CHECK(papa == doctest::Approx(1.0 / 0.9).epsilon(1e-5));
  CHECK(papangelou(gm, th, v1(0), v1(0.45), view(blocker), fine) == 0.0);
}

TEST_CASE("partition_z: fully blocked support is a degenerate-site error") {
  const GibbsModel gm = uniform1d_model(0.0, 2.5, 2.6);
  std::vector<Vec> blocker = {v1(0.0)};
  const QuadratureRule rule = quadrature(gm.move, 60);
  CHECK_THROWS_AS(partition_z(gm, ThetaVector{{}, {0.0}}, v1(0), view(blocker), rule),
                  NumericError);
}

TEST_CASE("log_lambda is affine in theta with slope -S") {
  const GibbsModel gm = gaussian2d_model(1.3, 0.4);
  std::vector<Vec> others = {v2(0.4, 0.1), v2(-0.3, 0.4), v2(1.2, 0.2)};
  Rng rng(59);
  for (int it = 0; it < 50; ++it) {
    const Vec x = v2(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
    const ThetaVector th{{0.5 + rng.uniform()}, {rng.uniform()}};
    const JointStatistic js = joint_statistic(gm, v2(0, 0), x, view(others));
    if (js.hardcore) continue;
    for (int j = 0; j < 2; ++j) {
      const double h = 1e-6;
      ThetaVector up = th, dn = th;
      (j == 0 ? up.theta1[0] : up.theta2[0]) += h;
      (j == 0 ? dn.theta1[0] : dn.theta2[0]) -= h;
      const double fd = (log_lambda(gm, up, v2(0, 0), x, view(others)) -
                         log_lambda(gm, dn, v2(0, 0), x, view(others))) /
                        (2 * h);
      double expected = -js.s[static_cast<size_t>(j)];
      if (j == 0) {
        // d/dtheta1 of -c(theta1) for the Gaussian is +d/(2 theta1)
        expected += gm.dim() / (2.0 * th.theta1[0]);
      }
      CHECK(fd == doctest::Approx(expected).epsilon(1e-6));
    }
  }
}

TEST_CASE("papangelou shift covariance is exact on dyadic data") {
  const GibbsModel gm = gaussian2d_model(1.0, 0.7);
  const ThetaVector th{{1.0}, {0.7}};
  std::vector<Vec> others = {v2(3.25, 2.5), v2(2.75, 2.125), v2(3.5, 1.875)};
  const Vec i = v2(3.0, 2.0);
  std::vector<Vec> translated;
  for (const Vec& p : others) translated.push_back(sub(p, i, 2));

  const QuadratureRule rule = quadrature(gm.move, 40);
  const Vec x = v2(0.25, -0.125);
  const double a = papangelou(gm, th, i, x, view(others), rule);
  const double b = papangelou(gm, th, v2(0, 0), x, view(translated), rule);
  CHECK(a == b);  // bitwise: all coordinates and differences are dyadic
}

TEST_CASE("bordered papangelou: interior equals plain, outside is zero") {
  const GibbsModel gm = gaussian2d_model(1.0, 0.5);
  const ThetaVector th{{1.0}, {0.5}};
  std::vector<Vec> others = {v2(0.4, 0.3)};
  const QuadratureRule rule = quadrature(gm.move, 60);
  const Window w = Window::cube(2, 40.0);
  const double m_n = 2.0;
  const Vec x = v2(0.2, 0.1);
  CHECK(papangelou_bordered(gm, th, v2(0, 0), x, view(others), rule, w, m_n) ==
        doctest::Approx(papangelou(gm, th, v2(0, 0), x, view(others), rule)));
  CHECK(papangelou_bordered(gm, th, v2(39.0, 0), x, view(others), rule, w, m_n) == 0.0);
}

TEST_CASE("bordered papangelou converges to plain on growing windows") {
  const GibbsModel gm = gaussian2d_model(1.0, 0.5);
  const ThetaVector th{{1.0}, {0.5}};
  std::vector<Vec> others = {v2(0.4, 0.3), v2(-0.7, 0.6)};
  const QuadratureRule rule = quadrature(gm.move, 60);
  const Vec x = v2(0.2, 0.1);
  const double plain = papangelou(gm, th, v2(0, 0), x, view(others), rule);
  double prev_gap = kInf;
  for (double half : {4.0, 6.0, 9.0}) {
    const Window w = Window::cube(2, half);
    const double b = papangelou_bordered(gm, th, v2(0, 0), x, view(others), rule, w, 1.0);
    const double gap = std::abs(b - plain);
    CHECK(gap <= prev_gap + 1e-12);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-9);
}

TEST_CASE("bordered papangelou renormalizes over the clipped support") {
  // Uniform moves near the window edge: displacements beyond +0.26 fall
  // outside the range-eroded window, so the kept mass is 0.76 and the
  // density renormalizes to 1/0.76 there.
  const GibbsModel gm = uniform1d_model(0.0, 0.0, 0.1);
  const ThetaVector th{{}, {0.0}};
  std::vector<Vec> empty;
  const Window w = Window::box(1, v1(-20.0), v1(0.36));
  // site clause: 0 in [-19.65, 0.01); point clause: 0+x in [-19.9, 0.26)
  const QuadratureRule rule = quadrature(gm.move, 2000);
  const double val = papangelou_bordered(gm, th, v1(0), v1(-0.25), view(empty), rule, w, 0.25);
  CHECK(val == doctest::Approx(1.0 / 0.76).epsilon(1e-3));
  CHECK(papangelou_bordered(gm, th, v1(0), v1(0.3), view(empty), rule, w, 0.25) == 0.0);
}

TEST_CASE("refined rule: normalization error and refinement decay") {
  // Random neighborhoods and parameters; refined Z against a much finer
  // reference. Smaller draw count than the acceptance gate, same engine.
  Rng rng(101);
  double worst = 0, mean_coarse = 0, mean_fine = 0;
  const int trials = 30;
  for (int it = 0; it < trials; ++it) {
    const double th1 = 0.5 + 3.5 * rng.uniform();
    const double th2 = 1.5 * rng.uniform();
    const double range = 0.3 + 0.7 * rng.uniform();
    const double hc = rng.uniform() < 0.5 ? 0.0 : 0.3 * range;
    const GibbsModel gm = gaussian2d_model(th1, th2, range, hc);
    const ThetaVector th{{th1}, {th2}};
    const Vec site = v2(0, 0);
    std::vector<Vec> others;
    const int n = 3 + static_cast<int>(rng.below(8));
    for (int k = 0; k < n; ++k) {
      const double r = (range + 1.0) * rng.uniform() + 0.5 * hc;
      const double a = 2 * M_PI * rng.uniform();
      others.push_back(v2(r * std::cos(a), r * std::sin(a)));
    }
    const RefineParams coarse = RefineParams::normalization_grade(th1, th1);
    RefineParams finer = coarse;
    finer.cell_err_tol /= 4.0;
    finer.max_depth += 1;
    const RefineParams reference{th1, th1, 1e-9, 14};
    const double zr =
        partition_z_cells(gm, th, site, view(others), 180, std::nullopt, reference);
    const double ec =
        std::abs(partition_z_cells(gm, th, site, view(others), 60, std::nullopt, coarse) / zr -
                 1.0);
    const double ef =
        std::abs(partition_z_cells(gm, th, site, view(others), 120, std::nullopt, finer) / zr -
                 1.0);
    worst = std::max(worst, ec);
    mean_coarse += ec / trials;
    mean_fine += ef / trials;
  }
  CHECK(worst < 2e-4);
  CHECK(mean_fine < 0.6 * mean_coarse);
}
