#include "gibbslat/optim.hpp"

#include <algorithm>
#include <cmath>

namespace gibbslat {

namespace {

void project(std::vector<double>& x, const std::vector<double>& lo, const std::vector<double>& hi) {
  for (size_t k = 0; k < x.size(); ++k) x[k] = std::clamp(x[k], lo[k], hi[k]);
}

}  // namespace

OptimResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                        const std::vector<double>& x0, const std::vector<double>& lo,
                        const std::vector<double>& hi, double ftol, int max_iter) {
  const size_t n = x0.size();
  OptimResult res;
  int evals = 0;
  auto eval = [&](std::vector<double> x) {
    project(x, lo, hi);
    ++evals;
    return std::make_pair(f(x), x);
  };

  // Initial simplex: x0 plus per-coordinate steps scaled to the box.
  std::vector<std::vector<double>> vx(n + 1, x0);
  std::vector<double> vf(n + 1);
  project(vx[0], lo, hi);
  vf[0] = f(vx[0]);
  ++evals;
  for (size_t k = 0; k < n; ++k) {
    std::vector<double> x = vx[0];
    double step = 0.15 * (1.0 + std::abs(x[k]));
    step = std::min(step, 0.25 * (hi[k] - lo[k]));
    if (x[k] + step > hi[k]) step = -step;
    x[k] += step;
    auto [val, xc] = eval(x);
    vx[k + 1] = xc;
    vf[k + 1] = val;
  }

  auto order = [&] {
    std::vector<size_t> idx(n + 1);
    for (size_t k = 0; k <= n; ++k) idx[k] = k;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return vf[a] < vf[b]; });
    std::vector<std::vector<double>> nx(n + 1);
    std::vector<double> nf(n + 1);
    for (size_t k = 0; k <= n; ++k) {
      nx[k] = vx[idx[k]];
      nf[k] = vf[idx[k]];
    }
    vx.swap(nx);
    vf.swap(nf);
  };

  for (int it = 0; it < max_iter; ++it) {
    order();
    if (std::abs(vf[n] - vf[0]) <= ftol * (1.0 + std::abs(vf[0]))) {
      res.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (size_t v = 0; v < n; ++v)
      for (size_t k = 0; k < n; ++k) centroid[k] += vx[v][k] / static_cast<double>(n);

    auto blend = [&](double alpha) {
      std::vector<double> x(n);
      for (size_t k = 0; k < n; ++k) x[k] = centroid[k] + alpha * (centroid[k] - vx[n][k]);
      return x;
    };

    auto [fr, xr] = eval(blend(1.0));  // reflection
    if (fr < vf[0]) {
      auto [fe, xe] = eval(blend(2.0));  // expansion
      if (fe < fr) {
        vx[n] = xe;
        vf[n] = fe;
      } else {
        vx[n] = xr;
        vf[n] = fr;
      }
    } else if (fr < vf[n - 1]) {
      vx[n] = xr;
      vf[n] = fr;
    } else {
      auto [fc, xc] = eval(blend(fr < vf[n] ? 0.5 : -0.5));  // contraction
      if (fc < std::min(fr, vf[n])) {
        vx[n] = xc;
        vf[n] = fc;
      } else {  // shrink toward the best vertex
        for (size_t v = 1; v <= n; ++v) {
          for (size_t k = 0; k < n; ++k) vx[v][k] = vx[0][k] + 0.5 * (vx[v][k] - vx[0][k]);
          project(vx[v], lo, hi);
          vf[v] = f(vx[v]);
          ++evals;
        }
      }
    }
  }
  order();
  res.x = vx[0];
  res.value = vf[0];
  res.evaluations = evals;
  return res;
}

OptimResult projected_gradient(
    const std::function<double(const std::vector<double>&, std::vector<double>*)>& f_grad,
    const std::vector<double>& x0, const std::vector<double>& lo, const std::vector<double>& hi,
    double ftol, int max_iter) {
  OptimResult res;
  std::vector<double> x = x0;
  project(x, lo, hi);
  std::vector<double> g;
  double fx = f_grad(x, &g);
  ++res.evaluations;
  double step = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> xn(x.size());
    double fn = 0.0;
    bool improved = false;
    for (int bt = 0; bt < 40; ++bt) {
      for (size_t k = 0; k < x.size(); ++k) xn[k] = x[k] - step * g[k];
      project(xn, lo, hi);
      fn = f_grad(xn, nullptr);
      ++res.evaluations;
      if (fn < fx) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      res.converged = true;
      break;
    }
    const double delta = fx - fn;
    x = xn;
    fx = f_grad(x, &g);
    ++res.evaluations;
    step *= 1.7;
    if (delta <= ftol * (1.0 + std::abs(fx))) {
      res.converged = true;
      break;
    }
  }
  res.x = x;
  res.value = fx;
  return res;
}

}  // namespace gibbslat
