#pragma once

#include <functional>
#include <vector>

namespace gibbslat {

struct OptimResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  int evaluations = 0;
};

// Derivative-free Nelder-Mead minimization with vertices projected into the
// box [lo, hi]. Stops when the simplex value spread falls under ftol.
OptimResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                        const std::vector<double>& x0, const std::vector<double>& lo,
                        const std::vector<double>& hi, double ftol, int max_iter);

// Projected gradient descent with backtracking line search (minimization).
OptimResult projected_gradient(
    const std::function<double(const std::vector<double>&, std::vector<double>*)>& f_grad,
    const std::vector<double>& x0, const std::vector<double>& lo, const std::vector<double>& hi,
    double ftol, int max_iter);

}  // namespace gibbslat
