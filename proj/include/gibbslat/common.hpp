#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gibbslat {

// Dimensions are runtime values but capped so points stay POD.
inline constexpr int kMaxDim = 4;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Exit-code-carrying error categories (CLI maps them to 2/3/4).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec {
  std::array<double, kMaxDim> v{};

  double& operator[](int k) { return v[static_cast<size_t>(k)]; }
  double operator[](int k) const { return v[static_cast<size_t>(k)]; }

  static Vec zero() { return Vec{}; }
  static Vec fill(int dim, double x) {
    Vec r;
    for (int k = 0; k < dim; ++k) r[k] = x;
    return r;
  }
};

inline Vec add(const Vec& a, const Vec& b, int dim) {
  Vec r;
  for (int k = 0; k < dim; ++k) r[k] = a[k] + b[k];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b, int dim) {
  Vec r;
  for (int k = 0; k < dim; ++k) r[k] = a[k] - b[k];
  return r;
}

inline double dist2(const Vec& a, const Vec& b, int dim) {
  double s = 0;
  for (int k = 0; k < dim; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

inline double norm2(const Vec& a, int dim) {
  double s = 0;
  for (int k = 0; k < dim; ++k) s += a[k] * a[k];
  return s;
}

inline double sum(const Vec& a, int dim) {
  double s = 0;
  for (int k = 0; k < dim; ++k) s += a[k];
  return s;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline double mean(const std::vector<double>& xs) {
  double s = 0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

// Sample standard deviation (n-1 denominator).
inline double sample_sd(const std::vector<double>& xs) {
  const size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(n - 1));
}

}  // namespace gibbslat
