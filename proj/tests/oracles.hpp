// oracles.hpp - Independent reference computations used by the tests. These
// deliberately avoid the library's evaluation paths: series summation instead
// of closed-form CGFs, literal O(t^2) queue formulas instead of running
// minima, and scaled matrix powers instead of eigensolvers.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

// log E[e^{theta N}] for N ~ Poisson(lambda) by truncated series over
// n = 0..200, accumulated in log space.
inline double poisson_cgf_series(double lambda, double theta) {
  double log_term = -lambda;  // n = 0
  double lse = log_term;
  for (int n = 1; n <= 200; ++n) {
    log_term += std::log(lambda) + theta - std::log(static_cast<double>(n));
    const double hi = std::max(lse, log_term);
    lse = hi + std::log(std::exp(lse - hi) + std::exp(log_term - hi));
  }
  return lse;
}

// log sum p_i e^{theta v_i} without the max-shift trick.
inline double finite_cgf_direct(const std::vector<double>& values,
                                const std::vector<double>& probs,
                                double theta) {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s += probs[i] * std::exp(theta * values[i]);
  }
  return std::log(s);
}

using Matrix = std::vector<std::vector<double>>;

inline Matrix mat_mul(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size();
  Matrix c(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

// M^t with power-of-two t via repeated squaring, rescaling each square to
// dodge overflow. Returns the matrix normalized by e^{log_scale}.
struct ScaledPower {
  Matrix m;
  double log_scale = 0.0;
};

inline void rescale(ScaledPower* p) {
  double mx = 0.0;
  for (const auto& row : p->m) {
    for (double v : row) mx = std::max(mx, std::abs(v));
  }
  if (mx > 0.0) {
    for (auto& row : p->m) {
      for (double& v : row) v /= mx;
    }
    p->log_scale += std::log(mx);
  }
}

inline ScaledPower matrix_power(const Matrix& m, std::uint64_t t) {
  const std::size_t n = m.size();
  ScaledPower acc;
  acc.m.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) acc.m[i][i] = 1.0;
  ScaledPower base{m, 0.0};
  rescale(&base);
  while (t > 0) {
    if (t & 1) {
      acc.m = mat_mul(acc.m, base.m);
      acc.log_scale += base.log_scale;
      rescale(&acc);
    }
    base.m = mat_mul(base.m, base.m);
    base.log_scale *= 2.0;
    rescale(&base);
    t >>= 1;
  }
  return acc;
}

// log E_{j0}[e^{theta S(t)}] = log of the j0-th row sum of M^t.
inline double log_moment(const Matrix& m, std::uint64_t t, std::size_t j0) {
  const ScaledPower p = matrix_power(m, t);
  double row = 0.0;
  for (double v : p.m[j0]) row += v;
  return p.log_scale + std::log(row);
}

// One-step growth rate of the moment at horizon t: the matrix-power estimate
// of kappa with the eigenvector prefactor cancelled.
inline double log_moment_ratio(const Matrix& m, std::uint64_t t,
                               std::size_t j0) {
  return log_moment(m, t + 1, j0) - log_moment(m, t, j0);
}

// Literal sup-form backlog: B(t) = max(0, max_s sum_{i=s+1}^t (a_i - c_i)).
// Arrays are 1-based over slots (index 0 unused).
inline double sup_form_backlog(const std::vector<double>& a,
                               const std::vector<double>& c, std::size_t t) {
  double best = 0.0;
  for (std::size_t s = 0; s <= t; ++s) {
    double sum = 0.0;
    for (std::size_t i = s + 1; i <= t; ++i) sum += a[i] - c[i];
    best = std::max(best, sum);
  }
  return best;
}

// Literal inf-form output: A*(t) = min_s (A(0,s) + S(s,t)).
inline double inf_form_output(const std::vector<double>& a,
                              const std::vector<double>& c, std::size_t t) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s <= t; ++s) {
    double sum = 0.0;
    for (std::size_t i = 1; i <= s; ++i) sum += a[i];
    for (std::size_t i = s + 1; i <= t; ++i) sum += c[i];
    best = std::min(best, sum);
  }
  return best;
}

}  // namespace oracle
