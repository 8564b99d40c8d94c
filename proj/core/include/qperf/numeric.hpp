// numeric.hpp - Small numerical kernels shared across the library: adaptive
// quadrature, bracketed root finding, golden-section minimization, and
// deterministic float formatting.

#pragma once

#include <functional>
#include <string>

namespace qperf {

inline double clamp01(double v) {
  if (v < 0.0) return 0.0;
  if (v > 1.0) return 1.0;
  return v;
}

// Integrate f over [a, b] with adaptive Simpson refinement. The tolerance is
// relative to the accumulated integral (with an absolute floor for integrals
// near zero). Throws std::runtime_error when the recursion depth is exhausted
// before the tolerance is met.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, int max_depth = 48);

// Bisection on [lo, hi] assuming f(lo) and f(hi) bracket a sign change.
// Stops when the interval width drops below rel_tol * max(1, |midpoint|).
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double rel_tol, int max_iter = 200);

struct MinimizeResult {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section search for a minimum of f on [a, b]. Intended for unimodal
// f; on non-unimodal input it converges to some local minimum inside [a, b].
MinimizeResult golden_minimize(const std::function<double(double)>& f,
                               double a, double b, double rel_tol,
                               int max_iter = 200);

// log(sum_{m=0}^{n} e^{m*k}), evaluated without overflow. Used for the
// geometric sums that appear in union-of-Chernoff bounds.
double log_geometric_sum(double k, long long n);

// Shortest round-trip decimal form of v (std::to_chars). Locale-independent,
// identical across runs of the same binary; the CSV and config writers rely
// on that for byte-identical output.
std::string format_double(double v);

}  // namespace qperf
