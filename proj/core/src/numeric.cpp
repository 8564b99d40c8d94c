#include <qperf/numeric.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qperf {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_recurse(const std::function<double(double)>& f, double a,
                       double b, double fa, double fm, double fb, double whole,
                       double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    throw std::runtime_error("adaptive_simpson: max recursion depth reached");
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, int max_depth) {
  if (!(b >= a)) throw std::invalid_argument("adaptive_simpson: b < a");
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(fa, fm, fb, b - a);
  const double scale = std::max(std::abs(whole), 1e-300);
  const double tol = std::max(rel_tol * scale, 1e-300);
  return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double rel_tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw std::invalid_argument("bisect_root: endpoints do not bracket a root");
  }
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) return mid;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

MinimizeResult golden_minimize(const std::function<double(double)>& f,
                               double a, double b, double rel_tol,
                               int max_iter) {
  if (!(b >= a)) throw std::invalid_argument("golden_minimize: b < a");
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < max_iter; ++i) {
    if (b - a <= rel_tol * std::max(1.0, std::abs(a) + std::abs(b))) break;
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

double log_geometric_sum(double k, long long n) {
  if (n < 0) throw std::invalid_argument("log_geometric_sum: n < 0");
  if (n == 0) return 0.0;
  if (k == 0.0) return std::log(static_cast<double>(n) + 1.0);
  // sum_{m=0}^{n} e^{mk} = (e^{(n+1)k} - 1) / (e^k - 1)
  if (k > 0.0) {
    // factor out e^{nk}: e^{nk} (1 - e^{-(n+1)k}) / (1 - e^{-k})
    const double num = std::log(-std::expm1(-(static_cast<double>(n) + 1.0) * k));
    const double den = std::log(-std::expm1(-k));
    return static_cast<double>(n) * k + num - den;
  }
  const double num = std::log(-std::expm1((static_cast<double>(n) + 1.0) * k));
  const double den = std::log(-std::expm1(k));
  return num - den;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace qperf
