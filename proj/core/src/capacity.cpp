#include <qperf/capacity.hpp>

#include <cmath>
#include <stdexcept>

#include <qperf/numeric.hpp>

namespace qperf {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kPi = 3.141592653589793;

// Mean photon number of the thermal mode at dimensionless frequency x,
// extended by 0 at x = 0 (1/(e^{1/x}-1) vanishes faster than any power).
double thermal_occupation(double x) {
  if (x <= 0.0) return 0.0;
  const double d = std::expm1(1.0 / x);
  if (!std::isfinite(d)) return 0.0;
  return 1.0 / d;
}

double power_integrand(double x) {
  if (x <= 0.0) return 0.0;
  return thermal_occupation(x) / x;
}

double rate_integrand(double x) { return g_function(thermal_occupation(x)); }

double power_integral(double y0) {
  return adaptive_simpson(power_integrand, 0.0, y0, 1e-11);
}

}  // namespace

double g_function(double x) {
  if (x < 0.0) throw std::domain_error("g_function: x must be nonnegative");
  if (x == 0.0) return 0.0;
  return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

double binary_entropy(double x) {
  if (x < 0.0 || x > 1.0) {
    throw std::domain_error("binary_entropy: x must lie in [0, 1]");
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double broadband_lossy_capacity(const BroadbandLossySpec& spec) {
  if (spec.eta < 0.0 || spec.eta > 1.0) {
    throw std::domain_error("broadband_lossy_capacity: eta must lie in [0, 1]");
  }
  if (spec.power_ratio < 0.0) {
    throw std::domain_error(
        "broadband_lossy_capacity: power ratio must be nonnegative");
  }
  return std::sqrt(spec.eta) / kLn2 * std::sqrt(kPi * spec.power_ratio / 3.0);
}

double freespace_mode_parameter(const FreeSpaceSpec& spec) {
  if (!(spec.power_ratio > 0.0)) {
    throw std::domain_error(
        "freespace_mode_parameter: power ratio must be positive");
  }
  constexpr double kCeiling = 1e6;
  double hi = 1.0;
  while (power_integral(hi) < spec.power_ratio) {
    hi *= 2.0;
    if (hi > kCeiling) {
      throw std::runtime_error(
          "freespace_mode_parameter: no bracket below the y0 ceiling");
    }
  }
  const auto f = [&](double y) { return power_integral(y) - spec.power_ratio; };
  return bisect_root(f, 1e-9, hi, 1e-10);
}

double freespace_capacity(const FreeSpaceSpec& spec) {
  const double y0 = freespace_mode_parameter(spec);
  const double rate = adaptive_simpson(rate_integrand, 0.0, y0, 1e-11);
  return spec.omega_c / (2.0 * kPi * y0) * rate;
}

double attenuation_quantum_capacity(double l, double l_a, CapacityMode mode) {
  if (!(l_a > 0.0)) {
    throw std::domain_error(
        "attenuation_quantum_capacity: absorption length must be positive");
  }
  const double eta = std::exp(-l / l_a);
  if (eta >= 1.0) {
    throw std::domain_error(
        "attenuation_quantum_capacity: eta = 1 gives infinite capacity");
  }
  if (eta <= 0.0) {
    throw std::domain_error(
        "attenuation_quantum_capacity: eta underflowed to 0");
  }
  // log2(eta) via -l/l_a directly; -expm1 keeps 1-eta accurate for small l.
  const double q = (-l / l_a) / kLn2 - std::log2(-std::expm1(-l / l_a));
  if (mode == CapacityMode::usable && q < 0.0) return 0.0;
  return q;
}

QubitCapacityResult qubit_channel_capacity_detail(double alpha, double beta) {
  const double c2a = std::cos(2.0 * alpha);
  const double c2b = std::cos(2.0 * beta);
  if (!(c2a / c2b > 0.0)) return {0.0, 0.0};

  const double ca2 = std::cos(alpha) * std::cos(alpha);
  const double sa2 = std::sin(alpha) * std::sin(alpha);
  const double sb2 = std::sin(beta) * std::sin(beta);
  const auto objective = [&](double p) {
    const double u = clamp01(p * ca2 + (1.0 - p) * sb2);
    const double w = clamp01(p * sa2 + (1.0 - p) * sb2);
    return binary_entropy(u) - binary_entropy(w);
  };

  // Grid pass to bracket the global maximum, then golden-section refinement.
  constexpr int kGridPoints = 1024;
  double best_p = 0.0;
  double best_v = objective(0.0);
  for (int i = 1; i <= kGridPoints; ++i) {
    const double p = static_cast<double>(i) / kGridPoints;
    const double v = objective(p);
    if (v > best_v) {
      best_v = v;
      best_p = p;
    }
  }
  const double lo = std::max(0.0, best_p - 1.0 / kGridPoints);
  const double hi = std::min(1.0, best_p + 1.0 / kGridPoints);
  const auto neg = [&](double p) { return -objective(p); };
  const MinimizeResult m = golden_minimize(neg, lo, hi, 1e-10, 400);
  double p_star = m.x;
  double value = -m.value;
  if (best_v > value) {
    p_star = best_p;
    value = best_v;
  }
  return {clamp01(value), p_star};
}

double qubit_channel_capacity(double alpha, double beta) {
  return qubit_channel_capacity_detail(alpha, beta).value;
}

double channel_capacity(const ChannelSpec& spec) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BroadbandLossySpec>) {
          return broadband_lossy_capacity(s);
        } else if constexpr (std::is_same_v<T, FreeSpaceSpec>) {
          return freespace_capacity(s);
        } else if constexpr (std::is_same_v<T, AttenuationSpec>) {
          return attenuation_quantum_capacity(s.l, s.l_a);
        } else {
          return qubit_channel_capacity(s.alpha, s.beta);
        }
      },
      spec);
}

double cumulative_capacity(const CapacitySequence& seq, std::size_t m,
                           std::size_t n) {
  if (m > n || n >= seq.values.size()) {
    throw std::out_of_range("cumulative_capacity: slot window out of range");
  }
  double sum = 0.0;
  for (std::size_t i = m; i <= n; ++i) sum += seq.values[i];
  return sum;
}

}  // namespace qperf
