#include <qperf/bounds.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <qperf/numeric.hpp>

namespace qperf {

std::string to_string(Measure m) {
  switch (m) {
    case Measure::backlog: return "backlog";
    case Measure::delay: return "delay";
    case Measure::throughput: return "throughput";
  }
  return "?";
}

std::string to_string(BoundSide s) {
  switch (s) {
    case BoundSide::upper_on_tail: return "upper_on_tail";
    case BoundSide::upper_on_cdf: return "upper_on_cdf";
    case BoundSide::lower_on_cdf: return "lower_on_cdf";
  }
  return "?";
}

namespace {

void require_positive_theta(double theta) {
  if (!(theta > 0.0)) {
    throw std::invalid_argument("bounds: theta must be positive");
  }
}

double holder_conjugate(double p) {
  if (!(p > 1.0)) {
    throw std::invalid_argument("bounds: Hoelder p must exceed 1");
  }
  return p / (p - 1.0);
}

// Clamped exponential of a composite exponent. Overflow lands on +inf and is
// clamped to 1 (vacuous); underflow lands on 0.
double chernoff_value(double exponent) { return clamp01(std::exp(exponent)); }

struct ClippedScenario {
  IncrementDistribution arrival;
  IncrementDistribution capacity_plus;  // [q]^+
  std::size_t horizon;
};

ClippedScenario clipped_iid(const Scenario& scn) {
  return {iid_dist(scn.arrival), iid_dist(scn.capacity).clipped_nonnegative(),
          scn.horizon};
}

void require_regime(const Scenario& scn, Regime regime, const char* what) {
  if (scn.regime != regime) {
    throw std::invalid_argument(std::string(what) +
                                ": wrong regime for this bound");
  }
}

// Exponential side of a Markov additive band: kappa plus the eigenvector
// prefactor ratios used by the distribution bounds.
struct MapSide {
  double kappa = 0.0;
  double pref_initial = 1.0;  // h_{J0} / min_j h_j
  double pref_max = 1.0;      // max_k h_k / min_j h_j
};

MapSide map_side(const MapKernel& kernel, std::size_t initial_state,
                 double theta) {
  const EigenPair e = pf_eigenpair(kernel, theta);
  const double mn = *std::min_element(e.h.begin(), e.h.end());
  const double mx = *std::max_element(e.h.begin(), e.h.end());
  return {e.kappa, e.h[initial_state] / mn, mx / mn};
}

Band make_band(double lower_raw, double upper_raw) {
  Band b;
  b.lower = clamp01(lower_raw);
  b.upper = clamp01(upper_raw);
  b.lower_vacuous = !(lower_raw > 0.0);
  b.upper_vacuous = !(upper_raw < 1.0);
  return b;
}

}  // namespace

// ---------------------------------------------------------------------------
// Classical transient bounds.

double classical_backlog_tail_general(const Scenario& scn, double x,
                                      double theta) {
  require_regime(scn, Regime::classical, "classical_backlog_tail_general");
  require_positive_theta(theta);
  const IncrementDistribution& a = iid_dist(scn.arrival);
  const IncrementDistribution& c = iid_dist(scn.capacity);
  const double k_inc = a.cgf(theta) + c.cgf(-theta);
  const double log_sum =
      log_geometric_sum(k_inc, static_cast<long long>(scn.horizon));
  return chernoff_value(log_sum - theta * x);
}

double classical_delay_tail_general(const Scenario& scn, std::size_t d,
                                    double theta, double p) {
  require_regime(scn, Regime::classical, "classical_delay_tail_general");
  require_positive_theta(theta);
  if (d > scn.horizon) {
    throw std::invalid_argument("classical_delay_tail_general: d > horizon");
  }
  const double q = holder_conjugate(p);
  const IncrementDistribution& a = iid_dist(scn.arrival);
  const IncrementDistribution& c = iid_dist(scn.capacity);
  const double k_window = (a.cgf(theta * p) + c.cgf(-theta * p)) / p;
  const double k_tail = static_cast<double>(d) * a.cgf(-theta * q) / q;
  const double log_sum =
      log_geometric_sum(k_window, static_cast<long long>(scn.horizon));
  return chernoff_value(log_sum + k_tail);
}

double classical_throughput_tail_general(const Scenario& scn, double x,
                                         double theta) {
  require_regime(scn, Regime::classical, "classical_throughput_tail_general");
  require_positive_theta(theta);
  const double t = static_cast<double>(scn.horizon);
  const IncrementDistribution& a = iid_dist(scn.arrival);
  const IncrementDistribution& c = iid_dist(scn.capacity);
  // The exponent s*kA + (t-s)*kC is linear in s, so the minimum over
  // s in {0..t} sits at an endpoint.
  const double exponent = std::min(t * a.cgf(theta), t * c.cgf(theta));
  return chernoff_value(exponent - theta * x);
}

// ---------------------------------------------------------------------------
// Lundberg machinery.

namespace {

// kappa evaluated through a guard that maps overflow onto +infinity, which
// the bracketing logic treats as a sign change.
template <typename F>
double find_lundberg_root(const F& kappa, double drift, double max_support) {
  if (max_support <= 0.0) {
    throw std::runtime_error(
        "lundberg_root: increment is a.s. nonpositive; the tail is zero");
  }
  if (!(drift < 0.0)) {
    throw std::domain_error(
        "lundberg_root: no positive root without negative drift");
  }
  const auto guarded = [&](double th) {
    try {
      return kappa(th);
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while (!(guarded(hi) > 0.0)) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 80) {
      throw std::runtime_error("lundberg_root: no bracket for kappa = 0");
    }
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-12 * std::max(1.0, mid)) break;
    if (guarded(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double lundberg_root(const IncrementDistribution& increment) {
  return find_lundberg_root(
      [&](double th) { return increment.cgf(th); }, increment.mean(),
      increment.max_support());
}

double SteadyStateBound::backlog_tail(double x) const {
  return clamp01(prefactor * std::exp(-theta_star * x));
}

double SteadyStateBound::delay_tail(double d) const {
  return clamp01(prefactor * std::exp(-theta_star * decay_rate * d));
}

SteadyStateBound classical_steady_bound(const Scenario& scn) {
  require_regime(scn, Regime::classical, "classical_steady_bound");
  const bool arrival_iid = is_iid(scn.arrival);
  const bool capacity_iid = is_iid(scn.capacity);
  const auto is_const = [](const ProcessSpec& p) {
    return is_iid(p) &&
           iid_dist(p).kind() == IncrementDistribution::Kind::constant;
  };

  if (capacity_iid && is_const(scn.capacity)) {
    const double c = iid_dist(scn.capacity).constant_value();
    if (arrival_iid) {
      const IncrementDistribution inc = iid_dist(scn.arrival).shifted(-c);
      return {lundberg_root(inc), 1.0, c};
    }
    const MapProcess& mp = map_process(scn.arrival);
    return map_lundberg_bounds(mp.kernel.shifted(-c), mp.initial_state, c);
  }
  if (arrival_iid && is_const(scn.arrival)) {
    const double lambda = iid_dist(scn.arrival).constant_value();
    if (capacity_iid) {
      const IncrementDistribution inc =
          iid_dist(scn.capacity).negated().shifted(lambda);
      return {lundberg_root(inc), 1.0, lambda};
    }
    const MapProcess& mp = map_process(scn.capacity);
    return map_lundberg_bounds(mp.kernel.negated().shifted(lambda),
                               mp.initial_state, lambda);
  }
  throw std::invalid_argument(
      "classical_steady_bound: one side of the scenario must be constant");
}

SteadyStateBound map_lundberg_bounds(const MapKernel& increment_kernel,
                                     std::size_t initial_state,
                                     double decay_rate) {
  double max_support = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < increment_kernel.num_states(); ++i) {
    for (std::size_t j = 0; j < increment_kernel.num_states(); ++j) {
      if (increment_kernel.transition()[i][j] > 0.0) {
        max_support = std::max(max_support,
                               increment_kernel.increment(i, j).max_support());
      }
    }
  }
  const double theta_star = find_lundberg_root(
      [&](double th) { return pf_eigenpair(increment_kernel, th).kappa; },
      increment_kernel.stationary_mean_increment(), max_support);
  const MapSide side = map_side(increment_kernel, initial_state, theta_star);
  return {theta_star, side.pref_initial, decay_rate};
}

double map_throughput_bound(const MapProcess& arrival, double capacity_rate,
                            std::size_t t, double x, double theta) {
  require_positive_theta(theta);
  const MapSide side = map_side(arrival.kernel, arrival.initial_state, theta);
  const double td = static_cast<double>(t);
  const double exponent =
      std::min(td * side.kappa, theta * td * capacity_rate);
  return clamp01(side.pref_initial * std::exp(exponent - theta * x));
}

double map_throughput_bound_capacity_side(const MapKernel& capacity_kernel,
                                          double arrival_rate, std::size_t t,
                                          double x, double theta) {
  require_positive_theta(theta);
  const MapSide side = map_side(capacity_kernel, 0, theta);
  const double td = static_cast<double>(t);
  const double exponent =
      std::min(td * side.kappa, theta * td * arrival_rate);
  return clamp01(side.pref_max * std::exp(exponent - theta * x));
}

// ---------------------------------------------------------------------------
// Quantum transient tails.

double quantum_backlog_tail_general(const Scenario& scn, double x,
                                    double theta) {
  require_regime(scn, Regime::quantum, "quantum_backlog_tail_general");
  require_positive_theta(theta);
  const ClippedScenario s = clipped_iid(scn);
  const double t = static_cast<double>(s.horizon);
  return chernoff_value(t * s.arrival.cgf(theta) +
                        t * s.capacity_plus.cgf(-theta) - theta * x);
}

double quantum_delay_tail_general(const Scenario& scn, std::size_t d,
                                  double theta, double p) {
  require_regime(scn, Regime::quantum, "quantum_delay_tail_general");
  require_positive_theta(theta);
  if (d > scn.horizon) {
    throw std::invalid_argument("quantum_delay_tail_general: d > horizon");
  }
  const double q = holder_conjugate(p);
  const ClippedScenario s = clipped_iid(scn);
  const double t = static_cast<double>(s.horizon);
  const double window = (t * s.arrival.cgf(theta * p) +
                         t * s.capacity_plus.cgf(-theta * p)) /
                        p;
  const double tail = static_cast<double>(d) * s.arrival.cgf(-theta * q) / q;
  return chernoff_value(window + tail);
}

double quantum_throughput_tail_general(const Scenario& scn, double x,
                                       double theta) {
  require_regime(scn, Regime::quantum, "quantum_throughput_tail_general");
  require_positive_theta(theta);
  const ClippedScenario s = clipped_iid(scn);
  const double t = static_cast<double>(s.horizon);
  return chernoff_value(t * s.capacity_plus.cgf(theta) +
                        t * s.arrival.cgf(theta) - theta * 2.0 * x);
}

// ---------------------------------------------------------------------------
// Quantum i.i.d. bands.

Band quantum_iid_backlog_band(const Scenario& scn, double x,
                              double theta_upper, double theta_lower) {
  require_regime(scn, Regime::quantum, "quantum_iid_backlog_band");
  require_positive_theta(theta_upper);
  require_positive_theta(theta_lower);
  const ClippedScenario s = clipped_iid(scn);
  const double t = static_cast<double>(s.horizon);
  const double upper = std::exp(t * s.arrival.cgf(-theta_upper) +
                                t * s.capacity_plus.cgf(theta_upper) +
                                theta_upper * x);
  const double lower = 1.0 - std::exp(t * s.arrival.cgf(theta_lower) +
                                      t * s.capacity_plus.cgf(-theta_lower) -
                                      theta_lower * x);
  return make_band(lower, upper);
}

Band quantum_iid_delay_band(const Scenario& scn, std::size_t d,
                            double theta_upper, double theta_lower) {
  require_regime(scn, Regime::quantum, "quantum_iid_delay_band");
  require_positive_theta(theta_upper);
  require_positive_theta(theta_lower);
  if (d > scn.horizon) {
    throw std::invalid_argument("quantum_iid_delay_band: d > horizon");
  }
  const ClippedScenario s = clipped_iid(scn);
  const double t = static_cast<double>(s.horizon);
  const double w = t - static_cast<double>(d);
  const double upper = std::exp(w * s.arrival.cgf(-theta_upper) +
                                t * s.capacity_plus.cgf(theta_upper));
  const double lower = 1.0 - std::exp(w * s.arrival.cgf(theta_lower) +
                                      t * s.capacity_plus.cgf(-theta_lower));
  return make_band(lower, upper);
}

namespace {

struct CdfBounds {
  double lower = 0.0;  // clamped lower bound on Pr(X(t) <= x)
  double upper = 1.0;  // clamped upper bound
};

// Chernoff CDF bounds for a sum of t i.i.d. increments, with an optional
// Markov prefactor folded in by the caller.
CdfBounds sum_cdf_bounds(double kappa_pos, double kappa_neg, double pref_pos,
                         double pref_neg, double t, double x, double theta) {
  CdfBounds b;
  b.upper = clamp01(pref_neg * std::exp(t * kappa_neg + theta * x));
  b.lower = clamp01(1.0 - pref_pos * std::exp(t * kappa_pos - theta * x));
  return b;
}

Band assemble_throughput_band(const CdfBounds& q, const CdfBounds& a) {
  const double lower = q.lower + a.lower - q.upper * a.upper;
  const double upper = q.upper + a.upper - q.lower * a.lower;
  return make_band(lower, upper);
}

}  // namespace

Band quantum_iid_throughput_band(const Scenario& scn, double x,
                                 double theta_arrival, double theta_capacity) {
  require_regime(scn, Regime::quantum, "quantum_iid_throughput_band");
  require_positive_theta(theta_arrival);
  require_positive_theta(theta_capacity);
  const ClippedScenario s = clipped_iid(scn);
  const double t = static_cast<double>(s.horizon);
  const CdfBounds q = sum_cdf_bounds(
      s.capacity_plus.cgf(theta_capacity), s.capacity_plus.cgf(-theta_capacity),
      1.0, 1.0, t, x, theta_capacity);
  const CdfBounds a =
      sum_cdf_bounds(s.arrival.cgf(theta_arrival),
                     s.arrival.cgf(-theta_arrival), 1.0, 1.0, t, x,
                     theta_arrival);
  return assemble_throughput_band(q, a);
}

Band quantum_iid_throughput_band(const Scenario& scn, double x, double theta) {
  return quantum_iid_throughput_band(scn, x, theta, theta);
}

// ---------------------------------------------------------------------------
// Quantum Markov additive bands.

Band quantum_map_backlog_band(const MapProcess& arrival,
                              const MapProcess& capacity, std::size_t t,
                              double x, double theta_upper,
                              double theta_lower) {
  require_positive_theta(theta_upper);
  require_positive_theta(theta_lower);
  const MapKernel neg_clip = capacity.kernel.clipped_nonnegative().negated();
  const double td = static_cast<double>(t);

  const MapSide a_lo = map_side(arrival.kernel, arrival.initial_state,
                                theta_lower);
  const MapSide q_lo = map_side(neg_clip, capacity.initial_state, theta_lower);
  const double lower =
      1.0 - a_lo.pref_initial * q_lo.pref_initial *
                std::exp(td * a_lo.kappa + td * q_lo.kappa - theta_lower * x);

  const MapSide a_up = map_side(arrival.kernel, arrival.initial_state,
                                -theta_upper);
  const MapSide q_up = map_side(neg_clip, capacity.initial_state, -theta_upper);
  const double upper =
      a_up.pref_initial * q_up.pref_initial *
      std::exp(td * a_up.kappa + td * q_up.kappa + theta_upper * x);
  return make_band(lower, upper);
}

Band quantum_map_delay_band(const MapProcess& arrival,
                            const MapProcess& capacity, std::size_t t,
                            std::size_t d, double theta_upper,
                            double theta_lower) {
  require_positive_theta(theta_upper);
  require_positive_theta(theta_lower);
  if (d > t) throw std::invalid_argument("quantum_map_delay_band: d > horizon");
  const MapKernel neg_clip = capacity.kernel.clipped_nonnegative().negated();
  const double td = static_cast<double>(t);
  const double w = td - static_cast<double>(d);

  const MapSide a_lo = map_side(arrival.kernel, arrival.initial_state,
                                theta_lower);
  const MapSide q_lo = map_side(neg_clip, capacity.initial_state, theta_lower);
  const double lower = 1.0 - a_lo.pref_initial * q_lo.pref_initial *
                                 std::exp(w * a_lo.kappa + td * q_lo.kappa);

  const MapSide a_up = map_side(arrival.kernel, arrival.initial_state,
                                -theta_upper);
  const MapSide q_up = map_side(neg_clip, capacity.initial_state, -theta_upper);
  const double upper = a_up.pref_initial * q_up.pref_initial *
                       std::exp(w * a_up.kappa + td * q_up.kappa);
  return make_band(lower, upper);
}

Band quantum_map_throughput_band(const MapProcess& arrival,
                                 const MapProcess& capacity, std::size_t t,
                                 double x, double theta_arrival,
                                 double theta_capacity) {
  require_positive_theta(theta_arrival);
  require_positive_theta(theta_capacity);
  const MapKernel clip = capacity.kernel.clipped_nonnegative();
  const double td = static_cast<double>(t);

  const MapSide q_pos = map_side(clip, capacity.initial_state, theta_capacity);
  const MapSide q_neg = map_side(clip, capacity.initial_state, -theta_capacity);
  const CdfBounds q =
      sum_cdf_bounds(q_pos.kappa, q_neg.kappa, q_pos.pref_initial,
                     q_neg.pref_initial, td, x, theta_capacity);

  const MapSide a_pos =
      map_side(arrival.kernel, arrival.initial_state, theta_arrival);
  const MapSide a_neg =
      map_side(arrival.kernel, arrival.initial_state, -theta_arrival);
  const CdfBounds a =
      sum_cdf_bounds(a_pos.kappa, a_neg.kappa, a_pos.pref_initial,
                     a_neg.pref_initial, td, x, theta_arrival);
  return assemble_throughput_band(q, a);
}

Band quantum_map_constant_backlog_band(const MapProcess& arrival,
                                       double capacity, std::size_t t,
                                       double x, double theta_upper,
                                       double theta_lower) {
  require_positive_theta(theta_upper);
  require_positive_theta(theta_lower);
  // Kernel of the per-slot backlog increment a - [Q]^+.
  const MapKernel inc = arrival.kernel.shifted(-std::max(capacity, 0.0));
  const double td = static_cast<double>(t);
  const MapSide lo = map_side(inc, arrival.initial_state, theta_lower);
  const MapSide up = map_side(inc, arrival.initial_state, -theta_upper);
  const double lower =
      1.0 - lo.pref_initial * std::exp(td * lo.kappa - theta_lower * x);
  const double upper =
      up.pref_initial * std::exp(td * up.kappa + theta_upper * x);
  return make_band(lower, upper);
}

Band quantum_map_constant_delay_band(const MapProcess& arrival,
                                     double capacity, std::size_t t,
                                     std::size_t d, double theta_upper,
                                     double theta_lower) {
  require_positive_theta(theta_upper);
  require_positive_theta(theta_lower);
  if (d > t) {
    throw std::invalid_argument("quantum_map_constant_delay_band: d > horizon");
  }
  const double qc = std::max(capacity, 0.0);
  const double td = static_cast<double>(t);
  const double w = td - static_cast<double>(d);
  const MapSide lo = map_side(arrival.kernel, arrival.initial_state,
                              theta_lower);
  const MapSide up = map_side(arrival.kernel, arrival.initial_state,
                              -theta_upper);
  const double lower = 1.0 - lo.pref_initial *
                                 std::exp(td * (theta_lower * -qc) +
                                          w * lo.kappa);
  const double upper = up.pref_initial *
                       std::exp(td * (theta_upper * qc) + w * up.kappa);
  return make_band(lower, upper);
}

Band quantum_map_constant_backlog_band(double arrival_rate,
                                       const MapProcess& capacity,
                                       std::size_t t, double x,
                                       double theta_upper,
                                       double theta_lower) {
  require_positive_theta(theta_upper);
  require_positive_theta(theta_lower);
  // Kernel of the per-slot backlog increment lambda - [q]^+.
  const MapKernel inc =
      capacity.kernel.clipped_nonnegative().negated().shifted(arrival_rate);
  const double td = static_cast<double>(t);
  const MapSide lo = map_side(inc, capacity.initial_state, theta_lower);
  const MapSide up = map_side(inc, capacity.initial_state, -theta_upper);
  const double lower =
      1.0 - lo.pref_initial * std::exp(td * lo.kappa - theta_lower * x);
  const double upper =
      up.pref_initial * std::exp(td * up.kappa + theta_upper * x);
  return make_band(lower, upper);
}

Band quantum_map_constant_delay_band(double arrival_rate,
                                     const MapProcess& capacity, std::size_t t,
                                     std::size_t d, double theta_upper,
                                     double theta_lower) {
  require_positive_theta(theta_upper);
  require_positive_theta(theta_lower);
  if (d > t) {
    throw std::invalid_argument("quantum_map_constant_delay_band: d > horizon");
  }
  const MapKernel clip = capacity.kernel.clipped_nonnegative();
  const double td = static_cast<double>(t);
  const double w = td - static_cast<double>(d);
  const MapSide up = map_side(clip, capacity.initial_state, theta_upper);
  const MapSide lo = map_side(clip, capacity.initial_state, -theta_lower);
  const double upper = up.pref_initial *
                       std::exp(w * (-theta_upper * arrival_rate) +
                                td * up.kappa);
  const double lower = 1.0 - lo.pref_initial *
                                 std::exp(w * (theta_lower * arrival_rate) +
                                          td * lo.kappa);
  return make_band(lower, upper);
}

// ---------------------------------------------------------------------------
// Theta optimization.

ThetaOpt optimize_theta(const std::function<double(double)>& value_at_theta,
                        const ThetaGrid& grid, OptimizeSense sense) {
  if (!(grid.min > 0.0) || !(grid.max > grid.min) || grid.points < 2) {
    throw std::invalid_argument("optimize_theta: malformed grid");
  }
  const auto safe = [&](double th) {
    try {
      const double v = value_at_theta(th);
      return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  const double sign = sense == OptimizeSense::minimize ? 1.0 : -1.0;

  const double log_lo = std::log(grid.min);
  const double log_hi = std::log(grid.max);
  std::vector<double> thetas(grid.points);
  for (int i = 0; i < grid.points; ++i) {
    const double f = static_cast<double>(i) / (grid.points - 1);
    thetas[i] = std::exp(log_lo + f * (log_hi - log_lo));
  }

  int best = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.points; ++i) {
    const double v = safe(thetas[i]);
    if (std::isnan(v)) continue;
    const double cost = sign * v;
    if (cost < best_cost) {
      best_cost = cost;
      best = i;
    }
  }
  if (best < 0) {
    throw std::domain_error("optimize_theta: no feasible point on the grid");
  }

  const double lo = thetas[std::max(best - 1, 0)];
  const double hi = thetas[std::min(best + 1, grid.points - 1)];
  ThetaOpt result{thetas[best], sign * best_cost};
  if (hi > lo) {
    const auto cost_fn = [&](double th) {
      const double v = safe(th);
      return std::isnan(v) ? std::numeric_limits<double>::infinity()
                           : sign * v;
    };
    const MinimizeResult refined = golden_minimize(cost_fn, lo, hi, 1e-9, 300);
    if (std::isfinite(refined.value) && refined.value < best_cost) {
      result.theta = refined.x;
      result.value = sign * refined.value;
    }
  }
  return result;
}

}  // namespace qperf
