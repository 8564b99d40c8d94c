// bounds.hpp - Analytic tail and distribution bounds on backlog, delay, and
// throughput, with optimization over the free Chernoff parameter.
//
// Classical regime: union-of-Chernoff transient bounds, steady-state
// Lundberg-root bounds (i.i.d. and Markov additive, with eigenvector
// prefactors), and transient throughput bounds.
// Quantum regime: single-Chernoff transient tails and two-sided distribution
// bands for i.i.d. and Markov additive processes, built from the clipped
// capacity [q]^+.
//
// Every returned bound is clamped to [0, 1]; probability sub-expressions in
// the composite throughput bounds are clamped individually, which preserves
// validity and keeps the expressions informative at extreme arguments.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <qperf/scenario.hpp>

namespace qperf {

enum class Measure { backlog, delay, throughput };
enum class BoundSide { upper_on_tail, upper_on_cdf, lower_on_cdf };

std::string to_string(Measure m);
std::string to_string(BoundSide s);

struct BoundPoint {
  double argument = 0.0;
  double value = 0.0;  // clamped to [0, 1]
  double theta = 0.0;
  std::optional<double> holder_p;
  bool vacuous = false;  // clamp engaged: no information at this point
};

struct BoundCurve {
  Measure measure = Measure::backlog;
  BoundSide side = BoundSide::upper_on_tail;
  std::string label;         // which bound family produced the curve
  std::string scenario_ref;  // config/scenario name
  std::vector<BoundPoint> points;
};

// ---------------------------------------------------------------------------
// Classical transient bounds (union bound + Chernoff; Hoelder for delay).
// i.i.d. scenarios only; Markov additive scenarios use the map_* family.

// sum_{s=0}^{t} E[e^{theta(A(s,t)-S(s,t))}] e^{-theta x}, clamped.
double classical_backlog_tail_general(const Scenario& scn, double x,
                                      double theta);

// sum_{s} E[e^{theta(A(s,t)-S(s,t))p}]^{1/p} E[e^{-theta A(t-d,t)q}]^{1/q}
// with 1/p + 1/q = 1, p > 1.
double classical_delay_tail_general(const Scenario& scn, std::size_t d,
                                    double theta, double p);

// min_{0<=s<=t} E[e^{theta(A(0,s)+S(s,t))}] e^{-theta x}.
double classical_throughput_tail_general(const Scenario& scn, double x,
                                         double theta);

// ---------------------------------------------------------------------------
// Steady-state exponential bounds from the Lundberg root.

// Unique theta* > 0 with kappa(theta*) = 0 for a one-slot increment with
// negative mean. Throws std::domain_error when the drift is nonnegative and
// std::runtime_error when the increment is a.s. nonpositive (the tail is
// identically zero) or no bracket exists.
double lundberg_root(const IncrementDistribution& increment);

struct SteadyStateBound {
  double theta_star = 0.0;
  double prefactor = 1.0;   // h_{J0}(theta*) / min_j h_j(theta*); 1 when iid
  double decay_rate = 0.0;  // per-slot rate entering the delay bound exponent
  double backlog_tail(double x) const;  // prefactor * e^{-theta* x}, clamped
  double delay_tail(double d) const;    // prefactor * e^{-theta* rate d}
};

// i.i.d. side constant: Pr(B > x) <= e^{-theta* x} and
// Pr(D > d) <= e^{-theta* C d} (constant capacity C) or e^{-theta* lambda d}
// (constant arrival lambda). Exactly one side of the scenario must be
// constant.
SteadyStateBound classical_steady_bound(const Scenario& scn);

// Markov additive side against a constant side; theta* solves
// kappa(theta) = 0 for the kernel of the per-slot backlog increment, and the
// prefactor is h_{J0}(theta*)/min_j h_j(theta*).
SteadyStateBound map_lundberg_bounds(const MapKernel& increment_kernel,
                                     std::size_t initial_state,
                                     double decay_rate);

// Transient throughput for a Markov additive arrival against constant
// capacity: min_s (h_{J0}/min_j h_j) e^{s kappa(theta) + theta (t-s) C - theta x}.
double map_throughput_bound(const MapProcess& arrival, double capacity_rate,
                            std::size_t t, double x, double theta);

// Constant arrival against a Markov additive capacity; the prefactor is
// max_k h_k / min_j h_j.
double map_throughput_bound_capacity_side(const MapKernel& capacity_kernel,
                                          double arrival_rate, std::size_t t,
                                          double x, double theta);

// ---------------------------------------------------------------------------
// Quantum transient tails (single Chernoff over the whole window).

double quantum_backlog_tail_general(const Scenario& scn, double x,
                                    double theta);
double quantum_delay_tail_general(const Scenario& scn, std::size_t d,
                                  double theta, double p);
// Uses min(X,Y) <= (X+Y)/2, hence the doubled argument in the exponent.
double quantum_throughput_tail_general(const Scenario& scn, double x,
                                       double theta);

// ---------------------------------------------------------------------------
// Quantum two-sided distribution bands.

struct Band {
  double lower = 0.0;  // lower bound on the CDF
  double upper = 1.0;  // upper bound on the CDF
  bool lower_vacuous = false;
  bool upper_vacuous = false;
};

// i.i.d. arrival and capacity:
//   1 - e^{t kappa(th_lo) - th_lo x} <= Pr(B(t) <= x) <= e^{t kappa(-th_up) + th_up x}
// with kappa the CGF of a - [q]^+. The two sides take independent thetas.
Band quantum_iid_backlog_band(const Scenario& scn, double x, double theta_upper,
                              double theta_lower);

// 1 - e^{t kQ(-th) + (t-d) kA(th)} <= Pr(D(t) <= d) <= e^{t kQ(th) + (t-d) kA(-th)}.
Band quantum_iid_delay_band(const Scenario& scn, std::size_t d,
                            double theta_upper, double theta_lower);

// Four-term band on Pr(A*(t) <= x); arrival-side and capacity-side thetas may
// be optimized separately.
Band quantum_iid_throughput_band(const Scenario& scn, double x,
                                 double theta_arrival, double theta_capacity);
Band quantum_iid_throughput_band(const Scenario& scn, double x, double theta);

// Markov additive arrival and capacity (independent chains). Prefactors
// H−/H+ multiply the exponentials; kernels for A and for -[q]^+ are
// evaluated at +-theta.
Band quantum_map_backlog_band(const MapProcess& arrival,
                              const MapProcess& capacity, std::size_t t,
                              double x, double theta_upper, double theta_lower);
Band quantum_map_delay_band(const MapProcess& arrival,
                            const MapProcess& capacity, std::size_t t,
                            std::size_t d, double theta_upper,
                            double theta_lower);
Band quantum_map_throughput_band(const MapProcess& arrival,
                                 const MapProcess& capacity, std::size_t t,
                                 double x, double theta_arrival,
                                 double theta_capacity);

// One side degenerate: Markov additive arrival with constant capacity, or
// constant arrival with Markov additive capacity. The backlog kernel is the
// kernel of the per-slot backlog increment (a - Q, resp. lambda - [q]^+).
Band quantum_map_constant_backlog_band(const MapProcess& arrival,
                                       double capacity, std::size_t t,
                                       double x, double theta_upper,
                                       double theta_lower);
Band quantum_map_constant_delay_band(const MapProcess& arrival,
                                     double capacity, std::size_t t,
                                     std::size_t d, double theta_upper,
                                     double theta_lower);
Band quantum_map_constant_backlog_band(double arrival_rate,
                                       const MapProcess& capacity,
                                       std::size_t t, double x,
                                       double theta_upper, double theta_lower);
Band quantum_map_constant_delay_band(double arrival_rate,
                                     const MapProcess& capacity, std::size_t t,
                                     std::size_t d, double theta_upper,
                                     double theta_lower);

// ---------------------------------------------------------------------------
// Free-parameter optimization.

struct ThetaGrid {
  double min = 1e-4;
  double max = 50.0;
  int points = 200;  // log-spaced
  friend bool operator==(const ThetaGrid&, const ThetaGrid&) = default;
};

struct ThetaOpt {
  double theta = 0.0;
  double value = 0.0;
};

enum class OptimizeSense { minimize, maximize };

// Log-spaced grid search followed by golden-section refinement around the
// best grid point. Non-finite evaluations are skipped; throws
// std::domain_error when nothing on the grid is finite.
ThetaOpt optimize_theta(const std::function<double(double)>& value_at_theta,
                        const ThetaGrid& grid, OptimizeSense sense);

}  // namespace qperf
