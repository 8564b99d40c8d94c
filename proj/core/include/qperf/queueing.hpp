// queueing.hpp - Discrete-time queue evolution and Monte Carlo ensembles.
//
// Classical regime: reflected backlog B(t+1) = [B(t) + a - c]^+.
// Quantum regime: signed backlog B(t+1) = B(t) + a - [q]^+, where negative
// backlog stores communication potential. Slots are indexed 1..t with an
// empty slot 0, so B(t) accumulates exactly t increments and A(0) = 0.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <qperf/scenario.hpp>

namespace qperf {

// One reflected step: max(backlog + arrival - capacity, 0).
double step_classical(double backlog, double arrival, double capacity);

// One signed step: backlog + arrival - max(raw_capacity, 0).
double step_quantum(double backlog, double arrival, double raw_capacity);

struct QueueTrajectory {
  Regime regime = Regime::quantum;
  std::vector<double> arrivals;             // a(0..t), a(0) = 0
  std::vector<double> capacities;           // raw q(0..t), q(0) = 0
  std::vector<double> backlog;              // B(0..t)
  std::vector<double> cumulative_arrivals;  // A(0..t)
  std::vector<double> cumulative_output;    // A*(0..t)
};

// Evolve one path. Arrival and capacity draws come from separate streams so
// that coupled comparisons can vary one process while replaying the other.
QueueTrajectory simulate_path(const Scenario& scenario, Rng& arrival_rng,
                              Rng& capacity_rng);

// Cumulative output series A*(0..t) = inf_{0<=s<=t} (A(0,s) + S(s,t)),
// evaluated with a running minimum. Classical regime only.
std::vector<double> classical_output(const QueueTrajectory& traj);

// Cumulative output series A*(0..t) = min(sum [q]^+, A(t)). Quantum regime.
std::vector<double> quantum_output(const QueueTrajectory& traj);

// Virtual delay at slot t: smallest d >= 0 with A(t-d) <= A*(t). Linear scan;
// never exceeds t because A(0) = 0.
std::size_t virtual_delay(const QueueTrajectory& traj, std::size_t t);

// Per-path terminal measures plus aggregates over an ensemble. Samples are
// kept in path order so chunked generation merges deterministically.
class EnsembleStats {
 public:
  std::size_t num_paths() const { return backlog_.size(); }

  void add_path(double backlog, double throughput, std::size_t delay);
  void merge(const EnsembleStats& other);

  const std::vector<double>& backlog_samples() const { return backlog_; }
  const std::vector<double>& throughput_samples() const { return throughput_; }
  const std::vector<double>& delay_samples() const { return delay_; }

  double mean_backlog() const;
  double mean_throughput() const;
  double mean_delay() const;
  // Standard error of the sample mean.
  double se_backlog() const;
  double se_throughput() const;
  double se_delay() const;

  double pr_zero_delay() const;
  double pr_nonpositive_backlog() const;
  // Conditional means of the two backlog stages (workload / potential);
  // paths with B = 0 count toward both.
  double mean_backlog_workload() const;
  double mean_backlog_potential() const;

  // Empirical CDF / tail with binomial half-width z * sqrt(p(1-p)/n).
  double cdf_backlog(double x) const;
  double cdf_throughput(double x) const;
  double cdf_delay(double d) const;
  double tail_backlog(double x) const { return 1.0 - cdf_backlog(x); }
  double tail_throughput(double x) const { return 1.0 - cdf_throughput(x); }
  double tail_delay(double d) const { return 1.0 - cdf_delay(d); }
  double ci_halfwidth(double p_hat, double z) const;

  double quantile_backlog(double q) const;
  double quantile_throughput(double q) const;
  double quantile_delay(double q) const;

  double min_backlog() const;
  double max_backlog() const;
  double min_throughput() const;
  double max_throughput() const;
  std::size_t max_delay() const;

 private:
  const std::vector<double>& sorted(int which) const;

  std::vector<double> backlog_;
  std::vector<double> throughput_;
  std::vector<double> delay_;
  mutable std::vector<double> sorted_[3];
  mutable bool dirty_ = true;
};

struct EnsembleOptions {
  std::size_t num_paths = 10000;
  std::uint64_t base_seed = 1;
  std::size_t first_path_index = 0;  // offset into the path-index space
};

// Deterministic ensemble: path k uses seeds derived from
// (base_seed, first_path_index + k). Merging two ensembles generated with
// disjoint index ranges reproduces a single larger run exactly.
EnsembleStats run_ensemble(const Scenario& scenario,
                           const EnsembleOptions& options);

struct LimitHorizonRow {
  std::size_t horizon = 0;
  double backlog_rate = 0.0;       // mean B(t)/t
  double backlog_rate_se = 0.0;
  double throughput_rate = 0.0;    // mean A*(t)/t
  double throughput_rate_se = 0.0;
  double mean_delay = 0.0;
  double pr_zero_delay = 0.0;
  double pr_nonpositive_backlog = 0.0;
  std::size_t identity_violations = 0;  // paths with (D=0) != (B<=0)
};

struct LimitTheoremReport {
  double arrival_rate = 0.0;
  double capacity_rate = 0.0;  // mean of the raw capacity process
  std::vector<LimitHorizonRow> rows;
  bool identity_ok = false;         // Pr(D=0) = Pr(B<=0) pathwise
  bool backlog_mean_ok = false;     // B(t)/t -> lambda - Q within 3 se
  bool throughput_mean_ok = false;  // A*(t)/t -> min(lambda, Q) within 3 se
  bool zero_delay_trend_ok = false; // drift trichotomy across the ladder
  bool littles_law_gap = false;     // lambda < Q: E[D] >= 0 while E[B]/rate < 0
  bool passed() const;
  std::string to_text() const;
};

// Evaluate the limit/mean checks on a ladder of horizons (quantum regime).
LimitTheoremReport check_limit_theorems(const Scenario& scenario,
                                        const std::vector<std::size_t>& ladder,
                                        const EnsembleOptions& options);

}  // namespace qperf
