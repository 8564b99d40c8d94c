#include <qperf/queueing.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <qperf/numeric.hpp>

namespace qperf {

double step_classical(double backlog, double arrival, double capacity) {
  return std::max(backlog + arrival - capacity, 0.0);
}

double step_quantum(double backlog, double arrival, double raw_capacity) {
  return backlog + arrival - std::max(raw_capacity, 0.0);
}

namespace {

std::vector<double> draw_increments(const ProcessSpec& p, std::size_t t,
                                    Rng& rng) {
  if (is_iid(p)) return sample_path(iid_dist(p), t, rng);
  const MapProcess& mp = map_process(p);
  return sample_path(mp.kernel, mp.initial_state, t, rng).increments;
}

}  // namespace

QueueTrajectory simulate_path(const Scenario& scenario, Rng& arrival_rng,
                              Rng& capacity_rng) {
  validate_scenario(scenario);
  const std::size_t t = scenario.horizon;
  QueueTrajectory traj;
  traj.regime = scenario.regime;
  traj.arrivals.assign(t + 1, 0.0);
  traj.capacities.assign(t + 1, 0.0);
  traj.backlog.assign(t + 1, 0.0);
  traj.cumulative_arrivals.assign(t + 1, 0.0);

  const std::vector<double> a = draw_increments(scenario.arrival, t, arrival_rng);
  const std::vector<double> q =
      draw_increments(scenario.capacity, t, capacity_rng);
  for (std::size_t i = 1; i <= t; ++i) {
    traj.arrivals[i] = a[i - 1];
    traj.capacities[i] = q[i - 1];
    traj.cumulative_arrivals[i] = traj.cumulative_arrivals[i - 1] + a[i - 1];
    traj.backlog[i] =
        scenario.regime == Regime::classical
            ? step_classical(traj.backlog[i - 1], a[i - 1], q[i - 1])
            : step_quantum(traj.backlog[i - 1], a[i - 1], q[i - 1]);
  }
  traj.cumulative_output = scenario.regime == Regime::classical
                               ? classical_output(traj)
                               : quantum_output(traj);
  return traj;
}

std::vector<double> classical_output(const QueueTrajectory& traj) {
  // inf_s (A(0,s) + S(s,t)) = S(0,t) + inf_s (A(0,s) - S(0,s)); the inner
  // infimum is a running minimum over the prefix differences.
  const std::size_t t = traj.arrivals.size() - 1;
  std::vector<double> out(t + 1, 0.0);
  double cum_a = 0.0;
  double cum_s = 0.0;
  double running_min = 0.0;  // s = 0 term: A(0,0) - S(0,0) = 0
  for (std::size_t i = 1; i <= t; ++i) {
    cum_a += traj.arrivals[i];
    cum_s += traj.capacities[i];
    running_min = std::min(running_min, cum_a - cum_s);
    out[i] = cum_s + running_min;
  }
  return out;
}

std::vector<double> quantum_output(const QueueTrajectory& traj) {
  const std::size_t t = traj.arrivals.size() - 1;
  std::vector<double> out(t + 1, 0.0);
  double cum_a = 0.0;
  double cum_qp = 0.0;
  for (std::size_t i = 1; i <= t; ++i) {
    cum_a += traj.arrivals[i];
    cum_qp += std::max(traj.capacities[i], 0.0);
    out[i] = std::min(cum_qp, cum_a);
  }
  return out;
}

std::size_t virtual_delay(const QueueTrajectory& traj, std::size_t t) {
  if (t >= traj.cumulative_arrivals.size()) {
    throw std::out_of_range("virtual_delay: slot beyond horizon");
  }
  const double a_star = traj.cumulative_output[t];
  std::size_t d = 0;
  while (traj.cumulative_arrivals[t - d] > a_star) ++d;
  return d;
}

void EnsembleStats::add_path(double backlog, double throughput,
                             std::size_t delay) {
  backlog_.push_back(backlog);
  throughput_.push_back(throughput);
  delay_.push_back(static_cast<double>(delay));
  dirty_ = true;
}

void EnsembleStats::merge(const EnsembleStats& other) {
  backlog_.insert(backlog_.end(), other.backlog_.begin(), other.backlog_.end());
  throughput_.insert(throughput_.end(), other.throughput_.begin(),
                     other.throughput_.end());
  delay_.insert(delay_.end(), other.delay_.begin(), other.delay_.end());
  dirty_ = true;
}

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

double cdf_of(const std::vector<double>& sorted, double x) {
  if (sorted.empty()) return 0.0;
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) /
         static_cast<double>(sorted.size());
}

double quantile_of(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

const std::vector<double>& EnsembleStats::sorted(int which) const {
  if (dirty_) {
    sorted_[0] = backlog_;
    sorted_[1] = throughput_;
    sorted_[2] = delay_;
    for (auto& v : sorted_) std::sort(v.begin(), v.end());
    dirty_ = false;
  }
  return sorted_[which];
}

double EnsembleStats::mean_backlog() const { return mean_of(backlog_); }
double EnsembleStats::mean_throughput() const { return mean_of(throughput_); }
double EnsembleStats::mean_delay() const { return mean_of(delay_); }
double EnsembleStats::se_backlog() const { return se_of(backlog_); }
double EnsembleStats::se_throughput() const { return se_of(throughput_); }
double EnsembleStats::se_delay() const { return se_of(delay_); }

double EnsembleStats::pr_zero_delay() const {
  if (delay_.empty()) return 0.0;
  std::size_t n = 0;
  for (double d : delay_) n += (d == 0.0);
  return static_cast<double>(n) / static_cast<double>(delay_.size());
}

double EnsembleStats::pr_nonpositive_backlog() const {
  if (backlog_.empty()) return 0.0;
  std::size_t n = 0;
  for (double b : backlog_) n += (b <= 0.0);
  return static_cast<double>(n) / static_cast<double>(backlog_.size());
}

double EnsembleStats::mean_backlog_workload() const {
  double s = 0.0;
  std::size_t n = 0;
  for (double b : backlog_) {
    if (b >= 0.0) {
      s += b;
      ++n;
    }
  }
  return n == 0 ? 0.0 : s / static_cast<double>(n);
}

double EnsembleStats::mean_backlog_potential() const {
  double s = 0.0;
  std::size_t n = 0;
  for (double b : backlog_) {
    if (b <= 0.0) {
      s += b;
      ++n;
    }
  }
  return n == 0 ? 0.0 : s / static_cast<double>(n);
}

double EnsembleStats::cdf_backlog(double x) const { return cdf_of(sorted(0), x); }
double EnsembleStats::cdf_throughput(double x) const {
  return cdf_of(sorted(1), x);
}
double EnsembleStats::cdf_delay(double d) const { return cdf_of(sorted(2), d); }

double EnsembleStats::ci_halfwidth(double p_hat, double z) const {
  const std::size_t n = num_paths();
  if (n == 0) return 0.0;
  return z * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
}

double EnsembleStats::quantile_backlog(double q) const {
  return quantile_of(sorted(0), q);
}
double EnsembleStats::quantile_throughput(double q) const {
  return quantile_of(sorted(1), q);
}
double EnsembleStats::quantile_delay(double q) const {
  return quantile_of(sorted(2), q);
}

double EnsembleStats::min_backlog() const { return sorted(0).front(); }
double EnsembleStats::max_backlog() const { return sorted(0).back(); }
double EnsembleStats::min_throughput() const { return sorted(1).front(); }
double EnsembleStats::max_throughput() const { return sorted(1).back(); }
std::size_t EnsembleStats::max_delay() const {
  return static_cast<std::size_t>(sorted(2).back());
}

EnsembleStats run_ensemble(const Scenario& scenario,
                           const EnsembleOptions& options) {
  validate_scenario(scenario);
  if (options.num_paths == 0) {
    throw std::invalid_argument("run_ensemble: need at least one path");
  }
  const std::size_t t = scenario.horizon;
  EnsembleStats stats;

  // Streaming per-path evolution; only the cumulative arrival series is kept
  // (the delay scan needs it).
  std::vector<double> cum_a(t + 1, 0.0);
  std::vector<double> a_buf;
  std::vector<double> q_buf;
  for (std::size_t k = 0; k < options.num_paths; ++k) {
    const std::uint64_t idx = options.first_path_index + k;
    Rng arrival_rng(derive_seed(options.base_seed, idx, 1));
    Rng capacity_rng(derive_seed(options.base_seed, idx, 2));
    a_buf = draw_increments(scenario.arrival, t, arrival_rng);
    q_buf = draw_increments(scenario.capacity, t, capacity_rng);

    double backlog = 0.0;
    double cum_qp = 0.0;  // quantum: cumulative clipped capacity
    for (std::size_t i = 1; i <= t; ++i) {
      cum_a[i] = cum_a[i - 1] + a_buf[i - 1];
      if (scenario.regime == Regime::classical) {
        backlog = step_classical(backlog, a_buf[i - 1], q_buf[i - 1]);
      } else {
        cum_qp += std::max(q_buf[i - 1], 0.0);
        backlog = step_quantum(backlog, a_buf[i - 1], q_buf[i - 1]);
      }
    }
    const double a_star = scenario.regime == Regime::classical
                              ? cum_a[t] - backlog
                              : std::min(cum_qp, cum_a[t]);
    std::size_t d = 0;
    while (cum_a[t - d] > a_star) ++d;
    stats.add_path(backlog, a_star, d);
  }
  return stats;
}

bool LimitTheoremReport::passed() const {
  return identity_ok && backlog_mean_ok && throughput_mean_ok &&
         zero_delay_trend_ok;
}

std::string LimitTheoremReport::to_text() const {
  std::ostringstream os;
  os << "limit-theorem report (lambda=" << format_double(arrival_rate)
     << ", Q=" << format_double(capacity_rate) << ")\n";
  for (const auto& r : rows) {
    os << "  t=" << r.horizon << " B/t=" << format_double(r.backlog_rate)
       << " A*/t=" << format_double(r.throughput_rate)
       << " E[D]=" << format_double(r.mean_delay)
       << " Pr(D=0)=" << format_double(r.pr_zero_delay)
       << " Pr(B<=0)=" << format_double(r.pr_nonpositive_backlog)
       << " identity_violations=" << r.identity_violations << "\n";
  }
  os << "  zero-delay/nonpositive-backlog identity: "
     << (identity_ok ? "ok" : "FAIL") << "\n";
  os << "  backlog mean rate -> lambda - Q: "
     << (backlog_mean_ok ? "ok" : "FAIL") << "\n";
  os << "  throughput mean rate -> min(lambda, Q): "
     << (throughput_mean_ok ? "ok" : "FAIL") << "\n";
  os << "  zero-delay drift trend: " << (zero_delay_trend_ok ? "ok" : "FAIL")
     << "\n";
  os << "  delay/backlog Little-gap observed: "
     << (littles_law_gap ? "yes" : "no") << "\n";
  return os.str();
}

LimitTheoremReport check_limit_theorems(const Scenario& scenario,
                                        const std::vector<std::size_t>& ladder,
                                        const EnsembleOptions& options) {
  if (scenario.regime != Regime::quantum) {
    throw std::invalid_argument(
        "check_limit_theorems: defined for the quantum regime");
  }
  if (ladder.empty()) {
    throw std::invalid_argument("check_limit_theorems: empty ladder");
  }

  LimitTheoremReport report;
  report.arrival_rate = mean_rate(scenario.arrival);
  report.capacity_rate = mean_rate(scenario.capacity);
  const double lambda = report.arrival_rate;
  const double q = report.capacity_rate;

  for (std::size_t t : ladder) {
    Scenario s = scenario;
    s.horizon = t;
    const EnsembleStats stats = run_ensemble(s, options);
    LimitHorizonRow row;
    row.horizon = t;
    const double inv_t = 1.0 / static_cast<double>(t);
    row.backlog_rate = stats.mean_backlog() * inv_t;
    row.backlog_rate_se = stats.se_backlog() * inv_t;
    row.throughput_rate = stats.mean_throughput() * inv_t;
    row.throughput_rate_se = stats.se_throughput() * inv_t;
    row.mean_delay = stats.mean_delay();
    row.pr_zero_delay = stats.pr_zero_delay();
    row.pr_nonpositive_backlog = stats.pr_nonpositive_backlog();
    std::size_t violations = 0;
    for (std::size_t i = 0; i < stats.num_paths(); ++i) {
      const bool zero_delay = stats.delay_samples()[i] == 0.0;
      const bool nonpos = stats.backlog_samples()[i] <= 0.0;
      violations += (zero_delay != nonpos);
    }
    row.identity_violations = violations;
    report.rows.push_back(row);
  }

  report.identity_ok = true;
  for (const auto& r : report.rows) {
    report.identity_ok = report.identity_ok && r.identity_violations == 0;
  }

  const LimitHorizonRow& last = report.rows.back();
  report.backlog_mean_ok =
      std::abs(last.backlog_rate - (lambda - q)) <=
      3.0 * std::max(last.backlog_rate_se, 1e-12);
  report.throughput_mean_ok =
      std::abs(last.throughput_rate - std::min(lambda, q)) <=
      3.0 * std::max(last.throughput_rate_se, 1e-12);

  // Drift trichotomy across the ladder, with slack for Monte Carlo noise.
  const double n = static_cast<double>(options.num_paths);
  const double slack = 3.0 / std::sqrt(n);
  if (lambda > q) {
    bool trend = last.pr_zero_delay <= report.rows.front().pr_zero_delay + slack;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
      trend = trend && report.rows[i].pr_zero_delay <=
                           report.rows[i - 1].pr_zero_delay + slack;
    }
    report.zero_delay_trend_ok = trend;
  } else if (lambda < q) {
    bool trend = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
      trend = trend && report.rows[i].pr_zero_delay + slack >=
                           report.rows[i - 1].pr_zero_delay;
    }
    report.zero_delay_trend_ok = trend && last.pr_zero_delay > 1.0 - 10.0 * slack;
  } else {
    // Crossover: strictly interior in general; the probability reaches 1
    // exactly when both processes are constant.
    const auto is_const = [](const ProcessSpec& p) {
      return is_iid(p) &&
             iid_dist(p).kind() == IncrementDistribution::Kind::constant;
    };
    const bool both_constant =
        is_const(scenario.arrival) && is_const(scenario.capacity);
    report.zero_delay_trend_ok =
        both_constant ? last.pr_zero_delay == 1.0
                      : (last.pr_zero_delay > 0.0 && last.pr_zero_delay < 1.0);
  }

  if (lambda < q) {
    // Mean delay stays at zero while mean backlog is negative, so the
    // backlog/arrival-rate ratio disagrees with the delay in sign.
    const double ratio = last.backlog_rate * static_cast<double>(last.horizon) /
                         lambda;
    report.littles_law_gap = last.mean_delay >= 0.0 && ratio < 0.0;
  }
  return report;
}

}  // namespace qperf
