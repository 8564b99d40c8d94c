#include <qperf/experiment.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <qperf/numeric.hpp>

namespace qperf {

namespace {

struct CurveContext {
  const Scenario& scenario;
  const ExperimentConfig& cfg;
  const std::vector<double>& grid;
};

std::vector<double> holder_grid(const ExperimentConfig& cfg) {
  if (!cfg.bounds.p_grid.empty()) return cfg.bounds.p_grid;
  return {cfg.bounds.holder_p};
}

BoundCurve new_curve(const CurveContext& ctx, BoundSide side,
                     const std::string& label) {
  BoundCurve c;
  c.measure = ctx.cfg.grid.measure;
  c.side = side;
  c.label = label;
  c.scenario_ref = ctx.cfg.name;
  return c;
}

// ---- transient Chernoff tails (quantum "chernoff" / classical
// "chernoff_union") -------------------------------------------------------

BoundCurve build_tail_curve(const CurveContext& ctx, const std::string& label) {
  const bool quantum = ctx.scenario.regime == Regime::quantum;
  BoundCurve curve = new_curve(ctx, BoundSide::upper_on_tail, label);
  const Measure measure = ctx.cfg.grid.measure;
  for (double x : ctx.grid) {
    BoundPoint pt;
    pt.argument = x;
    if (measure == Measure::delay) {
      const auto d = static_cast<std::size_t>(std::max(0.0, x));
      ThetaOpt best{0.0, 2.0};
      double best_p = 0.0;
      for (double p : holder_grid(ctx.cfg)) {
        const auto fn = [&](double th) {
          return quantum
                     ? quantum_delay_tail_general(ctx.scenario, d, th, p)
                     : classical_delay_tail_general(ctx.scenario, d, th, p);
        };
        const ThetaOpt opt =
            optimize_theta(fn, ctx.cfg.bounds.theta, OptimizeSense::minimize);
        if (opt.value < best.value) {
          best = opt;
          best_p = p;
        }
      }
      pt.theta = best.theta;
      pt.holder_p = best_p;
      pt.value = best.value;
    } else {
      const auto fn = [&](double th) {
        if (measure == Measure::backlog) {
          return quantum ? quantum_backlog_tail_general(ctx.scenario, x, th)
                         : classical_backlog_tail_general(ctx.scenario, x, th);
        }
        return quantum ? quantum_throughput_tail_general(ctx.scenario, x, th)
                       : classical_throughput_tail_general(ctx.scenario, x, th);
      };
      const ThetaOpt opt =
          optimize_theta(fn, ctx.cfg.bounds.theta, OptimizeSense::minimize);
      pt.theta = opt.theta;
      pt.value = opt.value;
    }
    pt.vacuous = !(pt.value < 1.0);
    curve.points.push_back(pt);
  }
  return curve;
}

// ---- steady-state Lundberg bounds ----------------------------------------

BoundCurve build_steady_curve(const CurveContext& ctx,
                              const SteadyStateBound& bound,
                              const std::string& label) {
  if (ctx.cfg.grid.measure == Measure::throughput) {
    throw ConfigError(0, label + " applies to backlog and delay only");
  }
  BoundCurve curve = new_curve(ctx, BoundSide::upper_on_tail, label);
  for (double x : ctx.grid) {
    BoundPoint pt;
    pt.argument = x;
    pt.theta = bound.theta_star;
    pt.value = ctx.cfg.grid.measure == Measure::backlog
                   ? bound.backlog_tail(x)
                   : bound.delay_tail(std::max(0.0, x));
    pt.vacuous = !(pt.value < 1.0);
    curve.points.push_back(pt);
  }
  return curve;
}

// ---- classical Markov throughput -----------------------------------------

BoundCurve build_map_throughput_curve(const CurveContext& ctx) {
  if (ctx.cfg.grid.measure != Measure::throughput) {
    throw ConfigError(0, "map_throughput applies to the throughput measure");
  }
  const bool a_map = !is_iid(ctx.scenario.arrival);
  BoundCurve curve = new_curve(ctx, BoundSide::upper_on_tail, "map_throughput");
  for (double x : ctx.grid) {
    const auto fn = [&](double th) {
      if (a_map) {
        const double c = iid_dist(ctx.scenario.capacity).constant_value();
        return map_throughput_bound(map_process(ctx.scenario.arrival), c,
                                    ctx.scenario.horizon, x, th);
      }
      const double lambda = iid_dist(ctx.scenario.arrival).constant_value();
      return map_throughput_bound_capacity_side(
          map_process(ctx.scenario.capacity).kernel, lambda,
          ctx.scenario.horizon, x, th);
    };
    const ThetaOpt opt =
        optimize_theta(fn, ctx.cfg.bounds.theta, OptimizeSense::minimize);
    BoundPoint pt;
    pt.argument = x;
    pt.theta = opt.theta;
    pt.value = opt.value;
    pt.vacuous = !(pt.value < 1.0);
    curve.points.push_back(pt);
  }
  return curve;
}

// ---- two-sided distribution bands -----------------------------------------

enum class BandKind { iid, map, map_constant };

Band eval_band(const CurveContext& ctx, BandKind kind, double x,
               double theta_upper, double theta_lower) {
  const Scenario& s = ctx.scenario;
  const Measure measure = ctx.cfg.grid.measure;
  const auto d = static_cast<std::size_t>(std::max(0.0, x));
  switch (kind) {
    case BandKind::iid:
      if (measure == Measure::backlog) {
        return quantum_iid_backlog_band(s, x, theta_upper, theta_lower);
      }
      if (measure == Measure::delay) {
        return quantum_iid_delay_band(s, d, theta_upper, theta_lower);
      }
      // Throughput uses two thetas per side; handled by the caller.
      return quantum_iid_throughput_band(s, x, theta_upper, theta_lower);
    case BandKind::map: {
      const MapProcess& a = map_process(s.arrival);
      const MapProcess& c = map_process(s.capacity);
      if (measure == Measure::backlog) {
        return quantum_map_backlog_band(a, c, s.horizon, x, theta_upper,
                                        theta_lower);
      }
      if (measure == Measure::delay) {
        return quantum_map_delay_band(a, c, s.horizon, d, theta_upper,
                                      theta_lower);
      }
      return quantum_map_throughput_band(a, c, s.horizon, x, theta_upper,
                                         theta_lower);
    }
    case BandKind::map_constant: {
      const bool a_map = !is_iid(s.arrival);
      if (a_map) {
        const MapProcess& a = map_process(s.arrival);
        const double q = iid_dist(s.capacity).constant_value();
        if (measure == Measure::backlog) {
          return quantum_map_constant_backlog_band(a, q, s.horizon, x,
                                                   theta_upper, theta_lower);
        }
        if (measure == Measure::delay) {
          return quantum_map_constant_delay_band(a, q, s.horizon, d,
                                                 theta_upper, theta_lower);
        }
        throw ConfigError(0, "map_constant_band covers backlog and delay");
      }
      const double lambda = iid_dist(s.arrival).constant_value();
      const MapProcess& c = map_process(s.capacity);
      if (measure == Measure::backlog) {
        return quantum_map_constant_backlog_band(lambda, c, s.horizon, x,
                                                 theta_upper, theta_lower);
      }
      if (measure == Measure::delay) {
        return quantum_map_constant_delay_band(lambda, c, s.horizon, d,
                                               theta_upper, theta_lower);
      }
      throw ConfigError(0, "map_constant_band covers backlog and delay");
    }
  }
  return {};
}

// Coordinate descent over (theta_arrival, theta_capacity) for the
// throughput bands; the two sides share a change of measure only within one
// process, so they may be tuned separately.
struct ThroughputTheta {
  double arrival = 1.0;
  double capacity = 1.0;
  double value = 0.0;
};

template <typename BandFn>
ThroughputTheta optimize_throughput(const BandFn& band, const ThetaGrid& grid,
                                    bool upper_side) {
  ThroughputTheta best;
  best.arrival = best.capacity = std::min(1.0, grid.max);
  const OptimizeSense sense =
      upper_side ? OptimizeSense::minimize : OptimizeSense::maximize;
  const auto value_of = [&](double tha, double thq) {
    const Band b = band(tha, thq);
    return upper_side ? b.upper : b.lower;
  };
  for (int sweep = 0; sweep < 2; ++sweep) {
    const ThetaOpt a = optimize_theta(
        [&](double th) { return value_of(th, best.capacity); }, grid, sense);
    best.arrival = a.theta;
    const ThetaOpt q = optimize_theta(
        [&](double th) { return value_of(best.arrival, th); }, grid, sense);
    best.capacity = q.theta;
    best.value = q.value;
  }
  return best;
}

void build_band_curves(const CurveContext& ctx, BandKind kind,
                       const std::string& label,
                       std::vector<BoundCurve>* out) {
  BoundCurve upper = new_curve(ctx, BoundSide::upper_on_cdf, label);
  BoundCurve lower = new_curve(ctx, BoundSide::lower_on_cdf, label);
  const bool throughput = ctx.cfg.grid.measure == Measure::throughput;
  for (double x : ctx.grid) {
    BoundPoint up_pt, lo_pt;
    up_pt.argument = lo_pt.argument = x;
    if (throughput) {
      const auto band = [&](double tha, double thq) {
        return eval_band(ctx, kind, x, tha, thq);
      };
      const ThroughputTheta up =
          optimize_throughput(band, ctx.cfg.bounds.theta, true);
      const ThroughputTheta lo =
          optimize_throughput(band, ctx.cfg.bounds.theta, false);
      const Band bu = band(up.arrival, up.capacity);
      const Band bl = band(lo.arrival, lo.capacity);
      up_pt.theta = up.arrival;
      up_pt.value = bu.upper;
      up_pt.vacuous = bu.upper_vacuous;
      lo_pt.theta = lo.arrival;
      lo_pt.value = bl.lower;
      lo_pt.vacuous = bl.lower_vacuous;
    } else {
      const ThetaOpt up = optimize_theta(
          [&](double th) { return eval_band(ctx, kind, x, th, th).upper; },
          ctx.cfg.bounds.theta, OptimizeSense::minimize);
      const ThetaOpt lo = optimize_theta(
          [&](double th) { return eval_band(ctx, kind, x, th, th).lower; },
          ctx.cfg.bounds.theta, OptimizeSense::maximize);
      const Band bu = eval_band(ctx, kind, x, up.theta, up.theta);
      const Band bl = eval_band(ctx, kind, x, lo.theta, lo.theta);
      up_pt.theta = up.theta;
      up_pt.value = bu.upper;
      up_pt.vacuous = bu.upper_vacuous;
      lo_pt.theta = lo.theta;
      lo_pt.value = bl.lower;
      lo_pt.vacuous = bl.lower_vacuous;
    }
    upper.points.push_back(up_pt);
    lower.points.push_back(lo_pt);
  }
  out->push_back(std::move(lower));
  out->push_back(std::move(upper));
}

// ---- selection dispatch ----------------------------------------------------

std::vector<BoundCurve> build_curves(const CurveContext& ctx,
                                     const std::vector<std::string>& selection) {
  std::vector<BoundCurve> curves;
  const bool quantum = ctx.scenario.regime == Regime::quantum;
  const bool a_iid = is_iid(ctx.scenario.arrival);
  const bool c_iid = is_iid(ctx.scenario.capacity);
  for (const std::string& token : selection) {
    if (token == "chernoff" || token == "chernoff_union") {
      if (quantum != (token == "chernoff")) {
        throw ConfigError(0, "'" + token + "' does not match the regime");
      }
      if (!a_iid || !c_iid) {
        throw ConfigError(0, "'" + token + "' needs i.i.d. processes");
      }
      curves.push_back(build_tail_curve(ctx, token));
    } else if (token == "lundberg" || token == "map_lundberg") {
      if (quantum) {
        throw ConfigError(0, "'" + token + "' is a classical bound");
      }
      const bool has_map = !a_iid || !c_iid;
      if (has_map != (token == "map_lundberg")) {
        throw ConfigError(0, "'" + token + "' does not match the process kinds");
      }
      curves.push_back(
          build_steady_curve(ctx, classical_steady_bound(ctx.scenario), token));
    } else if (token == "map_throughput") {
      if (quantum) {
        throw ConfigError(0, "'map_throughput' is a classical bound");
      }
      curves.push_back(build_map_throughput_curve(ctx));
    } else if (token == "iid_band") {
      if (!quantum || !a_iid || !c_iid) {
        throw ConfigError(0, "'iid_band' needs a quantum i.i.d. scenario");
      }
      build_band_curves(ctx, BandKind::iid, token, &curves);
    } else if (token == "map_band") {
      if (!quantum || a_iid || c_iid) {
        throw ConfigError(0, "'map_band' needs Markov arrival and capacity");
      }
      build_band_curves(ctx, BandKind::map, token, &curves);
    } else if (token == "map_constant_band") {
      if (!quantum || a_iid == c_iid) {
        throw ConfigError(
            0, "'map_constant_band' needs exactly one Markov side");
      }
      build_band_curves(ctx, BandKind::map_constant, token, &curves);
    } else {
      throw ConfigError(0, "unknown bound selection '" + token + "'");
    }
  }
  return curves;
}

// ---- empirical comparison ---------------------------------------------------

double empirical_estimate(const EnsembleStats& stats, Measure measure,
                          Regime regime, double x) {
  // Quantum bands bound the CDF; classical bounds the tail.
  const bool cdf = regime == Regime::quantum;
  switch (measure) {
    case Measure::backlog:
      return cdf ? stats.cdf_backlog(x) : stats.tail_backlog(x);
    case Measure::delay:
      return cdf ? stats.cdf_delay(x) : stats.tail_delay(x);
    case Measure::throughput:
      return cdf ? stats.cdf_throughput(x) : stats.tail_throughput(x);
  }
  return 0.0;
}

double empirical_for_side(const EnsembleStats& stats, Measure measure,
                          BoundSide side, double x) {
  switch (side) {
    case BoundSide::upper_on_tail:
      switch (measure) {
        case Measure::backlog: return stats.tail_backlog(x);
        case Measure::delay: return stats.tail_delay(x);
        case Measure::throughput: return stats.tail_throughput(x);
      }
      break;
    case BoundSide::upper_on_cdf:
    case BoundSide::lower_on_cdf:
      switch (measure) {
        case Measure::backlog: return stats.cdf_backlog(x);
        case Measure::delay: return stats.cdf_delay(x);
        case Measure::throughput: return stats.cdf_throughput(x);
      }
      break;
  }
  return 0.0;
}

std::vector<CurveValidity> validate_curves(const std::vector<BoundCurve>& curves,
                                           const EnsembleStats& stats,
                                           double z) {
  std::vector<CurveValidity> out;
  for (const BoundCurve& c : curves) {
    CurveValidity v;
    v.label = c.label;
    v.side = c.side;
    v.points = c.points.size();
    for (const BoundPoint& pt : c.points) {
      const double emp = empirical_for_side(stats, c.measure, c.side,
                                            pt.argument);
      const double hw = stats.ci_halfwidth(emp, z);
      const bool bad = c.side == BoundSide::lower_on_cdf
                           ? pt.value > emp + hw
                           : pt.value < emp - hw;
      v.violations += bad;
    }
    v.ok = v.violations * 100 < std::max<std::size_t>(v.points, 1);
    out.push_back(v);
  }
  return out;
}

// ---- grid -------------------------------------------------------------------

std::vector<double> build_grid(const ExperimentConfig& cfg,
                               const Scenario& scenario,
                               const EnsembleStats& stats) {
  double lo, hi;
  if (cfg.grid.min && cfg.grid.max) {
    lo = *cfg.grid.min;
    hi = *cfg.grid.max;
  } else {
    double smin = 0.0, smax = 0.0;
    switch (cfg.grid.measure) {
      case Measure::backlog:
        smin = stats.min_backlog();
        smax = stats.max_backlog();
        break;
      case Measure::delay:
        smin = 0.0;
        smax = static_cast<double>(stats.max_delay());
        break;
      case Measure::throughput:
        smin = stats.min_throughput();
        smax = stats.max_throughput();
        break;
    }
    const double span = smax - smin;
    const double pad = span > 0.0 ? 0.2 * span : 1.0;
    lo = cfg.grid.min.value_or(smin - pad);
    hi = cfg.grid.max.value_or(smax + pad);
  }
  if (cfg.grid.measure == Measure::delay) {
    lo = std::max(lo, 0.0);
    hi = std::min(hi, static_cast<double>(scenario.horizon));
  }
  std::vector<double> grid;
  const int n = cfg.grid.points;
  for (int i = 0; i < n; ++i) {
    double x = lo + (hi - lo) * static_cast<double>(i) /
                        static_cast<double>(n - 1);
    if (cfg.grid.measure == Measure::delay) x = std::round(x);
    grid.push_back(x);
  }
  if (cfg.grid.measure == Measure::delay) {
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }
  return grid;
}

// ---- throughput quantile extraction ----------------------------------------

std::optional<ThroughputQuantile> extract_quantile(
    const CurveContext& ctx, const EnsembleStats& stats, BandKind kind,
    double violation) {
  ThroughputQuantile q;
  q.violation = violation;
  const double t = static_cast<double>(ctx.scenario.horizon);
  const auto lower_band_at = [&](double x) {
    const auto band = [&](double tha, double thq) {
      return eval_band(ctx, kind, x, tha, thq);
    };
    return optimize_throughput(band, ctx.cfg.bounds.theta, false).value;
  };
  const double target = 1.0 - violation;
  // March upward from the empirical mean until the band certifies the
  // violation level, then bisect.
  double lo = stats.mean_throughput();
  double step = std::max(1.0, (stats.max_throughput() - lo) / 8.0);
  double hi = lo + step;
  int guard = 0;
  while (lower_band_at(hi) < target) {
    lo = hi;
    step *= 2.0;
    hi += step;
    if (++guard > 60) return q;  // found = false
  }
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-9 * std::max(1.0, std::abs(mid))) break;
    if (lower_band_at(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  q.found = true;
  q.bound_cumulative = hi;
  q.bound_rate = hi / t;
  q.empirical_cumulative = stats.quantile_throughput(target);
  q.empirical_rate = q.empirical_cumulative / t;
  q.dominates = q.bound_cumulative >= q.empirical_cumulative;
  return q;
}

// ---- output artifacts --------------------------------------------------------

std::string csv_bool(bool b) { return b ? "1" : "0"; }

void write_bounds_csv(const std::filesystem::path& path,
                      const std::vector<BoundCurve>& curves) {
  std::ofstream os(path);
  os << "measure,side,argument,bound,theta,p,vacuous\n";
  // Band pairs also emit a pointwise median row per argument.
  for (const BoundCurve& c : curves) {
    for (const BoundPoint& pt : c.points) {
      os << to_string(c.measure) << ',' << to_string(c.side) << ','
         << format_double(pt.argument) << ',' << format_double(pt.value) << ','
         << format_double(pt.theta) << ','
         << (pt.holder_p ? format_double(*pt.holder_p) : std::string()) << ','
         << csv_bool(pt.vacuous) << '\n';
    }
  }
  for (std::size_t i = 0; i + 1 < curves.size(); ++i) {
    const BoundCurve& lo = curves[i];
    const BoundCurve& up = curves[i + 1];
    if (lo.label != up.label || lo.side != BoundSide::lower_on_cdf ||
        up.side != BoundSide::upper_on_cdf) {
      continue;
    }
    for (std::size_t k = 0; k < lo.points.size(); ++k) {
      const double median = 0.5 * (lo.points[k].value + up.points[k].value);
      os << to_string(lo.measure) << ",median,"
         << format_double(lo.points[k].argument) << ','
         << format_double(median) << ",,,"
         << csv_bool(lo.points[k].vacuous && up.points[k].vacuous) << '\n';
    }
  }
}

void write_empirical_csv(const std::filesystem::path& path,
                         const ExperimentConfig& cfg,
                         const Scenario& scenario,
                         const std::vector<double>& grid,
                         const EnsembleStats& stats) {
  std::ofstream os(path);
  os << "argument,estimate,ci_halfwidth,n_paths\n";
  for (double x : grid) {
    const double est =
        empirical_estimate(stats, cfg.grid.measure, scenario.regime, x);
    os << format_double(x) << ',' << format_double(est) << ','
       << format_double(stats.ci_halfwidth(est, cfg.montecarlo.confidence_z))
       << ',' << stats.num_paths() << '\n';
  }
}

std::string build_summary(const ExperimentResult& r,
                          const std::vector<std::string>& selection) {
  std::ostringstream os;
  os << "qperf experiment summary\n";
  os << "========================\n\n";
  os << render_config(r.config) << '\n';

  os << "resolved scenario\n";
  os << "  arrival mean rate   = " << format_double(mean_rate(r.scenario.arrival))
     << '\n';
  os << "  capacity mean rate  = "
     << format_double(mean_rate(r.scenario.capacity)) << '\n';
  os << "  drift (lambda - Q)  = "
     << format_double(mean_rate(r.scenario.arrival) -
                      mean_rate(r.scenario.capacity))
     << '\n';
  os << "  bounds selected     =";
  for (const auto& s : selection) os << ' ' << s;
  os << "\n\n";

  // Steady-state diagnostics when a Lundberg bound participates.
  for (const auto& s : selection) {
    if (s == "lundberg" || s == "map_lundberg") {
      const SteadyStateBound b = classical_steady_bound(r.scenario);
      os << "lundberg root\n";
      os << "  theta*    = " << format_double(b.theta_star) << '\n';
      os << "  prefactor = " << format_double(b.prefactor) << '\n';
      os << "  decay rate per delay slot = " << format_double(b.decay_rate)
         << "\n\n";
    }
  }
  // Perron-Frobenius diagnostics for Markov sides at theta = 1.
  const auto describe_map = [&](const char* name, const ProcessSpec& p) {
    if (is_iid(p)) return;
    const MapProcess& mp = map_process(p);
    const EigenPair e = pf_eigenpair(mp.kernel, 1.0);
    os << name << " Markov kernel at theta=1: kappa = "
       << format_double(e.kappa) << ", h =";
    for (double h : e.h) os << ' ' << format_double(h);
    os << ", stationary =";
    for (double pi : mp.kernel.stationary()) os << ' ' << format_double(pi);
    os << '\n';
  };
  describe_map("arrival", r.scenario.arrival);
  describe_map("capacity", r.scenario.capacity);

  os << "empirical (" << r.stats.num_paths() << " paths)\n";
  os << "  mean backlog        = " << format_double(r.stats.mean_backlog())
     << '\n';
  os << "  mean backlog rate   = "
     << format_double(r.stats.mean_backlog() /
                      static_cast<double>(r.scenario.horizon))
     << '\n';
  os << "  mean throughput rate= "
     << format_double(r.stats.mean_throughput() /
                      static_cast<double>(r.scenario.horizon))
     << '\n';
  os << "  mean delay          = " << format_double(r.stats.mean_delay())
     << '\n';
  os << "  Pr(D = 0)           = " << format_double(r.stats.pr_zero_delay())
     << '\n';
  os << "  Pr(B <= 0)          = "
     << format_double(r.stats.pr_nonpositive_backlog()) << '\n';
  os << "  E[B | B >= 0]       = "
     << format_double(r.stats.mean_backlog_workload()) << '\n';
  os << "  E[B | B <= 0]       = "
     << format_double(r.stats.mean_backlog_potential()) << "\n\n";

  if (r.quantile) {
    os << "throughput quantile at violation "
       << format_double(r.quantile->violation) << '\n';
    if (r.quantile->found) {
      os << "  band-certified rate = " << format_double(r.quantile->bound_rate)
         << " (cumulative " << format_double(r.quantile->bound_cumulative)
         << ")\n";
      os << "  empirical rate      = "
         << format_double(r.quantile->empirical_rate) << " (cumulative "
         << format_double(r.quantile->empirical_cumulative) << ")\n";
      os << "  bound dominates empirical: "
         << (r.quantile->dominates ? "yes" : "NO") << "\n\n";
    } else {
      os << "  band did not certify the level within the search range\n\n";
    }
  }

  if (r.limit_report) {
    os << r.limit_report->to_text() << '\n';
  }

  os << "bound validity (z = "
     << format_double(r.config.montecarlo.confidence_z) << ")\n";
  for (const CurveValidity& v : r.validity) {
    os << "  " << v.label << '/' << to_string(v.side) << ": " << v.violations
       << " violation(s) across " << v.points << " points -> "
       << (v.ok ? "ok" : "FAIL") << '\n';
  }
  os << "  overall: " << (r.validity_ok ? "ok" : "FAIL") << '\n';
  return os.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg_in,
                                const RunOptions& options) {
  ExperimentResult r;
  r.config = cfg_in;
  if (options.seed) r.config.montecarlo.seed = *options.seed;
  if (options.paths) r.config.montecarlo.paths = *options.paths;
  if (options.out_dir) r.config.output_dir = *options.out_dir;
  if (options.grid_min) r.config.grid.min = *options.grid_min;
  if (options.grid_max) r.config.grid.max = *options.grid_max;
  if (options.grid_points) r.config.grid.points = *options.grid_points;

  r.scenario = resolve_scenario(r.config);
  const std::vector<std::string> selection =
      resolve_bound_selection(r.config, r.scenario);

  EnsembleOptions ens;
  ens.num_paths = r.config.montecarlo.paths;
  ens.base_seed = r.config.montecarlo.seed;
  r.stats = run_ensemble(r.scenario, ens);

  r.grid = build_grid(r.config, r.scenario, r.stats);
  const CurveContext ctx{r.scenario, r.config, r.grid};
  r.curves = build_curves(ctx, selection);
  r.validity =
      validate_curves(r.curves, r.stats, r.config.montecarlo.confidence_z);
  r.validity_ok = true;
  for (const auto& v : r.validity) r.validity_ok = r.validity_ok && v.ok;

  if (r.config.grid.measure == Measure::throughput &&
      r.scenario.regime == Regime::quantum) {
    for (const std::string& token : selection) {
      if (token == "iid_band") {
        r.quantile =
            extract_quantile(ctx, r.stats, BandKind::iid, r.config.grid.violation);
      } else if (token == "map_band") {
        r.quantile =
            extract_quantile(ctx, r.stats, BandKind::map, r.config.grid.violation);
      }
    }
  }

  if (r.config.montecarlo.limit_report &&
      r.scenario.regime == Regime::quantum) {
    std::vector<std::size_t> ladder;
    for (std::size_t t : {std::size_t{100}, std::size_t{1000},
                          std::size_t{10000}}) {
      if (t <= r.scenario.horizon) ladder.push_back(t);
    }
    if (ladder.empty()) ladder.push_back(r.scenario.horizon);
    EnsembleOptions ladder_opts = ens;
    ladder_opts.num_paths = std::min<std::size_t>(ens.num_paths, 20000);
    r.limit_report = check_limit_theorems(r.scenario, ladder, ladder_opts);
  }

  r.summary_text = build_summary(r, selection);

  if (options.write_files) {
    r.out_dir = std::filesystem::path(r.config.output_dir);
    std::filesystem::create_directories(r.out_dir);
    r.bounds_csv = r.out_dir / "bounds.csv";
    r.empirical_csv = r.out_dir / "empirical.csv";
    r.summary_path = r.out_dir / "summary.txt";
    write_bounds_csv(r.bounds_csv, r.curves);
    write_empirical_csv(r.empirical_csv, r.config, r.scenario, r.grid, r.stats);
    std::ofstream os(r.summary_path);
    os << r.summary_text;
  }
  return r;
}

}  // namespace qperf
