// experiment.hpp - Experiment orchestration: run the Monte Carlo ensemble,
// evaluate the selected bounds on a grid with optimized free parameters,
// validate bounds against the empirical estimates, and write the CSV and
// summary artifacts.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <qperf/config.hpp>
#include <qperf/queueing.hpp>

namespace qperf {

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<std::string> out_dir;
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  std::optional<int> grid_points;
  bool write_files = true;
};

struct CurveValidity {
  std::string label;
  BoundSide side = BoundSide::upper_on_tail;
  std::size_t points = 0;
  std::size_t violations = 0;  // grid points breaching the z-band
  bool ok = true;              // violations stay under 1% of points
};

struct ThroughputQuantile {
  double violation = 1e-5;
  bool found = false;
  double bound_cumulative = 0.0;  // smallest x the band certifies
  double bound_rate = 0.0;        // divided by the horizon
  double empirical_cumulative = 0.0;
  double empirical_rate = 0.0;
  bool dominates = false;  // bound quantile >= empirical quantile
};

struct ExperimentResult {
  ExperimentConfig config;  // after overrides
  Scenario scenario;
  std::vector<double> grid;
  std::vector<BoundCurve> curves;
  EnsembleStats stats;
  std::vector<CurveValidity> validity;
  bool validity_ok = true;
  std::optional<ThroughputQuantile> quantile;
  std::optional<LimitTheoremReport> limit_report;
  std::string summary_text;
  std::filesystem::path out_dir;
  std::filesystem::path bounds_csv;
  std::filesystem::path empirical_csv;
  std::filesystem::path summary_path;
};

// Run one experiment. Deterministic given (config, options): rerunning with
// the same inputs produces byte-identical CSV and summary files.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const RunOptions& options = {});

}  // namespace qperf
