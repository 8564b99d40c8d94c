// config.hpp - Experiment configuration: a line-oriented "key = value" format
// with [section] headers, plus the builtin scenario catalog.
//
// Sections and keys:
//   [scenario]    name, description, regime (classical|quantum), horizon
//   [arrival]     process, and for process = map: states, row_<i>,
//                 inc_<i>_<j>, initial_state
//   [capacity]    same as arrival; additionally allows process = channel ...
//   [bounds]      select, theta_min, theta_max, theta_points, holder_p, p_grid
//   [grid]        measure (backlog|delay|throughput), points, min, max,
//                 violation
//   [montecarlo]  paths, seed, confidence_z, limit_report
//   [output]      dir
//
// Process values: "constant <v>", "poisson <v>", "poisson lambda=<v>",
// "poisson rate_factor=<v>" (arrival only; rate relative to the capacity
// mean), "finite v:p v:p ...", "map", "channel <model> key=value ..." with
// models attenuation (l, l_a), broadband (eta, power_ratio), freespace
// (omega_c, power_ratio), qubit (alpha, beta).
//
// Parsing reports the first error with its line number; duplicate keys are
// rejected at the second occurrence. render_config emits a canonical form
// that parses back to an equal config.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <qperf/bounds.hpp>
#include <qperf/capacity.hpp>
#include <qperf/scenario.hpp>

namespace qperf {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " +
                                          message
                                    : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

struct ConstantProcessConfig {
  double value = 0.0;
  friend bool operator==(const ConstantProcessConfig&,
                         const ConstantProcessConfig&) = default;
};

struct PoissonProcessConfig {
  std::optional<double> lambda;
  std::optional<double> rate_factor;  // lambda = factor * capacity mean rate
  friend bool operator==(const PoissonProcessConfig&,
                         const PoissonProcessConfig&) = default;
};

struct FiniteProcessConfig {
  std::vector<double> values;
  std::vector<double> probs;
  friend bool operator==(const FiniteProcessConfig&,
                         const FiniteProcessConfig&) = default;
};

struct MapProcessConfig {
  std::size_t states = 1;
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<IncrementDistribution>> increments;
  std::size_t initial_state = 0;
  friend bool operator==(const MapProcessConfig&,
                         const MapProcessConfig&) = default;
};

struct ChannelProcessConfig {
  ChannelSpec spec;
  friend bool operator==(const ChannelProcessConfig&,
                         const ChannelProcessConfig&) = default;
};

using ProcessConfig =
    std::variant<ConstantProcessConfig, PoissonProcessConfig,
                 FiniteProcessConfig, MapProcessConfig, ChannelProcessConfig>;

struct BoundsConfig {
  std::vector<std::string> select;  // empty: pick a default for the scenario
  ThetaGrid theta;
  double holder_p = 2.0;
  std::vector<double> p_grid;  // optional Hoelder grid; empty: {holder_p}
  friend bool operator==(const BoundsConfig&, const BoundsConfig&) = default;
};

struct GridConfig {
  Measure measure = Measure::backlog;
  int points = 100;
  std::optional<double> min;  // absent: empirical support +- 20%
  std::optional<double> max;
  double violation = 1e-5;  // throughput quantile extraction level
  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct MonteCarloConfig {
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  double confidence_z = 3.0;
  bool limit_report = false;
  friend bool operator==(const MonteCarloConfig&,
                         const MonteCarloConfig&) = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string description;
  Regime regime = Regime::quantum;
  std::size_t horizon = 1;
  ProcessConfig arrival;
  ProcessConfig capacity;
  BoundsConfig bounds;
  GridConfig grid;
  MonteCarloConfig montecarlo;
  std::string output_dir = "out";
  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

ExperimentConfig parse_config(std::string_view text);
std::string render_config(const ExperimentConfig& cfg);

// Build the runnable scenario: resolves channel capacities and relative
// arrival rates, constructs kernels, and validates regime constraints.
// Throws ConfigError on anything that cannot run.
Scenario resolve_scenario(const ExperimentConfig& cfg);

// Mean per-slot rate of the resolved capacity side.
double resolve_capacity_rate(const ExperimentConfig& cfg);

// The bound selection with the scenario-dependent default applied.
std::vector<std::string> resolve_bound_selection(const ExperimentConfig& cfg,
                                                 const Scenario& scenario);

struct CatalogEntry {
  std::string name;
  std::string description;
  std::string text;
};

// Shipped reference configurations (fig1a, fig1b, fig1c, classical-poisson,
// map-2state, classical-map-2state).
const std::vector<CatalogEntry>& builtin_scenarios();

}  // namespace qperf
