// scenario.hpp - A queueing scenario: regime, horizon, and the arrival and
// capacity processes feeding the queue.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <variant>

#include <qperf/processes.hpp>

namespace qperf {

enum class Regime { classical, quantum };

struct MapProcess {
  MapKernel kernel;
  std::size_t initial_state = 0;
  friend bool operator==(const MapProcess&, const MapProcess&) = default;
};

using ProcessSpec = std::variant<IncrementDistribution, MapProcess>;

struct Scenario {
  Regime regime = Regime::quantum;
  std::size_t horizon = 0;  // slots 1..t carry increments; slot 0 is empty
  ProcessSpec arrival;
  ProcessSpec capacity;
};

inline bool is_iid(const ProcessSpec& p) {
  return std::holds_alternative<IncrementDistribution>(p);
}

inline const IncrementDistribution& iid_dist(const ProcessSpec& p) {
  if (!is_iid(p)) {
    throw std::invalid_argument("scenario: expected an i.i.d. process");
  }
  return std::get<IncrementDistribution>(p);
}

inline const MapProcess& map_process(const ProcessSpec& p) {
  if (is_iid(p)) {
    throw std::invalid_argument("scenario: expected a Markov additive process");
  }
  return std::get<MapProcess>(p);
}

inline double mean_rate(const ProcessSpec& p) {
  if (is_iid(p)) return iid_dist(p).mean();
  return map_process(p).kernel.stationary_mean_increment();
}

inline double min_support_rate(const ProcessSpec& p) {
  if (is_iid(p)) return iid_dist(p).min_support();
  const MapKernel& k = map_process(p).kernel;
  double lo = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < k.num_states(); ++i) {
    for (std::size_t j = 0; j < k.num_states(); ++j) {
      if (k.transition()[i][j] == 0.0) continue;
      const double v = k.increment(i, j).min_support();
      lo = first ? v : std::min(lo, v);
      first = false;
    }
  }
  return lo;
}

// Classical scenarios require nonnegative capacity; the quantum regime admits
// negative capacity (clipped at the queue boundary).
inline void validate_scenario(const Scenario& s) {
  if (s.horizon == 0) {
    throw std::invalid_argument("scenario: horizon must be at least 1 slot");
  }
  if (s.regime == Regime::classical && min_support_rate(s.capacity) < 0.0) {
    throw std::invalid_argument(
        "scenario: classical capacity must be nonnegative");
  }
}

}  // namespace qperf
