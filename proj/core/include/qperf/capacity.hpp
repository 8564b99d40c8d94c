// capacity.hpp - Closed-form channel capacity models and cumulative capacity
// over a slot sequence.
//
// Four models are covered: the broadband lossy bosonic channel and the
// far-field free-space channel (classical bits), and the attenuation channel
// and two-dimensional qubit channel (qubits). Physical constants are folded
// into dimensionless ratios (P/hbar, P/P0) so the API commits to no unit
// system.

#pragma once

#include <cstddef>
#include <variant>
#include <vector>

namespace qperf {

// g(x) = (x+1) log2(x+1) - x log2(x): capacity density of a thermal bosonic
// mode with mean photon number x. Continuous at 0 with g(0) = 0.
double g_function(double x);

// h(x) = -x log2(x) - (1-x) log2(1-x) on [0, 1].
double binary_entropy(double x);

struct BroadbandLossySpec {
  double eta = 1.0;          // transmissivity in [0, 1]
  double power_ratio = 0.0;  // P / hbar, 1/s^2
  friend bool operator==(const BroadbandLossySpec&,
                         const BroadbandLossySpec&) = default;
};

struct FreeSpaceSpec {
  double omega_c = 0.0;      // maximum transmitter frequency, rad/s
  double power_ratio = 0.0;  // P / P0, dimensionless
  friend bool operator==(const FreeSpaceSpec&, const FreeSpaceSpec&) = default;
};

struct AttenuationSpec {
  double l = 0.0;    // transmission length (or storage time)
  double l_a = 1.0;  // absorption length (or decay time), > 0
  friend bool operator==(const AttenuationSpec&,
                         const AttenuationSpec&) = default;
};

struct QubitSpec {
  double alpha = 0.0;  // radians
  double beta = 0.0;   // radians
  friend bool operator==(const QubitSpec&, const QubitSpec&) = default;
};

using ChannelSpec =
    std::variant<BroadbandLossySpec, FreeSpaceSpec, AttenuationSpec, QubitSpec>;

// C = sqrt(eta)/ln2 * sqrt(pi * power_ratio / 3), bits per second.
double broadband_lossy_capacity(const BroadbandLossySpec& spec);

// Dimensionless mode parameter y0 solving the power constraint
//   power_ratio = int_0^{y0} dx/x * 1/(e^{1/x} - 1)
// by bracketed bisection. Throws std::runtime_error when no bracket is found
// below the y0 ceiling of 1e6.
double freespace_mode_parameter(const FreeSpaceSpec& spec);

// C = omega_c / (2 pi y0) * int_0^{y0} g(1/(e^{1/x} - 1)) dx, bits per
// second. Both integrands are extended continuously by 0 at x = 0.
double freespace_capacity(const FreeSpaceSpec& spec);

enum class CapacityMode {
  raw,     // signed capacity as given by the formula
  usable,  // clipped at zero: [Q]^+
};

// Q = log2(eta) - log2(1 - eta) with eta = e^{-l/l_a}, qubits per use.
// Negative below eta = 1/2. Throws std::domain_error for l_a <= 0 and for
// eta indistinguishable from 0 or 1 in double precision.
double attenuation_quantum_capacity(double l, double l_a,
                                    CapacityMode mode = CapacityMode::raw);

struct QubitCapacityResult {
  double value = 0.0;   // qubits per use, in [0, 1]
  double p_star = 0.0;  // maximizing diagonal-input weight
};

// Q = max_p h(p cos^2(a) + (1-p) sin^2(b)) - h(p sin^2(a) + (1-p) sin^2(b)).
// Returns 0 outside the nonzero-capacity region cos(2a)/cos(2b) > 0. The
// maximization runs a 1024-point grid pass followed by golden-section
// refinement, guarding against non-concavity of the objective.
QubitCapacityResult qubit_channel_capacity_detail(double alpha, double beta);
double qubit_channel_capacity(double alpha, double beta);

// Per-slot capacity of any channel model (dispatch over the variant).
double channel_capacity(const ChannelSpec& spec);

enum class CapacityUnit { classical_bits, qubits };

struct CapacitySequence {
  std::vector<double> values;  // capacity per slot
  CapacityUnit unit = CapacityUnit::classical_bits;
};

// Sum of per-slot capacities over the inclusive slot window [m, n]. Additive
// over adjacent windows by construction.
double cumulative_capacity(const CapacitySequence& seq, std::size_t m,
                           std::size_t n);

}  // namespace qperf
