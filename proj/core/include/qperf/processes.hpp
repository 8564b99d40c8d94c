// processes.hpp - Per-slot arrival and capacity processes: i.i.d. increments
// with exact cumulant generating functions, and finite-state Markov additive
// processes with their Perron-Frobenius eigenpairs.

#pragma once

#include <cstddef>
#include <vector>

#include <qperf/rng.hpp>

namespace qperf {

// One-step random increment. Three base shapes (constant, Poisson, finite
// support) plus an affine layer (sign and shift) so that differences like
// "Poisson arrival minus constant capacity" stay exactly representable with
// closed-form CGFs. All shapes have entire CGFs; domain errors only arise
// from overflow.
class IncrementDistribution {
 public:
  enum class Kind { constant, poisson, finite_support };

  IncrementDistribution() = default;  // constant 0

  static IncrementDistribution constant(double value);
  static IncrementDistribution poisson(double lambda);
  // values need not be sorted; probs must be nonnegative and sum to 1
  // within 1e-12.
  static IncrementDistribution finite_support(std::vector<double> values,
                                              std::vector<double> probs);

  Kind kind() const { return kind_; }

  // kappa(theta) = log E[e^{theta X}]; kappa(0) = 0 exactly.
  double cgf(double theta) const;
  double mean() const;
  double variance() const;
  double min_support() const;  // essential infimum
  double max_support() const;  // essential supremum (+inf for Poisson)

  double sample(Rng& rng) const;

  IncrementDistribution shifted(double delta) const;
  IncrementDistribution negated() const;
  // Distribution of [X]^+. Exact for constants and finite supports and for
  // Poisson variables with nonnegative support; throws std::domain_error for
  // shifted Poisson shapes whose support straddles zero.
  IncrementDistribution clipped_nonnegative() const;

  // Accessors used by the config layer.
  double constant_value() const { return value_; }
  double poisson_lambda() const { return lambda_; }
  double poisson_shift() const { return shift_; }
  double poisson_sign() const { return sign_; }
  const std::vector<double>& support_values() const { return values_; }
  const std::vector<double>& support_probs() const { return probs_; }

  friend bool operator==(const IncrementDistribution&,
                         const IncrementDistribution&) = default;

 private:
  Kind kind_ = Kind::constant;
  double value_ = 0.0;   // constant
  double lambda_ = 0.0;  // poisson: sign_ * N(lambda_) + shift_
  double sign_ = 1.0;
  double shift_ = 0.0;
  // Poisson sampling caches: lambda split into full chunks of 30 plus a
  // remainder, with the acceptance limits e^{-chunk} precomputed.
  int pois_chunks_ = 0;
  double pois_limit_chunk_ = 0.0;
  double pois_limit_rem_ = 1.0;
  std::vector<double> values_;  // finite support, sorted ascending
  std::vector<double> probs_;
  std::vector<double> cum_;  // sampling CDF derived from probs_
};

// Increment of "arrival minus capacity" when it stays representable: one side
// constant, or both finite supports (exact convolution). Throws
// std::invalid_argument otherwise.
IncrementDistribution increment_difference(const IncrementDistribution& a,
                                           const IncrementDistribution& c);

// Finite-state Markov additive process: transition matrix P plus one
// increment distribution per transition (i -> j). Construction validates
// stochasticity (rows sum to 1 within 1e-12) and irreducibility.
class MapKernel {
 public:
  MapKernel(std::vector<std::vector<double>> transition,
            std::vector<std::vector<IncrementDistribution>> increments);

  std::size_t num_states() const { return transition_.size(); }
  const std::vector<std::vector<double>>& transition() const {
    return transition_;
  }
  const IncrementDistribution& increment(std::size_t i, std::size_t j) const {
    return increments_[i][j];
  }

  // Stationary distribution of P (direct linear solve; states are few).
  std::vector<double> stationary() const;
  // Stationary per-slot drift: sum_i varpi_i sum_j p_ij E[Y_ij].
  double stationary_mean_increment() const;

  MapKernel shifted(double delta) const;
  MapKernel negated() const;
  MapKernel clipped_nonnegative() const;

  friend bool operator==(const MapKernel&, const MapKernel&) = default;

 private:
  std::vector<std::vector<double>> transition_;
  std::vector<std::vector<IncrementDistribution>> increments_;
};

// F_hat[theta]: entries p_ij * E[e^{theta Y_ij}]. Equals P at theta = 0.
// Throws std::domain_error when an entry overflows.
std::vector<std::vector<double>> kernel_matrix(const MapKernel& kernel,
                                               double theta);

struct EigenPair {
  double theta = 0.0;
  double kappa = 0.0;      // log Perron-Frobenius eigenvalue of F_hat[theta]
  std::vector<double> h;   // right eigenvector, normalized varpi . h = 1
  std::vector<double> v;   // left eigenvector, normalized v . h = 1
};

// Dominant eigenpair of F_hat[theta] by power iteration (Rayleigh quotients
// converged to 1e-12 relative, residual checked to 1e-9 relative). Throws
// std::runtime_error on non-convergence.
EigenPair pf_eigenpair(const MapKernel& kernel, double theta);

// t i.i.d. increments for slots 1..t. Deterministic given the Rng state.
std::vector<double> sample_path(const IncrementDistribution& dist,
                                std::size_t t, Rng& rng);

struct MapPath {
  std::vector<double> increments;   // slots 1..t (size t)
  std::vector<std::size_t> states;  // J_0..J_t (size t + 1)
};

MapPath sample_path(const MapKernel& kernel, std::size_t initial_state,
                    std::size_t t, Rng& rng);

}  // namespace qperf
