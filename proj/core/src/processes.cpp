#include <qperf/processes.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace qperf {

namespace {

constexpr double kProbTol = 1e-12;

// Knuth multiplication method; exact for any chunk with e^{-chunk} well
// above double underflow. Larger rates are split into chunks of 30.
long poisson_knuth(Rng& rng, double limit) {
  long k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.uniform();
  } while (p > limit);
  return k - 1;
}

std::vector<double> build_cdf(const std::vector<double>& probs) {
  std::vector<double> cum(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cum[i] = acc;
  }
  if (!cum.empty()) cum.back() = 1.0;
  return cum;
}

std::size_t sample_index(const std::vector<double>& cum, Rng& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  return static_cast<std::size_t>(
      std::min<std::ptrdiff_t>(it - cum.begin(),
                               static_cast<std::ptrdiff_t>(cum.size()) - 1));
}

}  // namespace

IncrementDistribution IncrementDistribution::constant(double value) {
  IncrementDistribution d;
  d.kind_ = Kind::constant;
  d.value_ = value;
  return d;
}

IncrementDistribution IncrementDistribution::poisson(double lambda) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("poisson: rate must be nonnegative");
  }
  IncrementDistribution d;
  d.kind_ = Kind::poisson;
  d.lambda_ = lambda;
  double rem = lambda;
  while (rem > 30.0) {
    ++d.pois_chunks_;
    rem -= 30.0;
  }
  d.pois_limit_chunk_ = std::exp(-30.0);
  d.pois_limit_rem_ = std::exp(-rem);
  return d;
}

IncrementDistribution IncrementDistribution::finite_support(
    std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size()) {
    throw std::invalid_argument("finite_support: values/probs size mismatch");
  }
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("finite_support: negative mass");
    total += p;
  }
  if (std::abs(total - 1.0) > kProbTol) {
    throw std::invalid_argument("finite_support: probabilities must sum to 1");
  }
  // Sort by value and merge exact duplicates.
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  IncrementDistribution d;
  d.kind_ = Kind::finite_support;
  for (std::size_t idx : order) {
    if (!d.values_.empty() && d.values_.back() == values[idx]) {
      d.probs_.back() += probs[idx];
    } else {
      d.values_.push_back(values[idx]);
      d.probs_.push_back(probs[idx]);
    }
  }
  d.cum_ = build_cdf(d.probs_);
  return d;
}

double IncrementDistribution::cgf(double theta) const {
  if (theta == 0.0) return 0.0;
  double k = 0.0;
  switch (kind_) {
    case Kind::constant:
      k = theta * value_;
      break;
    case Kind::poisson:
      k = lambda_ * std::expm1(sign_ * theta) + theta * shift_;
      break;
    case Kind::finite_support: {
      // log sum p_i e^{theta v_i}, max-shifted for stability.
      double m = -std::numeric_limits<double>::infinity();
      for (double v : values_) m = std::max(m, theta * v);
      double s = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        s += probs_[i] * std::exp(theta * values_[i] - m);
      }
      k = m + std::log(s);
      break;
    }
  }
  if (!std::isfinite(k)) {
    throw std::domain_error("cgf: divergent at the requested theta");
  }
  return k;
}

double IncrementDistribution::mean() const {
  switch (kind_) {
    case Kind::constant:
      return value_;
    case Kind::poisson:
      return sign_ * lambda_ + shift_;
    case Kind::finite_support: {
      double m = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        m += probs_[i] * values_[i];
      }
      return m;
    }
  }
  return 0.0;
}

double IncrementDistribution::variance() const {
  switch (kind_) {
    case Kind::constant:
      return 0.0;
    case Kind::poisson:
      return lambda_;
    case Kind::finite_support: {
      const double m = mean();
      double v = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        v += probs_[i] * (values_[i] - m) * (values_[i] - m);
      }
      return v;
    }
  }
  return 0.0;
}

double IncrementDistribution::min_support() const {
  switch (kind_) {
    case Kind::constant:
      return value_;
    case Kind::poisson:
      return sign_ > 0.0 ? shift_
                         : -std::numeric_limits<double>::infinity();
    case Kind::finite_support:
      return values_.front();
  }
  return 0.0;
}

double IncrementDistribution::max_support() const {
  switch (kind_) {
    case Kind::constant:
      return value_;
    case Kind::poisson:
      return sign_ > 0.0 ? std::numeric_limits<double>::infinity() : shift_;
    case Kind::finite_support:
      return values_.back();
  }
  return 0.0;
}

double IncrementDistribution::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::constant:
      return value_;
    case Kind::poisson: {
      long n = 0;
      for (int c = 0; c < pois_chunks_; ++c) {
        n += poisson_knuth(rng, pois_limit_chunk_);
      }
      if (pois_limit_rem_ < 1.0) n += poisson_knuth(rng, pois_limit_rem_);
      return sign_ * static_cast<double>(n) + shift_;
    }
    case Kind::finite_support:
      return values_[sample_index(cum_, rng)];
  }
  return 0.0;
}

IncrementDistribution IncrementDistribution::shifted(double delta) const {
  IncrementDistribution d = *this;
  switch (kind_) {
    case Kind::constant:
      d.value_ += delta;
      break;
    case Kind::poisson:
      d.shift_ += delta;
      break;
    case Kind::finite_support: {
      for (double& v : d.values_) v += delta;
      break;
    }
  }
  return d;
}

IncrementDistribution IncrementDistribution::negated() const {
  IncrementDistribution d = *this;
  switch (kind_) {
    case Kind::constant:
      d.value_ = -d.value_;
      break;
    case Kind::poisson:
      d.sign_ = -d.sign_;
      d.shift_ = -d.shift_;
      break;
    case Kind::finite_support: {
      for (double& v : d.values_) v = -v;
      std::reverse(d.values_.begin(), d.values_.end());
      std::reverse(d.probs_.begin(), d.probs_.end());
      d.cum_ = build_cdf(d.probs_);
      break;
    }
  }
  return d;
}

IncrementDistribution IncrementDistribution::clipped_nonnegative() const {
  switch (kind_) {
    case Kind::constant:
      return constant(std::max(value_, 0.0));
    case Kind::poisson: {
      if (sign_ > 0.0 && shift_ >= 0.0) return *this;
      if (max_support() <= 0.0) return constant(0.0);
      throw std::domain_error(
          "clipped_nonnegative: shifted Poisson support straddles zero");
    }
    case Kind::finite_support: {
      std::vector<double> vals(values_);
      for (double& v : vals) v = std::max(v, 0.0);
      return finite_support(std::move(vals), probs_);
    }
  }
  return *this;
}

IncrementDistribution increment_difference(const IncrementDistribution& a,
                                           const IncrementDistribution& c) {
  if (c.kind() == IncrementDistribution::Kind::constant) {
    return a.shifted(-c.constant_value());
  }
  if (a.kind() == IncrementDistribution::Kind::constant) {
    return c.negated().shifted(a.constant_value());
  }
  if (a.kind() == IncrementDistribution::Kind::finite_support &&
      c.kind() == IncrementDistribution::Kind::finite_support) {
    // Exact convolution of a with -c.
    std::map<double, double> mass;
    for (std::size_t i = 0; i < a.support_values().size(); ++i) {
      for (std::size_t j = 0; j < c.support_values().size(); ++j) {
        mass[a.support_values()[i] - c.support_values()[j]] +=
            a.support_probs()[i] * c.support_probs()[j];
      }
    }
    std::vector<double> vals, probs;
    for (const auto& [v, p] : mass) {
      vals.push_back(v);
      probs.push_back(p);
    }
    return IncrementDistribution::finite_support(std::move(vals),
                                                 std::move(probs));
  }
  throw std::invalid_argument(
      "increment_difference: difference of these shapes has no closed form");
}

MapKernel::MapKernel(std::vector<std::vector<double>> transition,
                     std::vector<std::vector<IncrementDistribution>> increments)
    : transition_(std::move(transition)), increments_(std::move(increments)) {
  const std::size_t n = transition_.size();
  if (n == 0) throw std::invalid_argument("MapKernel: empty state space");
  if (increments_.size() != n) {
    throw std::invalid_argument("MapKernel: increment grid size mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (transition_[i].size() != n || increments_[i].size() != n) {
      throw std::invalid_argument("MapKernel: matrix must be square");
    }
    double row = 0.0;
    for (double p : transition_[i]) {
      if (p < 0.0) throw std::invalid_argument("MapKernel: negative entry");
      row += p;
    }
    if (std::abs(row - 1.0) > kProbTol) {
      throw std::invalid_argument("MapKernel: row must sum to 1");
    }
  }
  // Irreducibility: every state reachable from state 0 and vice versa.
  const auto reach = [&](bool forward) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        const double p = forward ? transition_[i][j] : transition_[j][i];
        if (p > 0.0 && !seen[j]) {
          seen[j] = true;
          stack.push_back(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  if (!reach(true) || !reach(false)) {
    throw std::invalid_argument("MapKernel: chain is reducible");
  }
}

std::vector<double> MapKernel::stationary() const {
  const std::size_t n = num_states();
  if (n == 1) return {1.0};
  // Solve varpi (P - I) = 0 with sum(varpi) = 1 by Gaussian elimination on
  // the transposed system; the last equation is replaced by normalization.
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i][j] = transition_[j][i] - (i == j ? 1.0 : 0.0);
    }
  }
  for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1.0;
  a[n - 1][n] = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    if (a[col][col] == 0.0) {
      throw std::runtime_error("stationary: singular system");
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k <= n; ++k) a[r][k] -= f * a[col][k];
    }
  }
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = a[i][n] / a[i][i];
  return pi;
}

double MapKernel::stationary_mean_increment() const {
  const std::vector<double> pi = stationary();
  double drift = 0.0;
  for (std::size_t i = 0; i < num_states(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < num_states(); ++j) {
      if (transition_[i][j] > 0.0) {
        row += transition_[i][j] * increments_[i][j].mean();
      }
    }
    drift += pi[i] * row;
  }
  return drift;
}

MapKernel MapKernel::shifted(double delta) const {
  auto inc = increments_;
  for (auto& row : inc) {
    for (auto& d : row) d = d.shifted(delta);
  }
  return MapKernel(transition_, std::move(inc));
}

MapKernel MapKernel::negated() const {
  auto inc = increments_;
  for (auto& row : inc) {
    for (auto& d : row) d = d.negated();
  }
  return MapKernel(transition_, std::move(inc));
}

MapKernel MapKernel::clipped_nonnegative() const {
  auto inc = increments_;
  for (auto& row : inc) {
    for (auto& d : row) d = d.clipped_nonnegative();
  }
  return MapKernel(transition_, std::move(inc));
}

std::vector<std::vector<double>> kernel_matrix(const MapKernel& kernel,
                                               double theta) {
  const std::size_t n = kernel.num_states();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double p = kernel.transition()[i][j];
      if (p == 0.0) continue;
      const double entry = p * std::exp(kernel.increment(i, j).cgf(theta));
      if (!std::isfinite(entry)) {
        throw std::domain_error("kernel_matrix: entry overflow");
      }
      m[i][j] = entry;
    }
  }
  return m;
}

EigenPair pf_eigenpair(const MapKernel& kernel, double theta) {
  const std::size_t n = kernel.num_states();
  if (n == 1) {
    // Scalar reduction: kappa(theta) = log p_00 + cgf(H_00, theta); with
    // p_00 = 1 this is the increment CGF exactly.
    const double kappa = std::log(kernel.transition()[0][0]) +
                         kernel.increment(0, 0).cgf(theta);
    return {theta, kappa, {1.0}, {1.0}};
  }

  const auto m = kernel_matrix(kernel, theta);
  // A strictly positive diagonal makes the kernel primitive, so plain power
  // iteration converges; otherwise shift by the max row sum to break
  // possible periodicity.
  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i][i] <= 0.0) {
      for (std::size_t r = 0; r < n; ++r) {
        double row = 0.0;
        for (double e : m[r]) row += e;
        shift = std::max(shift, row);
      }
      break;
    }
  }

  const auto apply = [&](const std::vector<std::vector<double>>& mat,
                         const std::vector<double>& x, bool transpose) {
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        y[i] += (transpose ? mat[j][i] : mat[i][j]) * x[j];
      }
      y[i] += shift * x[i];
    }
    return y;
  };

  const auto dominant = [&](bool transpose) {
    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    double rayleigh = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 100000; ++iter) {
      std::vector<double> y = apply(m, x, transpose);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        num += y[i] * x[i];
        den += x[i] * x[i];
      }
      const double r = num / den;
      double norm = 0.0;
      for (double v : y) norm = std::max(norm, std::abs(v));
      if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::runtime_error("pf_eigenpair: iteration broke down");
      }
      for (double& v : y) v /= norm;
      x.swap(y);
      if (iter > 0 && std::abs(r - rayleigh) <= 1e-12 * std::abs(r)) {
        rayleigh = r;
        converged = true;
        break;
      }
      rayleigh = r;
    }
    if (!converged) {
      throw std::runtime_error("pf_eigenpair: power iteration did not converge");
    }
    for (double& v : x) v = std::abs(v);
    return std::pair<double, std::vector<double>>(rayleigh - shift, x);
  };

  auto [eig, h] = dominant(false);
  if (!(eig > 0.0)) {
    throw std::runtime_error("pf_eigenpair: nonpositive dominant eigenvalue");
  }

  // Residual check, relative to the eigenvalue scale.
  double hmax = 0.0, resid = 0.0;
  {
    std::vector<double> mh(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) mh[i] += m[i][j] * h[j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      hmax = std::max(hmax, std::abs(h[i]));
      resid = std::max(resid, std::abs(mh[i] - eig * h[i]));
    }
  }
  if (resid > 1e-9 * eig * hmax) {
    throw std::runtime_error("pf_eigenpair: residual above tolerance");
  }

  auto [eig_l, v] = dominant(true);
  (void)eig_l;

  // Normalize: varpi . h = 1, then v . h = 1.
  const std::vector<double> pi = kernel.stationary();
  double pih = 0.0;
  for (std::size_t i = 0; i < n; ++i) pih += pi[i] * h[i];
  for (double& x : h) x /= pih;
  double vh = 0.0;
  for (std::size_t i = 0; i < n; ++i) vh += v[i] * h[i];
  for (double& x : v) x /= vh;

  for (double x : h) {
    if (!(x > 0.0)) {
      throw std::runtime_error("pf_eigenpair: eigenvector not positive");
    }
  }
  return {theta, std::log(eig), std::move(h), std::move(v)};
}

std::vector<double> sample_path(const IncrementDistribution& dist,
                                std::size_t t, Rng& rng) {
  std::vector<double> path(t);
  for (std::size_t i = 0; i < t; ++i) path[i] = dist.sample(rng);
  return path;
}

MapPath sample_path(const MapKernel& kernel, std::size_t initial_state,
                    std::size_t t, Rng& rng) {
  if (initial_state >= kernel.num_states()) {
    throw std::invalid_argument("sample_path: initial state out of range");
  }
  MapPath path;
  path.increments.resize(t);
  path.states.resize(t + 1);
  path.states[0] = initial_state;
  const std::size_t n = kernel.num_states();
  // Per-row transition CDFs.
  std::vector<std::vector<double>> cum(n);
  for (std::size_t i = 0; i < n; ++i) {
    cum[i].resize(n);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += kernel.transition()[i][j];
      cum[i][j] = acc;
    }
    cum[i].back() = 1.0;
  }
  std::size_t state = initial_state;
  for (std::size_t k = 0; k < t; ++k) {
    const double u = rng.uniform();
    std::size_t next = 0;
    while (next + 1 < n && u >= cum[state][next]) ++next;
    path.increments[k] = kernel.increment(state, next).sample(rng);
    state = next;
    path.states[k + 1] = state;
  }
  return path;
}

}  // namespace qperf
