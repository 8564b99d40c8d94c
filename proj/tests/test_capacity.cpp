#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include <qperf/capacity.hpp>

using namespace qperf;

TEST_CASE("g function: anchors and domain") {
  CHECK(g_function(0.0) == 0.0);
  CHECK(g_function(1.0) == doctest::Approx(2.0).epsilon(1e-14));
  // 4 log2 4 - 3 log2 3
  CHECK(g_function(3.0) ==
        doctest::Approx(3.2451124978365315).epsilon(1e-13));
  CHECK_THROWS_AS(g_function(-1e-9), std::domain_error);
}

TEST_CASE("g function: strictly increasing and concave") {
  const double h = 1e-4;
  double prev_slope = std::numeric_limits<double>::infinity();
  for (double x = 0.05; x < 20.0; x += 0.25) {
    const double slope = (g_function(x + h) - g_function(x - h)) / (2 * h);
    CHECK(slope > 0.0);
    CHECK(slope < prev_slope);  // decreasing slope = concavity
    prev_slope = slope;
  }
}

TEST_CASE("binary entropy: anchors, symmetry, domain") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.25) ==
        doctest::Approx(0.8112781244591328).epsilon(1e-13));
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(gen);
    CHECK(std::abs(binary_entropy(x) - binary_entropy(1.0 - x)) <= 1e-12);
  }
  CHECK_THROWS_AS(binary_entropy(-0.01), std::domain_error);
  CHECK_THROWS_AS(binary_entropy(1.01), std::domain_error);
}

TEST_CASE("broadband lossy capacity") {
  const double pr = 3.0 / 3.141592653589793;
  CHECK(broadband_lossy_capacity({0.0, 123.0}) == 0.0);
  CHECK(broadband_lossy_capacity({1.0, pr}) ==
        doctest::Approx(1.4426950408889634).epsilon(1e-13));
  CHECK(broadband_lossy_capacity({0.25, pr}) ==
        doctest::Approx(0.7213475204444817).epsilon(1e-13));
  // sqrt(eta) scaling identity
  for (double eta : {0.1, 0.33, 0.5, 0.9}) {
    for (double p : {0.5, 2.0, 7.0}) {
      CHECK(std::abs(broadband_lossy_capacity({eta, p}) -
                     std::sqrt(eta) * broadband_lossy_capacity({1.0, p})) <=
            1e-12 * broadband_lossy_capacity({1.0, p}));
    }
  }
  // monotone in both parameters
  CHECK(broadband_lossy_capacity({0.5, 2.0}) <
        broadband_lossy_capacity({0.6, 2.0}));
  CHECK(broadband_lossy_capacity({0.5, 2.0}) <
        broadband_lossy_capacity({0.5, 2.5}));
  CHECK_THROWS_AS(broadband_lossy_capacity({1.5, 1.0}), std::domain_error);
}

TEST_CASE("free-space capacity: golden values and monotonicity") {
  // omega_c = 2 pi, P/P0 = 1; golden values from the quadrature + bisection
  // oracle at 1e-8.
  const FreeSpaceSpec spec{2.0 * 3.141592653589793, 1.0};
  CHECK(freespace_mode_parameter(spec) ==
        doctest::Approx(2.0239812858747315).epsilon(1e-8));
  CHECK(freespace_capacity(spec) ==
        doctest::Approx(1.3589519171798458).epsilon(1e-8));

  // vanishing power => vanishing capacity
  CHECK(freespace_capacity({2.0 * 3.141592653589793, 1e-6}) < 1e-3);

  // strictly increasing in the power ratio at fixed omega_c
  double prev = 0.0;
  for (double p : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double c = freespace_capacity({1.0, p});
    CHECK(c > prev);
    prev = c;
  }
  CHECK_THROWS_AS(freespace_capacity({1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(freespace_capacity({1.0, -1.0}), std::domain_error);
}

TEST_CASE("attenuation capacity: anchors, sign, errors") {
  const double ln2 = 0.6931471805599453;
  // eta = 1/2: zero capacity
  CHECK(attenuation_quantum_capacity(ln2 * 50.0, 50.0) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // eta = 2/3: exactly one qubit per use
  CHECK(attenuation_quantum_capacity(std::log(1.5) * 50.0, 50.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // Reference scenario l = 10, l_a = 50 against the long-double oracle.
  const long double ref =
      (-0.2L) / 0.693147180559945309417L -
      std::log(-std::expm1(-0.2L)) / 0.693147180559945309417L;
  CHECK(std::abs(attenuation_quantum_capacity(10.0, 50.0) -
                 static_cast<double>(ref)) < 1e-9);
  CHECK(attenuation_quantum_capacity(10.0, 50.0) ==
        doctest::Approx(2.1752549000523902).epsilon(1e-12));

  // sign: positive above eta = 1/2, negative below
  CHECK(attenuation_quantum_capacity(0.5 * ln2 * 50.0, 50.0) > 0.0);
  CHECK(attenuation_quantum_capacity(2.0 * ln2 * 50.0, 50.0) < 0.0);
  // usable mode clips the negative branch
  CHECK(attenuation_quantum_capacity(2.0 * ln2 * 50.0, 50.0,
                                     CapacityMode::usable) == 0.0);

  CHECK_THROWS_AS(attenuation_quantum_capacity(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(attenuation_quantum_capacity(1.0, -2.0), std::domain_error);
  CHECK_THROWS_AS(attenuation_quantum_capacity(0.0, 50.0), std::domain_error);
  CHECK_THROWS_AS(attenuation_quantum_capacity(1e6, 1.0), std::domain_error);
}

TEST_CASE("qubit channel capacity: anchors and maximizer quality") {
  const double pi = 3.141592653589793;
  CHECK(qubit_channel_capacity(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(qubit_channel_capacity(pi / 2.0, 0.0) == 0.0);

  // Dephasing point alpha = beta = pi/8; golden value from the dense-grid
  // oracle: 1 - h(sin^2(pi/8)).
  const QubitCapacityResult r = qubit_channel_capacity_detail(pi / 8, pi / 8);
  CHECK(r.value == doctest::Approx(0.3991239633071439).epsilon(1e-9));

  // The returned p* must match a dense grid search to 1e-9 in value.
  const double ca2 = std::cos(pi / 8) * std::cos(pi / 8);
  const double sa2 = std::sin(pi / 8) * std::sin(pi / 8);
  const double sb2 = sa2;
  double grid_best = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double p = i / 10000.0;
    const double v = binary_entropy(p * ca2 + (1 - p) * sb2) -
                     binary_entropy(p * sa2 + (1 - p) * sb2);
    grid_best = std::max(grid_best, v);
  }
  CHECK(r.value >= grid_best - 1e-9);

  // A couple of generic angle pairs: result beats its own dense grid.
  for (auto [a, b] : {std::pair{0.3, 0.1}, std::pair{0.2, 0.55}}) {
    const QubitCapacityResult d = qubit_channel_capacity_detail(a, b);
    const double cb2 = std::sin(b) * std::sin(b);
    const double caa = std::cos(a) * std::cos(a);
    const double saa = std::sin(a) * std::sin(a);
    double best = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double p = i / 10000.0;
      best = std::max(best, binary_entropy(p * caa + (1 - p) * cb2) -
                                binary_entropy(p * saa + (1 - p) * cb2));
    }
    CHECK(d.value >= best - 1e-9);
    CHECK(d.value >= 0.0);
    CHECK(d.value <= 1.0);
  }
}

TEST_CASE("cumulative capacity: additivity and ranges") {
  CapacitySequence seq;
  seq.unit = CapacityUnit::qubits;
  // constant sequence
  seq.values.assign(12, 1.75);
  CHECK(cumulative_capacity(seq, 0, 11) ==
        doctest::Approx(12 * 1.75).epsilon(1e-14));
  CHECK(cumulative_capacity(seq, 4, 4) == 1.75);

  // random dyadic sequence: split additivity is exact in floating point
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> num(-2048, 2048);
  seq.values.clear();
  for (int i = 0; i < 64; ++i) {
    seq.values.push_back(static_cast<double>(num(gen)) / 1024.0);
  }
  std::uniform_int_distribution<std::size_t> idx(0, 63);
  for (int rep = 0; rep < 200; ++rep) {
    std::size_t m = idx(gen), n = idx(gen);
    if (m > n) std::swap(m, n);
    const std::size_t k = m + (n - m) / 2;
    if (k + 1 > n) continue;
    CHECK(cumulative_capacity(seq, m, n) ==
          cumulative_capacity(seq, m, k) + cumulative_capacity(seq, k + 1, n));
  }
  CHECK(cumulative_capacity(seq, 0, 9) ==
        cumulative_capacity(seq, 0, 4) + cumulative_capacity(seq, 5, 9));

  CHECK_THROWS_AS(cumulative_capacity(seq, 5, 4), std::out_of_range);
  CHECK_THROWS_AS(cumulative_capacity(seq, 0, 64), std::out_of_range);
}
