#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include <qperf/bounds.hpp>

#include "oracles.hpp"

using namespace qperf;

namespace {

Scenario iid_scenario(Regime regime, IncrementDistribution a,
                      IncrementDistribution c, std::size_t t) {
  Scenario s;
  s.regime = regime;
  s.horizon = t;
  s.arrival = std::move(a);
  s.capacity = std::move(c);
  return s;
}

MapProcess one_state(const IncrementDistribution& d, std::size_t j0 = 0) {
  return MapProcess{MapKernel({{1.0}}, {{d}}), j0};
}

MapKernel bursty_kernel() {
  return MapKernel({{0.9, 0.1}, {0.2, 0.8}},
                   {{IncrementDistribution::constant(1.0),
                     IncrementDistribution::constant(1.0)},
                    {IncrementDistribution::constant(4.0),
                     IncrementDistribution::constant(4.0)}});
}

}  // namespace

TEST_CASE("classical backlog tail: anchors and oracle instance") {
  // equal constants: every window term is e^{-theta x}
  const auto s = iid_scenario(Regime::classical,
                              IncrementDistribution::constant(1.5),
                              IncrementDistribution::constant(1.5), 16);
  const double v = classical_backlog_tail_general(s, 3.0, 2.0);
  CHECK(v == doctest::Approx(std::min(1.0, 17.0 * std::exp(-6.0)))
                 .epsilon(1e-12));
  // x = 0: Chernoff sum of nonnegative terms, reported vacuous
  CHECK(classical_backlog_tail_general(s, 0.0, 1.0) == 1.0);

  // Poisson(1) arrivals, C = 2, t = 16, x = 10, theta = 1: term-by-term
  // oracle with the series CGF.
  const auto sp = iid_scenario(Regime::classical,
                               IncrementDistribution::poisson(1.0),
                               IncrementDistribution::constant(2.0), 16);
  const double ka = oracle::poisson_cgf_series(1.0, 1.0);
  double sum = 0.0;
  for (int sidx = 0; sidx <= 16; ++sidx) {
    const double window = 16.0 - sidx;
    sum += std::exp(window * (ka - 2.0) - 10.0);
  }
  CHECK(classical_backlog_tail_general(sp, 10.0, 1.0) ==
        doctest::Approx(std::min(1.0, sum)).epsilon(1e-10));
}

TEST_CASE("classical delay tail: vacuous anchor, oracle, monotonicity") {
  const auto eq = iid_scenario(Regime::classical,
                               IncrementDistribution::constant(2.0),
                               IncrementDistribution::constant(2.0), 12);
  // deterministic equal arrival and capacity, theta -> 0+: vacuous 1
  CHECK(classical_delay_tail_general(eq, 12, 1e-9, 2.0) == 1.0);

  const auto sp = iid_scenario(Regime::classical,
                               IncrementDistribution::poisson(1.0),
                               IncrementDistribution::constant(2.0), 12);
  // p = q = 2 against a direct summation oracle
  const double theta = 0.5, p = 2.0, q = 2.0;
  const double ka_p = oracle::poisson_cgf_series(1.0, theta * p);
  const double ka_negq = oracle::poisson_cgf_series(1.0, -theta * q);
  const std::size_t d = 4;
  double sum = 0.0;
  for (int sidx = 0; sidx <= 12; ++sidx) {
    const double window = 12.0 - sidx;
    sum += std::exp(window * (ka_p + (-theta * p) * 2.0) / p) *
           std::exp(static_cast<double>(d) * ka_negq / q);
  }
  CHECK(classical_delay_tail_general(sp, d, theta, p) ==
        doctest::Approx(std::min(1.0, sum)).epsilon(1e-10));

  // nonincreasing in d at fixed theta, p
  double prev = 2.0;
  for (std::size_t dd : {0, 2, 4, 6, 8, 10, 12}) {
    const double v = classical_delay_tail_general(sp, dd, 0.8, 2.0);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("classical throughput tail: anchors and endpoint minimum") {
  const auto sp = iid_scenario(Regime::classical,
                               IncrementDistribution::poisson(1.0),
                               IncrementDistribution::constant(2.0), 10);
  CHECK(classical_throughput_tail_general(sp, 0.0, 0.7) == 1.0);

  // constants: term(s) = e^{theta(s lam + (t-s) C) - theta x}, minimized at
  // an s-extreme depending on sign(lam - C)
  const auto cc = iid_scenario(Regime::classical,
                               IncrementDistribution::constant(1.0),
                               IncrementDistribution::constant(2.0), 10);
  const double th = 0.4, x = 25.0;
  CHECK(classical_throughput_tail_general(cc, x, th) ==
        doctest::Approx(std::exp(th * 10.0 * 1.0 - th * x)).epsilon(1e-12));

  // brute minimum over s with the series CGF
  const double ka = oracle::poisson_cgf_series(1.0, th);
  double best = 1e300;
  for (int sidx = 0; sidx <= 10; ++sidx) {
    best = std::min(best, std::exp(sidx * ka + (10.0 - sidx) * th * 2.0 -
                                   th * x));
  }
  CHECK(classical_throughput_tail_general(sp, x, th) ==
        doctest::Approx(std::min(1.0, best)).epsilon(1e-10));
}

TEST_CASE("lundberg root: golden values, errors, uniqueness") {
  // Poisson(1) arrivals against C = 2: root of e^theta - 1 = 2 theta
  const auto inc =
      increment_difference(IncrementDistribution::poisson(1.0),
                           IncrementDistribution::constant(2.0));
  const double root = lundberg_root(inc);
  CHECK(root == doctest::Approx(1.2564312086261697).epsilon(1e-9));
  CHECK(std::abs(inc.cgf(root)) < 1e-10);

  // {-1 w.p. 3/4, +1 w.p. 1/4}: quadratic in e^theta gives e^theta = 3
  const auto fs =
      IncrementDistribution::finite_support({-1, 1}, {0.75, 0.25});
  const double root_fs = lundberg_root(fs);
  CHECK(root_fs == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  CHECK(std::abs(fs.cgf(root_fs)) < 1e-10);

  // exactly one sign change on the searched bracket
  int changes = 0;
  double prev = fs.cgf(1e-6);
  for (double th = 1e-6; th <= 4.0; th += 0.001) {
    const double v = fs.cgf(th);
    if ((prev < 0.0) != (v < 0.0)) ++changes;
    prev = v;
  }
  CHECK(changes == 1);

  // zero drift is rejected
  CHECK_THROWS_AS(
      lundberg_root(increment_difference(IncrementDistribution::poisson(2.0),
                                         IncrementDistribution::constant(2.0))),
      std::domain_error);
  // a.s. nonpositive increment: tail is identically zero
  CHECK_THROWS_AS(lundberg_root(IncrementDistribution::constant(-1.0)),
                  std::runtime_error);
}

TEST_CASE("steady-state bound: delay equals backlog at x = C d") {
  const auto s = iid_scenario(Regime::classical,
                              IncrementDistribution::poisson(1.0),
                              IncrementDistribution::constant(2.0), 100);
  const SteadyStateBound b = classical_steady_bound(s);
  CHECK(b.prefactor == 1.0);
  CHECK(b.decay_rate == 2.0);
  for (double d : {1.0, 3.0, 7.5}) {
    CHECK(b.delay_tail(d) == b.backlog_tail(2.0 * d));
  }

  // constant arrival against i.i.d. capacity uses the mirrored increment
  const auto s2 = iid_scenario(
      Regime::classical, IncrementDistribution::constant(1.0),
      IncrementDistribution::finite_support({0, 2}, {0.25, 0.75}), 100);
  const SteadyStateBound b2 = classical_steady_bound(s2);
  const auto inc2 =
      increment_difference(IncrementDistribution::constant(1.0),
                           IncrementDistribution::finite_support(
                               {0, 2}, {0.25, 0.75}));
  CHECK(std::abs(inc2.cgf(b2.theta_star)) < 1e-10);
  CHECK(b2.decay_rate == 1.0);
}

TEST_CASE("markov lundberg: root via eigen-oracle and one-state reduction") {
  // increments {1,4} against constant capacity 3
  const MapKernel inc = bursty_kernel().shifted(-3.0);
  const SteadyStateBound b = map_lundberg_bounds(inc, 0, 3.0);
  CHECK(std::abs(pf_eigenpair(inc, b.theta_star).kappa) < 1e-10);
  CHECK(b.prefactor >= 1.0);

  // one-state kernel reduces exactly to the scalar root with prefactor 1
  const auto fs =
      IncrementDistribution::finite_support({-1, 1}, {0.75, 0.25});
  const SteadyStateBound b1 =
      map_lundberg_bounds(MapKernel({{1.0}}, {{fs}}), 0, 2.0);
  CHECK(b1.prefactor == 1.0);
  CHECK(b1.theta_star == doctest::Approx(lundberg_root(fs)).epsilon(1e-12));

  // x = 0: bound equals the prefactor, clamped to 1
  CHECK(b.backlog_tail(0.0) == 1.0);
}

TEST_CASE("map throughput bound: reduction and moment-oracle sandwich") {
  const auto p2 = IncrementDistribution::poisson(2.0);
  const auto one = one_state(p2);
  const auto s = iid_scenario(Regime::classical, p2,
                              IncrementDistribution::constant(3.0), 24);
  for (double th : {0.2, 0.8}) {
    for (double x : {30.0, 60.0, 90.0}) {
      CHECK(map_throughput_bound(one, 3.0, 24, x, th) ==
            doctest::Approx(classical_throughput_tail_general(s, x, th))
                .epsilon(1e-12));
    }
  }
  CHECK(map_throughput_bound(one, 3.0, 24, 0.0, 0.5) == 1.0);

  // two-state kernel: bound sits between the exact-moment minimum and the
  // eigenvector-ratio inflation of it
  const MapKernel k = bursty_kernel();
  const MapProcess mp{k, 0};
  const double th = 0.3, c = 3.0, x = 80.0;
  const std::size_t t = 16;
  const auto m = kernel_matrix(k, th);
  double exact_min = 1e300;
  for (std::size_t sidx = 0; sidx <= t; ++sidx) {
    const double log_e =
        sidx == 0 ? 0.0 : oracle::log_moment(m, sidx, 0);
    exact_min = std::min(
        exact_min, std::exp(log_e + th * static_cast<double>(t - sidx) * c -
                            th * x));
  }
  const EigenPair e = pf_eigenpair(k, th);
  const double ratio = *std::max_element(e.h.begin(), e.h.end()) /
                       *std::min_element(e.h.begin(), e.h.end());
  const double bound = map_throughput_bound(mp, c, t, x, th);
  CHECK(bound >= exact_min * (1.0 - 1e-12));
  CHECK(bound <= exact_min * ratio * (1.0 + 1e-12));
}

TEST_CASE("quantum transient tails: anchors and oracle instance") {
  // arrival and clipped capacity equal constants: tail vanishes at large
  // theta for x > 0
  const auto eq = iid_scenario(Regime::quantum,
                               IncrementDistribution::constant(2.0),
                               IncrementDistribution::constant(2.0), 8);
  CHECK(quantum_backlog_tail_general(eq, 1.0, 40.0) ==
        doctest::Approx(std::exp(-40.0)).epsilon(1e-12));

  // x below the support floor: vacuous 1 (the bound stays valid for x < 0)
  const auto zero_arrivals = iid_scenario(
      Regime::quantum, IncrementDistribution::constant(0.0),
      IncrementDistribution::constant(2.0), 8);
  CHECK(quantum_backlog_tail_general(zero_arrivals, -17.0 - 1.0, 0.5) == 1.0);

  // Poisson(2) arrivals, constant capacity, t = 8, x = 5, theta = 0.7
  const double qcap = 2.17447;
  const auto sp = iid_scenario(Regime::quantum,
                               IncrementDistribution::poisson(2.0),
                               IncrementDistribution::constant(qcap), 8);
  const double ka = oracle::poisson_cgf_series(2.0, 0.7);
  const double expected =
      std::exp(8.0 * ka + 8.0 * (-0.7 * qcap) - 0.7 * 5.0);
  CHECK(quantum_backlog_tail_general(sp, 5.0, 0.7) ==
        doctest::Approx(std::min(1.0, expected)).epsilon(1e-10));

  // delay: vacuous at d = t as theta -> 0+, p = 2 instance vs oracle,
  // nonincreasing in d
  CHECK(quantum_delay_tail_general(sp, 8, 1e-9, 2.0) == 1.0);
  const double kap = oracle::poisson_cgf_series(2.0, 0.7 * 2.0);
  const double kanq = oracle::poisson_cgf_series(2.0, -0.7 * 2.0);
  const double dexp =
      std::exp((8.0 * kap + 8.0 * (-1.4 * qcap)) / 2.0 + 3.0 * kanq / 2.0);
  CHECK(quantum_delay_tail_general(sp, 3, 0.7, 2.0) ==
        doctest::Approx(std::min(1.0, dexp)).epsilon(1e-10));
  double prev = 2.0;
  for (std::size_t d : {0, 2, 4, 6, 8}) {
    const double v = quantum_delay_tail_general(sp, d, 0.5, 2.0);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }

  // throughput: x = 0 vacuous; doubled argument in the exponent vs oracle
  CHECK(quantum_throughput_tail_general(sp, 0.0, 0.4) == 1.0);
  const double ka4 = oracle::poisson_cgf_series(2.0, 0.4);
  const double texp = std::exp(8.0 * (0.4 * qcap) + 8.0 * ka4 - 0.8 * 40.0);
  CHECK(quantum_throughput_tail_general(sp, 40.0, 0.4) ==
        doctest::Approx(std::min(1.0, texp)).epsilon(1e-10));

  // negative raw capacity is clipped before the CGF
  const auto neg = iid_scenario(
      Regime::quantum, IncrementDistribution::poisson(1.0),
      IncrementDistribution::finite_support({-2, 1}, {0.5, 0.5}), 8);
  const double kq_clip =
      oracle::finite_cgf_direct({0, 1}, {0.5, 0.5}, -0.6);
  const double ka6 = oracle::poisson_cgf_series(1.0, 0.6);
  CHECK(quantum_backlog_tail_general(neg, 2.0, 0.6) ==
        doctest::Approx(std::min(1.0, std::exp(8.0 * ka6 + 8.0 * kq_clip -
                                               0.6 * 2.0)))
            .epsilon(1e-10));
}

TEST_CASE("quantum iid bands: anchors and the zero-argument identity") {
  const auto sp = iid_scenario(Regime::quantum,
                               IncrementDistribution::poisson(2.0),
                               IncrementDistribution::constant(2.0), 50);

  // far above the reachable support: both sides certify probability one
  const Band far = quantum_iid_backlog_band(sp, 1e6, 1.0, 1.0);
  CHECK(far.upper == 1.0);
  CHECK(far.lower > 0.999);

  // at the center the band collapses to the vacuous (0, 1)
  const Band center = quantum_iid_backlog_band(sp, 0.0, 0.3, 0.3);
  CHECK(center.lower == 0.0);
  CHECK(center.upper == 1.0);
  CHECK(center.lower_vacuous);
  CHECK(center.upper_vacuous);

  // delay band at d = 0 equals the backlog band at x = 0 exactly
  for (double th : {0.2, 0.7, 1.9}) {
    const Band delay0 = quantum_iid_delay_band(sp, 0, th, th);
    const Band backlog0 = quantum_iid_backlog_band(sp, 0.0, th, th);
    CHECK(delay0.lower == backlog0.lower);
    CHECK(delay0.upper == backlog0.upper);
  }

  // delay band: lower -> 1 for d = t under stable drift as t grows
  const auto stable = iid_scenario(Regime::quantum,
                                   IncrementDistribution::poisson(1.0),
                                   IncrementDistribution::constant(2.0), 400);
  const Band dt = quantum_iid_delay_band(stable, 400, 0.5, 0.5);
  CHECK(dt.upper == 1.0);
  CHECK(dt.lower > 0.999);

  // throughput band: clamped sub-terms keep the lower side usable at large x
  const Band thr = quantum_iid_throughput_band(stable, 1e5, 0.9, 0.9);
  CHECK(thr.lower > 0.999);
  CHECK(thr.upper == 1.0);
  const Band thr0 = quantum_iid_throughput_band(stable, 0.0, 0.9, 0.9);
  CHECK(thr0.lower == 0.0);
}

TEST_CASE("reduction: one-state Markov bands equal iid bands") {
  std::mt19937_64 gen(31337);
  std::uniform_real_distribution<double> ux(-30.0, 90.0);
  std::uniform_real_distribution<double> uth(1e-3, 2.0);

  const auto arrivals = IncrementDistribution::poisson(2.0);
  const auto capacity =
      IncrementDistribution::finite_support({-1, 2, 3}, {0.25, 0.5, 0.25});
  const std::size_t t = 50;
  const auto scn = iid_scenario(Regime::quantum, arrivals, capacity, t);
  const MapProcess ma = one_state(arrivals);
  const MapProcess mc = one_state(capacity);

  for (int i = 0; i < 100; ++i) {
    const double x = ux(gen);
    const double th1 = uth(gen), th2 = uth(gen);
    const Band iid = quantum_iid_backlog_band(scn, x, th1, th2);
    const Band map = quantum_map_backlog_band(ma, mc, t, x, th1, th2);
    CHECK(std::abs(iid.lower - map.lower) <= 1e-12);
    CHECK(std::abs(iid.upper - map.upper) <= 1e-12);

    const auto d = static_cast<std::size_t>(i % (t + 1));
    const Band iid_d = quantum_iid_delay_band(scn, d, th1, th2);
    const Band map_d = quantum_map_delay_band(ma, mc, t, d, th1, th2);
    CHECK(std::abs(iid_d.lower - map_d.lower) <= 1e-12);
    CHECK(std::abs(iid_d.upper - map_d.upper) <= 1e-12);

    const Band iid_t = quantum_iid_throughput_band(scn, x + 60.0, th1, th2);
    const Band map_t =
        quantum_map_throughput_band(ma, mc, t, x + 60.0, th1, th2);
    CHECK(std::abs(iid_t.lower - map_t.lower) <= 1e-12);
    CHECK(std::abs(iid_t.upper - map_t.upper) <= 1e-12);
  }
}

TEST_CASE("reduction: one-state constant-side bands equal iid bands") {
  std::mt19937_64 gen(90210);
  std::uniform_real_distribution<double> ux(-30.0, 60.0);
  std::uniform_real_distribution<double> uth(1e-3, 2.0);

  const auto arrivals = IncrementDistribution::poisson(2.0);
  const double qcap = 2.1752549000523902;
  const std::size_t t = 50;
  const auto scn = iid_scenario(Regime::quantum, arrivals,
                                IncrementDistribution::constant(qcap), t);
  const MapProcess ma = one_state(arrivals);

  // variant 1: Markov arrival, constant capacity
  for (int i = 0; i < 100; ++i) {
    const double x = ux(gen);
    const double th1 = uth(gen), th2 = uth(gen);
    const Band iid = quantum_iid_backlog_band(scn, x, th1, th2);
    const Band map = quantum_map_constant_backlog_band(ma, qcap, t, x, th1, th2);
    CHECK(std::abs(iid.lower - map.lower) <= 1e-12);
    CHECK(std::abs(iid.upper - map.upper) <= 1e-12);

    const auto d = static_cast<std::size_t>(i % (t + 1));
    const Band iid_d = quantum_iid_delay_band(scn, d, th1, th2);
    const Band map_d =
        quantum_map_constant_delay_band(ma, qcap, t, d, th1, th2);
    CHECK(std::abs(iid_d.lower - map_d.lower) <= 1e-12);
    CHECK(std::abs(iid_d.upper - map_d.upper) <= 1e-12);
  }

  // variant 2: constant arrival, Markov capacity
  const auto cap_dist =
      IncrementDistribution::finite_support({-1, 2, 4}, {0.2, 0.5, 0.3});
  const double lambda = 1.5;
  const auto scn2 = iid_scenario(Regime::quantum,
                                 IncrementDistribution::constant(lambda),
                                 cap_dist, t);
  const MapProcess mc = one_state(cap_dist);
  for (int i = 0; i < 100; ++i) {
    const double x = ux(gen);
    const double th1 = uth(gen), th2 = uth(gen);
    const Band iid = quantum_iid_backlog_band(scn2, x, th1, th2);
    const Band map =
        quantum_map_constant_backlog_band(lambda, mc, t, x, th1, th2);
    CHECK(std::abs(iid.lower - map.lower) <= 1e-12);
    CHECK(std::abs(iid.upper - map.upper) <= 1e-12);

    const auto d = static_cast<std::size_t>(i % (t + 1));
    const Band iid_d = quantum_iid_delay_band(scn2, d, th1, th2);
    const Band map_d =
        quantum_map_constant_delay_band(lambda, mc, t, d, th1, th2);
    CHECK(std::abs(iid_d.lower - map_d.lower) <= 1e-12);
    CHECK(std::abs(iid_d.upper - map_d.upper) <= 1e-12);
  }
}

TEST_CASE("markov bands respect exact matrix-power moments") {
  const MapKernel ka = bursty_kernel();
  const MapKernel kq =
      MapKernel({{0.6, 0.4}, {0.3, 0.7}},
                {{IncrementDistribution::finite_support({-1, 3}, {0.5, 0.5}),
                  IncrementDistribution::constant(2.0)},
                 {IncrementDistribution::constant(0.0),
                  IncrementDistribution::finite_support({2, 5}, {0.5, 0.5})}});
  const MapProcess a{ka, 0};
  const MapProcess q{kq, 1};
  const std::size_t t = 64;

  const MapKernel neg_clip = kq.clipped_nonnegative().negated();
  for (double th : {0.2, 0.6}) {
    for (double x : {-40.0, -10.0, 15.0, 60.0}) {
      const Band band = quantum_map_backlog_band(a, q, t, x, th, th);
      // Exact Chernoff values from matrix powers must lie inside the band's
      // guarantees: band.upper >= exact upper bound on the CDF evaluated with
      // true moments cannot be asserted directly, but the true CDF bound
      // built from exact moments is dominated by the band expression.
      const double exact_up =
          std::exp(oracle::log_moment(kernel_matrix(ka, -th), t, 0) +
                   oracle::log_moment(kernel_matrix(neg_clip, -th), t, 1) +
                   th * x);
      const double exact_lo =
          1.0 - std::exp(oracle::log_moment(kernel_matrix(ka, th), t, 0) +
                         oracle::log_moment(kernel_matrix(neg_clip, th), t, 1) -
                         th * x);
      CHECK(band.upper >= std::min(1.0, exact_up) - 1e-12);
      CHECK(band.lower <= std::max(0.0, exact_lo) + 1e-12);
    }
  }
}

TEST_CASE("optimize_theta: endpoints, convex case, constant case") {
  const ThetaGrid grid{1e-4, 50.0, 200};

  // monotone decreasing: the optimizer pushes to the right endpoint
  const ThetaOpt mono = optimize_theta(
      [](double th) { return std::exp(-th); }, grid, OptimizeSense::minimize);
  CHECK(mono.theta == doctest::Approx(50.0).epsilon(1e-4));

  // strictly convex with an interior minimum at theta = 2, value from a
  // dense-grid oracle
  const auto convex = [](double th) { return (th - 2.0) * (th - 2.0) + 0.25; };
  const ThetaOpt opt = optimize_theta(convex, grid, OptimizeSense::minimize);
  double dense_best = 1e300;
  for (int i = 0; i <= 200000; ++i) {
    dense_best = std::min(dense_best, convex(1e-4 + i * (50.0 - 1e-4) / 200000));
  }
  CHECK(opt.value <= dense_best + 1e-6);
  CHECK(opt.theta == doctest::Approx(2.0).epsilon(1e-4));

  // constant bound: any grid point, value unchanged
  const ThetaOpt flat = optimize_theta([](double) { return 0.5; }, grid,
                                       OptimizeSense::minimize);
  CHECK(flat.value == 0.5);

  CHECK_THROWS_AS(
      optimize_theta(
          [](double) { return std::numeric_limits<double>::quiet_NaN(); },
          grid, OptimizeSense::minimize),
      std::domain_error);
}
