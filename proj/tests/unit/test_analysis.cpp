#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sinrnet/analysis.hpp"
#include "sinrnet/harness.hpp"

using namespace sinrnet;

namespace {

Node at(NodeId id, double x, double y, double power) { return {id, {x, y}, power, 0, std::nullopt}; }

NetworkParams with_delta(double delta) {
  NetworkParams p;
  p.delta = delta;
  return p;
}

}  // namespace

TEST_CASE("gamma bound values") {
  CHECK(gamma_bound(with_delta(2), 1.0, 1) == doctest::Approx(1.0 / 120).epsilon(1e-12));
  CHECK(gamma_bound(with_delta(2), 1.0, 2) == doctest::Approx(1.0 / 150).epsilon(1e-12));
  CHECK(gamma_bound(with_delta(5), 1.0, 1) == doctest::Approx(1.0 / 120).epsilon(1e-12));
  CHECK(gamma_bound(with_delta(1.5), 1.0, 1) == doctest::Approx(0.5 / 120).epsilon(1e-12));
  CHECK_THROWS_AS(gamma_bound(with_delta(2), 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(gamma_bound(with_delta(2), 0.5, 4), std::invalid_argument);
}

TEST_CASE("gamma bound against summation oracle and monotonicity") {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> a(2.1, 6.0);
  std::uniform_real_distribution<double> d(1.01, 4.0);
  std::uniform_real_distribution<double> gr(1.0, 4.0);
  std::uniform_int_distribution<std::size_t> n(1, 300);
  for (int i = 0; i < 300; ++i) {
    NetworkParams p;
    p.alpha_true = p.alpha_lo = p.alpha_hi = a(g);
    p.delta = d(g);
    const double big = gr(g);
    const std::size_t size = n(g);
    const double value = gamma_bound(p, big, size);
    CHECK(value == doctest::Approx(oracle::gamma(p, big, size)).epsilon(1e-12));
    CHECK(gamma_bound(p, big, size + 1) < value);
    CHECK(gamma_bound(p, big * 1.1, size) < value);
    NetworkParams steeper = p;
    steeper.alpha_hi += 0.5;
    steeper.alpha_true = steeper.alpha_lo = steeper.alpha_hi;
    if (size > 1) {
      CHECK(gamma_bound(steeper, big, size) > value);
    } else {
      CHECK(gamma_bound(steeper, big, size) == doctest::Approx(value));
    }
  }
}

TEST_CASE("probability of a quiet proximity region") {
  const Network net = Network::build({at(0, 0, 0, 2), at(1, 0.5, 0, 2), at(2, 0, 0.5, 2)}, {});
  CHECK(prob_no_proximity_transmission(net, ProbabilityAssignment::uniform(3, 0.0), 0) == 1.0);
  CHECK(prob_no_proximity_transmission(net, ProbabilityAssignment::uniform(3, 0.5), 0) ==
        doctest::Approx(0.25));
  CHECK_THROWS_AS(ProbabilityAssignment({0.2, 1.5}), std::invalid_argument);
}

TEST_CASE("out-of-proximity interference") {
  SUBCASE("nothing outside proximity") {
    const Network net = Network::build({at(0, 0, 0, 2), at(1, 0.5, 0, 2)}, {});
    CHECK(expected_out_of_proximity_interference(net, ProbabilityAssignment::uniform(2, 0.5), 0, 3.0) ==
          0.0);
  }
  SUBCASE("single far node") {
    NetworkParams p;
    p.noise_hi = 1000.0;  // R̄ = 0.25 so the node at distance 2 is outside 3R̄
    const Network net = Network::build({at(0, 0, 0, 1), at(1, 2, 0, 16)}, p);
    REQUIRE_FALSE(ring_index(net, 0, 1).proximity);
    const ProbabilityAssignment probs({0.0, 0.5});
    CHECK(out_of_proximity_interference_at(net, probs, 0, {0, 0}, 2.0) == doctest::Approx(2.0));
    CHECK(expected_out_of_proximity_interference(net, probs, 0, 2.0) >= 2.0);
  }
}

TEST_CASE("interference certificate on random networks") {
  std::mt19937_64 g(41);
  for (int trial = 0; trial < 25; ++trial) {
    const auto nodes = oracle::random_nodes(g, 32, 6.0, 1.0, 4.0);
    const Network net = Network::build(nodes, {});
    const double gamma = gamma_bound(net);
    const auto probs = ProbabilityAssignment::uniform(net.size(), gamma / net.delta_max());
    CHECK(region_probability_sums(net, probs) <= gamma * (1 + 1e-12));
    const NetworkParams& p = net.params();
    for (NodeIndex v = 0; v < net.size(); ++v) {
      CHECK(prob_no_proximity_transmission(net, probs, v) >= 0.25);
      const double worst = expected_out_of_proximity_interference(net, probs, v, p.alpha_hi);
      CHECK(worst <= (p.delta - 1.0) * p.noise_hi / 2.0);
      CHECK(out_of_proximity_interference_at(net, probs, v, net.node(v).position, p.alpha_hi) <= worst);
      CHECK(ring_floor_interference(net, probs, v) <= ring_bound_sum(200, gamma, p, net.gamma_ratio()));
    }
  }
}

TEST_CASE("ring bound") {
  NetworkParams p;
  CHECK(ring_interference_bound(2, 0.0, p, 1.0) == 0.0);
  CHECK(ring_interference_bound(2, 1.0 / 120, p, 1.0) == doctest::Approx(0.125));
  CHECK_THROWS_AS(ring_interference_bound(1, 0.01, p, 1.0), std::invalid_argument);
  CHECK(ring_bound_sum(3, 1.0 / 120, p, 1.0) == doctest::Approx(0.125 + 0.5 / 9));
}

TEST_CASE("region sums") {
  const Network single = Network::build({at(0, 0, 0, 2)}, {});
  CHECK(region_probability_sums(single, ProbabilityAssignment::uniform(1, 0.0)) == 0.0);
  CHECK(region_probability_sums(single, ProbabilityAssignment::uniform(1, 0.3)) == doctest::Approx(0.3));
  std::mt19937_64 g(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto nodes = oracle::random_nodes(g, 40, 4.0, 1.0, 4.0);
    const Network net = Network::build(nodes, {});
    const double gamma = gamma_bound(net);
    const double p = gamma / net.delta_max();
    const auto probs = ProbabilityAssignment::uniform(net.size(), p);
    for (NodeIndex v = 0; v < net.size(); ++v) {
      double brute = 0.0;
      for (NodeIndex w = 0; w < net.size(); ++w) {
        if (w == v || oracle::edge(nodes, net.params(), v, w)) brute += p;
      }
      CHECK(region_probability_sum(net, probs, v) == doctest::Approx(brute));
    }
    CHECK(region_probability_sums(net, probs) <= gamma * (1 + 1e-12));
  }
}

TEST_CASE("power trace counts") {
  PowerTrace t;
  t.add(0, 100, 1.0);
  t.add(100, 10, 2.0);
  t.add(120, 5, 1.0);  // gap 110..119
  CHECK(t.interval_length() == 125);
  CHECK(t.levels() == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(t.counts_at_least() == std::vector<Slot>{125, 115, 10});
  CHECK_THROWS_AS(t.add(200, 1, -1.0), std::invalid_argument);
}

TEST_CASE("variable power guarantee") {
  NetworkParams params;
  const std::size_t n = 10;
  const double p = 0.5;
  const double raw = 8.0 * params.c_whp / p * std::log(static_cast<double>(n));
  const double scale = 50.0 / raw;

  PowerTrace flat;
  flat.add(0, 100, 4.0);
  CHECK(variable_power_guarantee(flat, p, params, n, scale) ==
        PowerGuarantee{1, broadcast_range(4.0, params)});

  PowerTrace two;
  two.add(0, 100, 1.0);
  two.add(100, 10, 3.0);
  CHECK(variable_power_guarantee(two, p, params, n, scale) ==
        PowerGuarantee{1, broadcast_range(1.0, params)});

  PowerTrace silent;
  silent.add(0, 100, 0.0);
  CHECK(variable_power_guarantee(silent, p, params, n, scale) == PowerGuarantee{0, 0.0});
}

TEST_CASE("power trace counts are non-increasing") {
  std::mt19937_64 g(12);
  std::uniform_int_distribution<int> len(1, 30);
  std::uniform_int_distribution<int> lvl(0, 4);
  for (int trial = 0; trial < 100; ++trial) {
    PowerTrace t;
    Slot at_slot = 0;
    std::vector<double> per_slot;
    for (int k = 0; k < 6; ++k) {
      const Slot l = len(g);
      const double pw = lvl(g);
      t.add(at_slot, l, pw);
      for (Slot s = 0; s < l; ++s) per_slot.push_back(pw);
      at_slot += l;
    }
    const auto levels = t.levels();
    const auto counts = t.counts_at_least();
    CHECK(counts.front() == t.interval_length());
    for (std::size_t j = 0; j < levels.size(); ++j) {
      const auto hand = std::count_if(per_slot.begin(), per_slot.end(),
                                      [&](double x) { return x >= levels[j]; });
      CHECK(counts[j] == static_cast<Slot>(hand));
      if (j > 0) CHECK(counts[j] <= counts[j - 1]);
    }
  }
}

TEST_CASE("fact bounds") {
  CHECK(fact_bounds_check(std::vector<double>{0.0}));
  CHECK(fact_bounds_check(std::vector<double>{0.5, 0.5}));
  CHECK(fact_bounds_check(4.0, 2.0));
  CHECK_THROWS_AS(fact_bounds_check(std::vector<double>{0.7}), std::invalid_argument);
  CHECK_THROWS_AS(fact_bounds_check(1.0, 2.0), std::invalid_argument);
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> ps(1 + i % 12);
    for (double& x : ps) x = u(g);
    CHECK(fact_bounds_check(ps));
    const double n = 1.0 + i % 50;
    CHECK(fact_bounds_check(n, (2.0 * u(g) - 0.5) * n));
  }
}

TEST_CASE("whp budget") {
  NetworkParams params;
  CHECK(whp_slot_budget(0.5, params, 10) ==
        static_cast<Slot>(std::ceil(8.0 * 2.0 / 0.5 * std::log(10.0))));
  CHECK_THROWS_AS(whp_slot_budget(0.0, params, 10), std::invalid_argument);
}
