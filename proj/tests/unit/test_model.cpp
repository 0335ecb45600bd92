#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sinrnet/harness.hpp"
#include "sinrnet/model.hpp"

using namespace sinrnet;

namespace {

NetworkParams alpha(double lo, double hi) {
  NetworkParams p;
  p.alpha_lo = lo;
  p.alpha_hi = hi;
  p.alpha_true = lo;
  return p;
}

Node at(NodeId id, double x, double y, double power) { return {id, {x, y}, power, 0, std::nullopt}; }

}  // namespace

TEST_CASE("max transmission range") {
  NetworkParams p;
  CHECK(max_transmission_range(p.noise_hi * p.beta_hi, p) == doctest::Approx(1.0));
  CHECK(max_transmission_range(4.0, alpha(2, 2)) == doctest::Approx(2.0));
  CHECK(max_transmission_range(8.0, alpha(3, 3)) == doctest::Approx(2.0));
  CHECK_THROWS_AS(max_transmission_range(0.0, p), std::invalid_argument);
  CHECK_THROWS_AS(max_transmission_range(-1.0, p), std::invalid_argument);
}

TEST_CASE("broadcast range") {
  NetworkParams p;
  CHECK(broadcast_range(p.delta * p.noise_hi * p.beta_hi, p) == doctest::Approx(1.0));
  CHECK(broadcast_range(8.0, alpha(2, 2)) == doctest::Approx(2.0));
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(0.1, 100.0);
  for (int i = 0; i < 200; ++i) {
    const double power = u(g);
    CHECK(broadcast_range(power, p) <= max_transmission_range(power, p));
  }
}

TEST_CASE("params validation") {
  NetworkParams p;
  CHECK_NOTHROW(p.validate());
  p.delta = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.alpha_true = 2.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.scale = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("two-node networks") {
  SUBCASE("equal powers give a bidirectional pair") {
    const Network net = Network::build({at(0, 0, 0, 4), at(1, 1, 0, 4)}, {});
    CHECK(net.bidirectional(0, 1));
    CHECK(net.gamma_ratio() == doctest::Approx(1.0));
    CHECK(net.ell() == 0);
    CHECK(net.delta_max() == 2);
  }
  SUBCASE("one-way link") {
    const Network net = Network::build({at(0, 0, 0, 16), at(1, 1.5, 0, 2)}, {});
    CHECK(net.has_edge(0, 1));
    CHECK_FALSE(net.has_edge(1, 0));
    CHECK(net.ell() == 1);
    CHECK(net.out_edges(0) == std::vector<NodeIndex>{1});
    CHECK(net.in_edges(1) == std::vector<NodeIndex>{0});
  }
  SUBCASE("coincident nodes rejected") {
    CHECK_THROWS_AS(Network::build({at(0, 1, 1, 2), at(1, 1, 1, 2)}, {}), std::invalid_argument);
  }
  SUBCASE("duplicate ids rejected") {
    CHECK_THROWS_AS(Network::build({at(0, 0, 0, 2), at(0, 1, 1, 2)}, {}), std::invalid_argument);
  }
}

TEST_CASE("longest one-way path") {
  SUBCASE("uniform power") {
    const Network net = generate_topology(parse_topology_spec("uniform:n=16,side=3,power=2"), 3);
    CHECK(net.ell() == 0);
    CHECK(net.gamma_ratio() == doctest::Approx(1.0));
  }
  SUBCASE("three collinear nodes") {
    // ranges with delta=2, alpha=3: r_bcast(64)=3.17, r_bcast(16)=2, r_bcast(4)=1.26
    const Network net =
        Network::build({at(0, 0, 0, 64), at(1, 3.0, 0, 16), at(2, 4.9, 0, 4)}, {});
    CHECK(net.has_edge(0, 1));
    CHECK(net.has_edge(1, 2));
    CHECK_FALSE(net.has_edge(1, 0));
    CHECK_FALSE(net.has_edge(2, 1));
    CHECK_FALSE(net.has_edge(0, 2));
    CHECK(net.ell() == 2);
    CHECK(oracle::ell(net.nodes(), net.params()) == 2);
  }
  SUBCASE("chain preset") {
    for (std::size_t n = 2; n <= 7; ++n) {
      TopologySpec spec = parse_topology_spec("chain:ratio=2,pmin=1");
      spec.n = n;
      const Network net = generate_topology(spec, 1);
      CHECK(net.ell() == static_cast<int>(n) - 1);
      CHECK(oracle::ell(net.nodes(), net.params()) == static_cast<int>(n) - 1);
    }
  }
}

TEST_CASE("ring classification") {
  const double r = 1.7;
  CHECK(ring_index_for_distance(1.5 * r, r) == RingClass::in_proximity());
  CHECK(ring_index_for_distance(3.5 * r, r) == RingClass::in_ring(2));
  CHECK(ring_index_for_distance(4.0 * r, r) == RingClass::in_ring(2));
  CHECK(ring_index_for_distance(3.0 * r, r) == RingClass::in_ring(2));
  CHECK(ring_index_for_distance(7.25 * r, r) == RingClass::in_ring(6));
  for (double d = 0.0; d < 30.0; d += 0.0625) {
    CHECK(ring_index_for_distance(d * r, r) == oracle::ring(d * r, r));
  }
}

TEST_CASE("structural quantities match brute force") {
  std::mt19937_64 g(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const auto nodes = oracle::random_nodes(g, 2 + trial % 10, 4.0, 1.0, 4.0);
    const Network net = Network::build(nodes, {});
    CHECK(net.delta_max() == oracle::delta(nodes, net.params()));
    CHECK(net.gamma_ratio() == doctest::Approx(oracle::big_gamma(nodes, net.params())));
    CHECK(net.ell() == oracle::ell(nodes, net.params()));
    for (NodeIndex a = 0; a < net.size(); ++a) {
      for (NodeIndex b = 0; b < net.size(); ++b) {
        CHECK(net.has_edge(a, b) == oracle::edge(nodes, net.params(), a, b));
      }
    }
  }
}

TEST_CASE("ranges shrink along one-way paths") {
  std::mt19937_64 g(99);
  for (int trial = 0; trial < 40; ++trial) {
    const auto nodes = oracle::random_nodes(g, 10, 3.0, 1.0, 8.0);
    const Network net = Network::build(nodes, {});
    oracle::ell(nodes, net.params(), [&](const std::vector<std::size_t>& path) {
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        CHECK(net.r_max(static_cast<NodeIndex>(path[i])) >=
              net.r_max(static_cast<NodeIndex>(path[i + 1])));
      }
    });
  }
}
