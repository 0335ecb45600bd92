#include <cmath>

#include "doctest.h"
#include "sinrnet/broadcast.hpp"
#include "sinrnet/harness.hpp"

using namespace sinrnet;

namespace {

Node at(NodeId id, double x, double y, double power) { return {id, {x, y}, power, 0, std::nullopt}; }

SlowStartState slow(double gamma, double n_est, Slot phase_len) {
  SlowStartState s;
  s.p_cap = gamma / 16.0;
  s.p_init = gamma / (16.0 * n_est);
  s.phase_len = phase_len;
  s.cap_slots_needed = 1'000'000;
  s.global_budget = 10'000'000;
  return s;
}

}  // namespace

TEST_CASE("fixed probability stepping") {
  SUBCASE("p = 1 transmits every slot") {
    FixedProbState s;
    s.p = 1.0;
    s.budget = 50;
    Rng rng(1);
    for (Slot t = 10; t < 60; ++t) CHECK(fixed_step(s, t, rng).has_value());
    CHECK(s.complete());
    CHECK_THROWS_AS(fixed_step(s, 60, rng), ProtocolViolation);
  }
  SUBCASE("p = 0.25 frequency") {
    FixedProbState s;
    s.p = 0.25;
    s.budget = 100'000;
    Rng rng(2);
    int sent = 0;
    for (Slot t = 0; t < s.budget; ++t) sent += fixed_step(s, t, rng).has_value();
    CHECK(std::abs(sent / 1e5 - 0.25) <= 0.01);
  }
  SUBCASE("skipping slots matches stepping every slot") {
    FixedProbState every;
    every.p = 0.1;
    every.budget = 5000;
    FixedProbState lazy = every;
    Rng a(9);
    Rng b(9);
    std::vector<Slot> dense;
    for (Slot t = 0; t < every.budget; ++t) {
      if (fixed_step(every, t, a)) dense.push_back(t);
    }
    std::vector<Slot> sparse;
    Slot t = 0;
    while (!lazy.complete()) {
      if (fixed_step(lazy, t, b)) sparse.push_back(t);
      t = std::min(lazy.next_tx, lazy.last_slot());
      if (t <= (sparse.empty() ? -1 : sparse.back()) && !lazy.complete()) t = sparse.back() + 1;
    }
    CHECK(dense == sparse);
  }
}

TEST_CASE("slow start doubles to the cap") {
  const double gamma = 0.01;
  for (double n_est : {1.0, 2.0, 5.0, 16.0, 100.0}) {
    CAPTURE(n_est);
    SlowStartState s = slow(gamma, n_est, 7);
    Rng rng(4);
    const int phases = static_cast<int>(std::ceil(std::log2(n_est)));
    for (Slot t = 0; t < 7 * (phases + 2); ++t) {
      slowstart_step(s, t, 0, rng);
      CHECK(s.p_cur >= s.p_init);
      CHECK(s.p_cur <= s.p_cap);
      const bool at_cap = s.p_cur == doctest::Approx(s.p_cap);
      CHECK(at_cap == (t >= 7 * phases));
    }
  }
}

TEST_CASE("slow start halves on reception") {
  SlowStartState s = slow(0.016, 8, 5);
  Rng rng(4);
  for (Slot t = 0; t < 40; ++t) slowstart_step(s, t, 0, rng);
  REQUIRE(s.p_cur == doctest::Approx(s.p_cap));
  slowstart_step(s, 40, 2, rng);
  CHECK(s.p_cur == doctest::Approx(s.p_cap / 2));
  CHECK(s.halvings == 1);
  for (int k = 0; k < 10; ++k) slowstart_step(s, 41 + k, 1, rng);
  CHECK(s.p_cur == doctest::Approx(s.p_init));
}

TEST_CASE("slow start completes after enough slots at the cap") {
  SlowStartState s = slow(0.016, 4, 3);
  s.cap_slots_needed = 20;
  Rng rng(1);
  Slot t = 0;
  while (!s.complete) slowstart_step(s, t++, 0, rng);
  CHECK(t == 6 + 20);
  CHECK_THROWS_AS(slowstart_step(s, t, 0, rng), ProtocolViolation);
}

TEST_CASE("slow start keeps region sums below gamma on a clique") {
  const Network net = generate_topology(parse_topology_spec("uniform:n=9,side=0.4,power=2"), 1);
  REQUIRE(net.delta_max() == 9);
  const BroadcastSetup setup = make_broadcast_setup(net, BroadcastProtocol::SlowStart);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimConfig cfg;
    cfg.max_slots = setup.budget + 2;
    cfg.seed = seed;
    cfg.monitor = ProbabilityMonitor{setup.gamma};
    const SimRun run = run_simulation(net, broadcast_factory(setup), cfg);
    CHECK(run.trace.violations.empty());
    CHECK(run.trace.max_region_sum <= setup.gamma);
    CHECK(run.trace.all_finished);
  }
}

TEST_CASE("power schedules") {
  const PowerSchedule c = PowerSchedule::constant(2.0, 10);
  CHECK(c.power_at(0) == 2.0);
  CHECK(c.power_at(9) == 2.0);
  CHECK(c.power_at(10) == 0.0);
  CHECK(c.next_change(3) == 10);
  const PowerSchedule two = PowerSchedule::two_level(4.0, 1.0, 0.5, 11);
  CHECK(two.power_at(5) == 4.0);
  CHECK(two.power_at(6) == 1.0);
  CHECK(two.next_change(0) == 6);
}

TEST_CASE("variable power stepping") {
  SUBCASE("constant schedule behaves like fixed probability") {
    FixedProbState f;
    f.p = 0.2;
    f.budget = 3000;
    f.power = 2.0;
    VarPowerState v;
    v.p = 0.2;
    v.schedule = PowerSchedule::constant(2.0, 3000);
    v.power_lo = 1.0;
    v.power_hi = 4.0;
    Rng a(5);
    Rng b(5);
    for (Slot t = 0; t < 3000; ++t) {
      const auto x = fixed_step(f, t, a);
      const auto y = varpower_step(v, t, b);
      CHECK(x.has_value() == y.has_value());
      if (y) CHECK(y->power == 2.0);
    }
  }
  SUBCASE("two-level trace counts") {
    VarPowerState v;
    v.p = 0.3;
    v.schedule = PowerSchedule::two_level(4.0, 1.0, 0.25, 400);
    v.power_lo = 1.0;
    v.power_hi = 4.0;
    Rng rng(3);
    for (Slot t = 50; t < 449; t += 3) varpower_step(v, t, rng);
    varpower_step(v, 449, rng);
    CHECK(v.trace.interval_length() == 400);
    CHECK(v.trace.levels() == std::vector<double>{0.0, 1.0, 4.0});
    CHECK(v.trace.counts_at_least() == std::vector<Slot>{400, 400, 100});
    CHECK_THROWS_AS(varpower_step(v, 450, rng), ProtocolViolation);
  }
  SUBCASE("p = 0 never transmits") {
    VarPowerState v;
    v.schedule = PowerSchedule::constant(2.0, 100);
    v.power_lo = 1.0;
    v.power_hi = 4.0;
    Rng rng(3);
    for (Slot t = 0; t < 100; ++t) CHECK_FALSE(varpower_step(v, t, rng));
    CHECK(v.trace.transmissions().empty());
  }
  SUBCASE("out-of-bounds power rejected") {
    VarPowerState v;
    v.p = 1.0;
    v.schedule = PowerSchedule::constant(8.0, 10);
    v.power_lo = 1.0;
    v.power_hi = 4.0;
    Rng rng(3);
    CHECK_THROWS_AS(varpower_step(v, 0, rng), ProtocolViolation);
  }
}

TEST_CASE("setup constants") {
  const Network net = generate_topology(parse_topology_spec("random:n=32,side=5,pmin=1,pmax=4"), 3);
  const double gamma = gamma_bound(net);
  const double ln_n = std::log(32.0);
  const BroadcastSetup f = make_broadcast_setup(net, BroadcastProtocol::Fixed);
  CHECK(f.p == doctest::Approx(gamma / net.delta_max()));
  CHECK(f.p <= gamma);
  CHECK(f.budget == static_cast<Slot>(std::ceil(16.0 / f.p * ln_n)));
  const BroadcastSetup s = make_broadcast_setup(net, BroadcastProtocol::SlowStart);
  CHECK(s.p == doctest::Approx(gamma / 16));
  CHECK(s.p_init == doctest::Approx(gamma / (16 * 32)));
  CHECK(s.phase_len == static_cast<Slot>(std::ceil(8.0 * ln_n)));
  CHECK(parse_broadcast_protocol("varpower") == BroadcastProtocol::VarPower);
  CHECK_THROWS_AS(parse_broadcast_protocol("nope"), std::invalid_argument);
}

TEST_CASE("local broadcast verification") {
  const Network pair = Network::build({at(0, 0, 0, 4), at(1, 1, 0, 4)}, {});
  SimTrace trace;
  SlotOutcome o;
  o.slot = 3;
  o.transmissions.push_back({0, 3, 4.0, {MessageKind::Broadcast, 0, 0, 0, 0}});
  trace.outcomes.push_back(o);
  CHECK_FALSE(verify_local_broadcast(trace, pair, 0, {0, 10}));
  trace.outcomes[0].receptions.push_back({1, 0});
  CHECK(verify_local_broadcast(trace, pair, 0, {0, 10}));
  CHECK(local_broadcast_completion_slot(trace, pair, 0, {0, 10}) == Slot{3});
  CHECK_FALSE(verify_local_broadcast(trace, pair, 0, {4, 10}));
  const SenderSuccessStats st = sender_success_stats(trace, pair, 0, {0, 10});
  CHECK(st.transmissions == 1);
  CHECK(st.full_successes == 1);

  const Network lonely = Network::build({at(0, 0, 0, 4), at(1, 30, 0, 4)}, {});
  CHECK(verify_local_broadcast(SimTrace{}, lonely, 0, {0, 10}));
  CHECK_THROWS_AS(verify_local_broadcast(SimTrace{}, lonely, 5, {0, 10}), std::invalid_argument);
}

TEST_CASE("fixed broadcast end to end") {
  const Network net = generate_topology(parse_topology_spec("random:n=32,side=5,pmin=1,pmax=4"), 4);
  const BroadcastSetup setup = make_broadcast_setup(net, BroadcastProtocol::Fixed);
  SimConfig cfg;
  cfg.max_slots = setup.budget + 1;
  cfg.seed = 5;
  cfg.trace = TraceLevel::Receptions;
  cfg.monitor = ProbabilityMonitor{setup.gamma};
  const SimRun run = run_simulation(net, broadcast_factory(setup), cfg);
  CHECK(run.trace.violations.empty());
  for (NodeIndex v = 0; v < net.size(); ++v) CHECK(verify_local_broadcast(run.trace, net, v, {0, setup.budget}));
}
