#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sinrnet/broadcast.hpp"
#include "sinrnet/engine.hpp"
#include "sinrnet/harness.hpp"

using namespace sinrnet;

namespace {

NetworkParams true_params(double alpha, double noise, double beta) {
  NetworkParams p;
  p.alpha_true = p.alpha_lo = p.alpha_hi = alpha;
  p.noise_true = p.noise_lo = p.noise_hi = noise;
  p.beta_true = p.beta_lo = p.beta_hi = beta;
  return p;
}

Node at(NodeId id, double x, double y, double power, Slot wake = 0) {
  return {id, {x, y}, power, wake, std::nullopt};
}

Transmission tx(NodeIndex sender, Slot slot, double power) {
  return {sender, slot, power, {MessageKind::Broadcast, sender, 0, 0, 0}};
}

// Transmits at a fixed list of slots, records what it hears.
class Scripted final : public NodeProtocol {
 public:
  explicit Scripted(std::vector<Slot> slots) : slots_(std::move(slots)) {}
  std::optional<Emission> step(StepContext& ctx, std::span<const InboxEntry> inbox) override {
    for (const auto& e : inbox) heard.push_back(e);
    last_ = ctx.slot();
    for (Slot s : slots_) {
      if (s == ctx.slot()) return Emission{{MessageKind::Broadcast, ctx.node(), 0, 0, 0}, 4.0};
    }
    return std::nullopt;
  }
  Slot next_event() const override {
    for (Slot s : slots_) {
      if (s > last_) return s;
    }
    return kNever;
  }
  double transmit_probability() const override { return 0.0; }
  bool finished() const override { return next_event() == kNever; }

  std::vector<InboxEntry> heard;

 private:
  std::vector<Slot> slots_;
  Slot last_ = -1;
};

}  // namespace

TEST_CASE("sinr check examples") {
  const NetworkParams p = true_params(2.0, 1.0, 2.0);
  const Emitter s{{0, 0}, 10.0};
  const Vec2 listener{1, 0};
  CHECK(oracle::sinr({10, 1}, {}, 2.0, 1.0, 2.0));
  CHECK(sinr_check(s, listener, {}, p));
  const std::vector<Emitter> far{{{11, 0}, 10.0}};
  CHECK(oracle::sinr({10, 1}, {{10, 10}}, 2.0, 1.0, 2.0));
  CHECK(sinr_check(s, listener, far, p));
  CHECK_FALSE(oracle::sinr({1, 1}, {}, 2.0, 1.0, 2.0));
  CHECK_FALSE(sinr_check({{0, 0}, 1.0}, listener, {}, p));
  CHECK_THROWS_AS(sinr_check(s, {0, 0}, {}, p), std::invalid_argument);
}

TEST_CASE("adding an interferer never helps") {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> pw(0.5, 20.0);
  const NetworkParams p = true_params(3.0, 1.0, 1.5);
  for (int i = 0; i < 2000; ++i) {
    const Emitter s{{pos(g), pos(g)}, pw(g)};
    const Vec2 l{pos(g), pos(g)};
    std::vector<Emitter> others{{{pos(g), pos(g)}, pw(g)}};
    const bool before = sinr_check(s, l, others, p);
    others.push_back({{pos(g), pos(g)}, pw(g)});
    const bool after = sinr_check(s, l, others, p);
    CHECK_FALSE((after && !before));
    std::vector<oracle::Source> os;
    for (const auto& e : others) os.push_back({e.power, distance(e.position, l)});
    CHECK(after == oracle::sinr({s.power, distance(s.position, l)}, os, 3.0, 1.0, 1.5));
  }
}

TEST_CASE("resolve slot") {
  const Network net = Network::build({at(0, 0, 0, 4), at(1, 1, 0, 4), at(2, 0.5, 0.5, 4)}, {});
  SUBCASE("empty") { CHECK(resolve_slot(net, 0, {}).receptions.empty()); }
  SUBCASE("single sender in range") {
    const std::vector<Transmission> t{tx(0, 0, 4.0)};
    const SlotOutcome out = resolve_slot(net, 0, t);
    CHECK(out.receptions.size() == 2);
    // reception margin: P/d^α ≥ δ N̄ β̄ ≥ β N
    const double d = net.distance(0, 1);
    CHECK(d <= net.r_bcast(0));
    CHECK(4.0 / (d * d * d) >= net.params().delta * net.params().noise_true * net.params().beta_true);
  }
  SUBCASE("mutual transmitters") {
    const Network pair = Network::build({at(0, 0, 0, 4), at(1, 1, 0, 4)}, {});
    const std::vector<Transmission> t{tx(0, 0, 4.0), tx(1, 0, 4.0)};
    CHECK(resolve_slot(pair, 0, t).receptions.empty());
  }
  SUBCASE("sleeping sender rejected") {
    const Network late = Network::build({at(0, 0, 0, 4, 10), at(1, 1, 0, 4)}, {});
    const std::vector<Transmission> t{tx(0, 3, 4.0)};
    CHECK_THROWS_AS(resolve_slot(late, 3, t), ProtocolViolation);
  }
  SUBCASE("sleeping listener hears nothing") {
    const Network late = Network::build({at(0, 0, 0, 4), at(1, 1, 0, 4, 10)}, {});
    const std::vector<Transmission> t{tx(0, 3, 4.0)};
    CHECK(resolve_slot(late, 3, t).receptions.empty());
  }
}

TEST_CASE("at most one decode per listener when beta above one") {
  std::mt19937_64 g(17);
  NetworkParams p;
  p.beta_true = p.beta_lo = p.beta_hi = 1.2;
  for (int trial = 0; trial < 30; ++trial) {
    const Network net = Network::build(oracle::random_nodes(g, 24, 4.0, 1.0, 4.0), p);
    std::vector<Transmission> t;
    for (NodeIndex v = 0; v < net.size(); ++v) {
      if (g() % 4 == 0) t.push_back(tx(v, 0, net.node(v).power));
    }
    const SlotOutcome out = resolve_slot(net, 0, t);
    std::vector<int> per(net.size(), 0);
    for (const auto& r : out.receptions) ++per[r.listener];
    for (int c : per) CHECK(c <= 1);
  }
}

TEST_CASE("simulation loop") {
  SUBCASE("nothing awake") {
    const Network net = Network::build({at(0, 0, 0, 4, 100), at(1, 1, 0, 4, 100)}, {});
    SimConfig cfg;
    cfg.max_slots = 50;
    cfg.trace = TraceLevel::Receptions;
    const SimRun run = run_simulation(
        net, [](const Network&, NodeIndex) { return std::make_unique<Scripted>(std::vector<Slot>{}); },
        cfg);
    CHECK(run.trace.outcomes.empty());
    CHECK(run.trace.transmissions == 0);
  }
  SUBCASE("messages arrive next slot") {
    const Network net = Network::build({at(0, 0, 0, 4), at(1, 1, 0, 4)}, {});
    SimConfig cfg;
    cfg.max_slots = 20;
    const SimRun run = run_simulation(
        net,
        [](const Network&, NodeIndex v) {
          return std::make_unique<Scripted>(v == 0 ? std::vector<Slot>{3, 7} : std::vector<Slot>{12});
        },
        cfg);
    const auto& heard = dynamic_cast<const Scripted&>(*run.protocols[1]).heard;
    REQUIRE(heard.size() == 2);
    CHECK(heard[0].sent_slot == 3);
    CHECK(heard[1].sent_slot == 7);
    CHECK(heard[0].sender == 0);
  }
  SUBCASE("step exception names node and slot") {
    class Bad final : public NodeProtocol {
     public:
      std::optional<Emission> step(StepContext&, std::span<const InboxEntry>) override {
        throw std::runtime_error("boom");
      }
      Slot next_event() const override { return 0; }
      double transmit_probability() const override { return 0.0; }
      bool finished() const override { return false; }
    };
    const Network net = Network::build({at(4, 0, 0, 4)}, {});
    SimConfig cfg;
    cfg.max_slots = 5;
    CHECK_THROWS_AS(
        run_simulation(net, [](const Network&, NodeIndex) { return std::make_unique<Bad>(); }, cfg),
        ProtocolViolation);
  }
}

TEST_CASE("identical seeds give identical traces") {
  const Network net = generate_topology(parse_topology_spec("random:n=24,side=4,pmin=1,pmax=4"), 2);
  const BroadcastSetup setup = make_broadcast_setup(net, BroadcastProtocol::Fixed);
  SimConfig cfg;
  cfg.max_slots = setup.budget + 2;
  cfg.seed = 77;
  cfg.trace = TraceLevel::Receptions;
  const SimRun a = run_simulation(net, broadcast_factory(setup), cfg);
  const SimRun b = run_simulation(net, broadcast_factory(setup), cfg);
  CHECK(a.trace.outcomes == b.trace.outcomes);
  CHECK(a.trace.events == b.trace.events);
  cfg.seed = 78;
  const SimRun c = run_simulation(net, broadcast_factory(setup), cfg);
  CHECK_FALSE(a.trace.outcomes == c.trace.outcomes);
}

TEST_CASE("two-node broadcast completes") {
  const Network net = Network::build({at(0, 0, 0, 4), at(1, 1, 0, 4)}, {});
  const BroadcastSetup setup = make_broadcast_setup(net, BroadcastProtocol::Fixed);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SimConfig cfg;
    cfg.max_slots = setup.budget + 1;
    cfg.seed = seed;
    cfg.trace = TraceLevel::Receptions;
    const SimRun run = run_simulation(net, broadcast_factory(setup), cfg);
    CHECK(run.trace.all_finished);
    for (NodeIndex v = 0; v < 2; ++v) {
      CHECK(verify_local_broadcast(run.trace, net, v, {0, setup.budget}));
    }
  }
}
