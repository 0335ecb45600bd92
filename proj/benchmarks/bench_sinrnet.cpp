#include <benchmark/benchmark.h>

#include "sinrnet/broadcast.hpp"
#include "sinrnet/coloring.hpp"
#include "sinrnet/harness.hpp"

using namespace sinrnet;

namespace {

Network random_net(std::size_t n) {
  TopologySpec spec = parse_topology_spec("random:side=6,pmin=1,pmax=4");
  spec.n = n;
  spec.side = std::sqrt(static_cast<double>(n) / 1.8);
  return generate_topology(spec, 1);
}

}  // namespace

static void BM_ResolveSlot(benchmark::State& state) {
  const Network net = random_net(static_cast<std::size_t>(state.range(0)));
  std::vector<Transmission> tx;
  for (NodeIndex v = 0; v < net.size(); v += 8) {
    tx.push_back({v, 0, net.node(v).power, {MessageKind::Broadcast, v, v, 0, 0}});
  }
  for (auto _ : state) benchmark::DoNotOptimize(resolve_slot(net, 0, tx));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(net.size()));
}
BENCHMARK(BM_ResolveSlot)->Arg(64)->Arg(256)->Arg(1024);

static void BM_FixedBroadcastRun(benchmark::State& state) {
  const Network net = random_net(static_cast<std::size_t>(state.range(0)));
  const BroadcastSetup setup = make_broadcast_setup(net, BroadcastProtocol::Fixed);
  SimConfig cfg;
  cfg.max_slots = setup.budget + 1;
  cfg.trace = TraceLevel::Receptions;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = ++seed;
    benchmark::DoNotOptimize(run_simulation(net, broadcast_factory(setup), cfg));
  }
}
BENCHMARK(BM_FixedBroadcastRun)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_ColoringRun(benchmark::State& state) {
  const Network net = random_net(static_cast<std::size_t>(state.range(0)));
  auto setup = std::make_shared<ColoringSetup>();
  setup->constants = coloring_constants(net);
  SimConfig cfg;
  cfg.max_slots = coloring_termination_budget(setup->constants, net);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = ++seed;
    benchmark::DoNotOptimize(run_simulation(net, coloring_factory(setup), cfg));
  }
}
BENCHMARK(BM_ColoringRun)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
