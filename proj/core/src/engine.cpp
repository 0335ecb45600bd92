#include "sinrnet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <sstream>

namespace sinrnet {

namespace {

double received_power(double power, double dist, double alpha) {
  return power / std::pow(dist, alpha);
}

bool meets_threshold(double signal, double interference, const NetworkParams& params) {
  return signal / (interference + params.noise_true) >= params.beta_true;
}

}  // namespace

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Broadcast: return "broadcast";
    case MessageKind::LearnReq: return "learn_req";
    case MessageKind::LearnReply: return "learn_reply";
    case MessageKind::LearnAck: return "learn_ack";
    case MessageKind::Compete: return "compete";
    case MessageKind::Colored: return "colored";
    case MessageKind::Request: return "request";
    case MessageKind::Serve: return "serve";
  }
  return "unknown";
}

bool sinr_check(const Emitter& sender, Vec2 listener, std::span<const Emitter> interferers,
                const NetworkParams& params) {
  const double d = distance(sender.position, listener);
  if (!(d > 0.0)) throw std::invalid_argument("sinr_check: listener coincides with sender");
  double interference = 0.0;
  for (const auto& e : interferers) {
    const double di = distance(e.position, listener);
    if (!(di > 0.0)) throw std::invalid_argument("sinr_check: listener coincides with interferer");
    interference += received_power(e.power, di, params.alpha_true);
  }
  return meets_threshold(received_power(sender.power, d, params.alpha_true), interference, params);
}

SlotOutcome resolve_slot(const Network& network, Slot slot,
                         std::span<const Transmission> transmissions) {
  SlotOutcome out;
  out.slot = slot;
  out.transmissions.assign(transmissions.begin(), transmissions.end());
  if (transmissions.empty()) return out;

  const std::size_t n = network.size();
  std::vector<char> transmitting(n, 0);
  for (const auto& t : transmissions) {
    if (t.slot != slot) throw ProtocolViolation("resolve_slot: transmission for a different slot");
    if (t.sender >= n) throw ProtocolViolation("resolve_slot: unknown sender");
    if (!network.node(t.sender).awake_at(slot)) {
      std::ostringstream msg;
      msg << "node " << network.node(t.sender).id << " transmits while asleep at slot " << slot;
      throw ProtocolViolation(msg.str());
    }
    if (!(t.power > 0.0)) throw ProtocolViolation("resolve_slot: non-positive transmission power");
    if (transmitting[t.sender]) throw ProtocolViolation("resolve_slot: node transmits twice in a slot");
    transmitting[t.sender] = 1;
  }

  const NetworkParams& params = network.params();
  const double min_signal = params.beta_true * params.noise_true;
  std::vector<double> rx(transmissions.size());
  for (NodeIndex l = 0; l < n; ++l) {
    if (transmitting[l] || !network.node(l).awake_at(slot)) continue;
    const Vec2 at = network.node(l).position;
    bool any_candidate = false;
    for (std::size_t k = 0; k < transmissions.size(); ++k) {
      const auto& t = transmissions[k];
      rx[k] = received_power(t.power, distance(network.node(t.sender).position, at),
                             params.alpha_true);
      any_candidate = any_candidate || rx[k] >= min_signal;
    }
    if (!any_candidate) continue;

    std::size_t decoded = 0;
    std::size_t which = 0;
    for (std::size_t k = 0; k < transmissions.size(); ++k) {
      if (rx[k] < min_signal) continue;
      double interference = 0.0;
      for (std::size_t m = 0; m < transmissions.size(); ++m) {
        if (m != k) interference += rx[m];
      }
      if (meets_threshold(rx[k], interference, params)) {
        ++decoded;
        which = k;
      }
    }
    if (decoded == 1) out.receptions.push_back({l, which});
  }
  return out;
}

namespace {

class RegionMonitor {
 public:
  RegionMonitor(const Network& network, double cap)
      : network_(network), cap_(cap), prob_(network.size(), 0.0), sums_(network.size(), 0.0) {}

  void set(NodeIndex x, double p, Slot slot, SimTrace& trace) {
    const double change = p - prob_[x];
    if (change == 0.0) return;
    prob_[x] = p;
    auto bump = [&](NodeIndex region) {
      sums_[region] += change;
      if (sums_[region] < 0.0) sums_[region] = 0.0;
      trace.max_region_sum = std::max(trace.max_region_sum, sums_[region]);
      if (change > 0.0 && sums_[region] > cap_ * (1.0 + 1e-9)) {
        if (trace.violations.size() < 1000) trace.violations.push_back({slot, region, sums_[region]});
      }
    };
    bump(x);
    for (NodeIndex u : network_.in_edges(x)) bump(u);
  }

 private:
  const Network& network_;
  double cap_;
  std::vector<double> prob_;
  std::vector<double> sums_;
};

}  // namespace

SimRun run_simulation(const Network& network, const ProtocolFactory& factory,
                      const SimConfig& config) {
  if (config.max_slots <= 0) throw std::invalid_argument("run_simulation: max_slots must be > 0");

  const std::size_t n = network.size();
  SimRun run;
  SimTrace& trace = run.trace;
  trace.seed = config.seed;

  run.protocols.reserve(n);
  std::vector<Rng> rngs;
  rngs.reserve(n);
  for (NodeIndex v = 0; v < n; ++v) {
    run.protocols.push_back(factory(network, v));
    rngs.emplace_back(node_stream_seed(config.seed, network.node(v).id));
  }

  std::optional<RegionMonitor> monitor;
  if (config.monitor) monitor.emplace(network, config.monitor->cap);

  using Entry = std::pair<Slot, NodeIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::vector<Slot> scheduled(n, kNever);
  std::vector<char> done(n, 0);
  std::size_t done_count = 0;
  auto set_done = [&](NodeIndex v, bool value) {
    if (static_cast<bool>(done[v]) == value) return;
    done[v] = value ? 1 : 0;
    if (value) ++done_count; else --done_count;
  };

  for (NodeIndex v = 0; v < n; ++v) {
    scheduled[v] = network.node(v).wake_slot;
    heap.emplace(scheduled[v], v);
  }

  std::vector<std::vector<InboxEntry>> inbox(n);
  std::vector<NodeIndex> inbox_nodes;
  std::vector<NodeIndex> stepping;
  std::vector<Transmission> transmissions;
  Slot last = -1;

  while (true) {
    while (!heap.empty() && scheduled[heap.top().second] != heap.top().first) heap.pop();
    Slot t = heap.empty() ? kNever : heap.top().first;
    if (!inbox_nodes.empty()) t = std::min(t, last + 1);
    if (t == kNever || t >= config.max_slots) break;

    stepping.assign(inbox_nodes.begin(), inbox_nodes.end());
    inbox_nodes.clear();
    while (!heap.empty() && heap.top().first == t) {
      const NodeIndex v = heap.top().second;
      heap.pop();
      if (scheduled[v] == t) {
        stepping.push_back(v);
        scheduled[v] = kNever;
      }
    }
    std::sort(stepping.begin(), stepping.end());
    stepping.erase(std::unique(stepping.begin(), stepping.end()), stepping.end());

    transmissions.clear();
    for (NodeIndex v : stepping) {
      const Node& node = network.node(v);
      auto& proto = *run.protocols[v];
      if (!node.awake_at(t)) {
        inbox[v].clear();
        if (node.sleep_slot && t >= *node.sleep_slot) {
          scheduled[v] = kNever;
          set_done(v, true);
          if (monitor) monitor->set(v, 0.0, t, trace);
        }
        continue;
      }

      StepContext ctx(t, v, rngs[v], config.log_events ? &trace.events : nullptr);
      std::optional<Emission> emission;
      try {
        emission = proto.step(ctx, inbox[v]);
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "node " << node.id << " failed at slot " << t << ": " << e.what();
        throw ProtocolViolation(msg.str());
      }
      inbox[v].clear();
      if (emission) transmissions.push_back({v, t, emission->power, emission->payload});

      Slot next = proto.next_event();
      if (next <= t) {
        std::ostringstream msg;
        msg << "node " << node.id << " scheduled its next event at " << next
            << " which is not after slot " << t;
        throw ProtocolViolation(msg.str());
      }
      if (node.sleep_slot) next = std::min(next, *node.sleep_slot);
      if (next != kNever) {
        scheduled[v] = next;
        heap.emplace(next, v);
      }
      if (monitor) monitor->set(v, proto.transmit_probability(), t, trace);
      set_done(v, proto.finished());
    }

    if (!transmissions.empty()) {
      SlotOutcome outcome = resolve_slot(network, t, transmissions);
      trace.transmissions += outcome.transmissions.size();
      trace.receptions += outcome.receptions.size();
      for (const auto& r : outcome.receptions) {
        const auto& tx = outcome.transmissions[r.transmission];
        if (inbox[r.listener].empty()) inbox_nodes.push_back(r.listener);
        inbox[r.listener].push_back({tx.sender, t, tx.payload});
      }
      if (config.trace == TraceLevel::Receptions) trace.outcomes.push_back(std::move(outcome));
    }
    last = t;

    if (done_count == n && inbox_nodes.empty()) {
      trace.all_finished = true;
      break;
    }
  }
  trace.end_slot = last + 1;
  if (done_count == n) trace.all_finished = true;
  return run;
}

void write_trace_lines(std::ostream& out, const Network& network, const SimTrace& trace) {
  for (const auto& o : trace.outcomes) {
    for (const auto& tx : o.transmissions) {
      out << "{\"slot\":" << o.slot << ",\"sender\":" << network.node(tx.sender).id
          << ",\"kind\":\"" << to_string(tx.payload.kind) << "\"}\n";
    }
    for (const auto& r : o.receptions) {
      const auto& tx = o.transmissions[r.transmission];
      out << "{\"slot\":" << o.slot << ",\"sender\":" << network.node(tx.sender).id
          << ",\"listener\":" << network.node(r.listener).id << ",\"kind\":\""
          << to_string(tx.payload.kind) << "\"}\n";
    }
  }
}

}  // namespace sinrnet
