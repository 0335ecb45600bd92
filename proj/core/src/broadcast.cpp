#include "sinrnet/broadcast.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace sinrnet {

namespace {

Slot after(Slot base, Slot skip) {
  if (skip == kNever || base > kNever - 1 - skip) return kNever;
  return base + skip;
}

}  // namespace

std::optional<Emission> fixed_step(FixedProbState& s, Slot slot, Rng& rng) {
  if (s.complete()) throw ProtocolViolation("fixed broadcaster stepped after completion");
  if (s.start < 0) {
    s.start = slot;
    s.next_tx = after(slot, rng.geometric_failures(s.p));
  }
  if (slot < s.start) throw ProtocolViolation("fixed broadcaster stepped backwards in time");
  s.elapsed = slot - s.start + 1;
  if (s.next_tx < slot) s.next_tx = after(slot, rng.geometric_failures(s.p));
  if (s.next_tx != slot) return std::nullopt;
  s.next_tx = after(slot + 1, rng.geometric_failures(s.p));
  return Emission{s.payload, s.power};
}

std::optional<Emission> slowstart_step(SlowStartState& s, Slot slot, std::size_t received,
                                       Rng& rng) {
  if (s.complete) throw ProtocolViolation("slow-start broadcaster stepped after completion");
  if (s.start < 0) {
    s.start = slot;
    s.cursor = slot;
    s.p_cur = s.p_init;
    s.next_boundary = slot + s.phase_len;
  }
  if (slot < s.cursor) throw ProtocolViolation("slow-start broadcaster stepped backwards in time");

  while (s.next_boundary <= slot) {
    if (s.p_cur >= s.p_cap) {
      // Doubling is a no-op at the cap: skip straight to the current slot.
      s.slots_at_cap += slot - s.cursor;
      s.cursor = slot;
      s.next_boundary += ((slot - s.next_boundary) / s.phase_len + 1) * s.phase_len;
      break;
    }
    s.cursor = s.next_boundary;
    s.p_cur = std::min(s.p_cap, 2.0 * s.p_cur);
    s.next_boundary += s.phase_len;
  }
  if (s.p_cur >= s.p_cap) s.slots_at_cap += slot - s.cursor;

  if (received > 0) {
    s.p_cur = std::max(s.p_init, s.p_cur / 2.0);
    ++s.halvings;
  }
  if (s.p_cur >= s.p_cap) ++s.slots_at_cap;
  s.cursor = slot + 1;

  if (s.sampled_p != s.p_cur || s.next_tx < slot) {
    s.next_tx = after(slot, rng.geometric_failures(s.p_cur));
    s.sampled_p = s.p_cur;
  }
  std::optional<Emission> out;
  if (s.next_tx == slot) {
    out = Emission{s.payload, s.power};
    s.next_tx = after(slot + 1, rng.geometric_failures(s.p_cur));
  }
  if (s.slots_at_cap >= s.cap_slots_needed || slot - s.start + 1 >= s.global_budget) {
    s.complete = true;
  }
  return out;
}

double PowerSchedule::power_at(Slot offset) const {
  if (offset < 0 || offset >= length || levels.empty()) return 0.0;
  auto it = std::upper_bound(levels.begin(), levels.end(), offset,
                             [](Slot off, const Level& l) { return off < l.begin; });
  return it == levels.begin() ? 0.0 : std::prev(it)->power;
}

Slot PowerSchedule::next_change(Slot offset) const {
  auto it = std::upper_bound(levels.begin(), levels.end(), offset,
                             [](Slot off, const Level& l) { return off < l.begin; });
  return it == levels.end() ? length : std::min(length, it->begin);
}

PowerSchedule PowerSchedule::constant(double power, Slot length) {
  return PowerSchedule{{{0, power}}, length};
}

PowerSchedule PowerSchedule::two_level(double high, double low, double high_fraction,
                                       Slot length) {
  const Slot high_len =
      std::clamp<Slot>(static_cast<Slot>(std::ceil(high_fraction * static_cast<double>(length))),
                       0, length);
  PowerSchedule s;
  s.length = length;
  if (high_len > 0) s.levels.push_back({0, high});
  if (high_len < length) s.levels.push_back({high_len, low});
  return s;
}

std::optional<Emission> varpower_step(VarPowerState& s, Slot slot, Rng& rng) {
  if (s.start < 0) {
    s.start = slot;
    s.cursor = slot;
    s.next_tx = after(slot, rng.geometric_failures(s.p));
  }
  if (s.complete(slot)) throw ProtocolViolation("variable-power broadcaster stepped after its interval");
  if (slot < s.cursor) throw ProtocolViolation("variable-power broadcaster stepped backwards in time");

  auto checked_power = [&](Slot offset) {
    const double pw = s.schedule.power_at(offset);
    const double tol = 1e-12 * s.power_hi;
    if (pw != 0.0 && (pw < s.power_lo - tol || pw > s.power_hi + tol)) {
      throw ProtocolViolation("power schedule leaves the declared power bounds");
    }
    return pw;
  };

  while (s.cursor <= slot) {
    const Slot offset = s.cursor - s.start;
    const double pw = checked_power(offset);
    const Slot end = std::min(slot + 1, s.start + s.schedule.next_change(offset));
    s.trace.add(offset, end - s.cursor, pw);
    s.cursor = end;
  }

  if (s.next_tx < slot) s.next_tx = after(slot, rng.geometric_failures(s.p));
  if (s.next_tx != slot) return std::nullopt;
  s.next_tx = after(slot + 1, rng.geometric_failures(s.p));
  const double pw = checked_power(slot - s.start);
  if (pw <= 0.0) return std::nullopt;
  s.trace.record_transmission(slot - s.start, pw);
  return Emission{s.payload, pw};
}

const char* to_string(BroadcastProtocol protocol) {
  switch (protocol) {
    case BroadcastProtocol::Fixed: return "fixed";
    case BroadcastProtocol::SlowStart: return "slowstart";
    case BroadcastProtocol::VarPower: return "varpower";
  }
  return "unknown";
}

BroadcastProtocol parse_broadcast_protocol(const std::string& name) {
  if (name == "fixed") return BroadcastProtocol::Fixed;
  if (name == "slowstart") return BroadcastProtocol::SlowStart;
  if (name == "varpower") return BroadcastProtocol::VarPower;
  throw std::invalid_argument("unknown broadcast protocol '" + name + "'");
}

BroadcastSetup make_broadcast_setup(const Network& network, BroadcastProtocol protocol,
                                    const BroadcastOptions& options) {
  const NetworkParams& params = network.params();
  const std::size_t n = network.size();
  const double ln_n = std::log(static_cast<double>(n));
  const double delta = static_cast<double>(network.delta_max());

  BroadcastSetup s;
  s.protocol = protocol;
  s.options = options;
  s.gamma = gamma_bound(network);
  switch (protocol) {
    case BroadcastProtocol::Fixed:
      s.p = s.gamma / delta;
      s.budget = whp_slot_budget(s.p, params, n);
      break;
    case BroadcastProtocol::SlowStart: {
      const double n_est = static_cast<double>(options.n_estimate ? options.n_estimate : n);
      s.p = s.gamma / 16.0;
      s.p_init = s.gamma / (16.0 * n_est);
      s.phase_len = std::max<Slot>(1, static_cast<Slot>(std::ceil(4.0 * params.c_whp * ln_n)));
      s.cap_slots_needed = whp_slot_budget(s.p, params, n);
      s.budget = std::max<Slot>(
          1, static_cast<Slot>(std::ceil(params.scale * options.slowstart_constant *
                                         (delta + ln_n) * ln_n / s.gamma)));
      break;
    }
    case BroadcastProtocol::VarPower:
      s.p = s.gamma / delta;
      s.budget = std::max<Slot>(
          1, static_cast<Slot>(std::ceil(options.varpower_interval_factor *
                                         static_cast<double>(whp_slot_budget(s.p, params, n)))));
      break;
  }
  return s;
}

BroadcastNode::BroadcastNode(const Network& network, NodeIndex self, const BroadcastSetup& setup)
    : setup_(setup) {
  const Node& node = network.node(self);
  Message payload{MessageKind::Broadcast, self, self, 0, node.id};
  switch (setup.protocol) {
    case BroadcastProtocol::Fixed:
      fixed_.p = setup.p;
      fixed_.budget = setup.budget;
      fixed_.payload = payload;
      fixed_.power = node.power;
      break;
    case BroadcastProtocol::SlowStart:
      slow_.p_cap = setup.p;
      slow_.p_init = setup.p_init;
      slow_.phase_len = setup.phase_len;
      slow_.cap_slots_needed = setup.cap_slots_needed;
      slow_.global_budget = setup.budget;
      slow_.payload = payload;
      slow_.power = node.power;
      break;
    case BroadcastProtocol::VarPower: {
      var_.p = setup.p;
      var_.power_lo = network.min_power();
      var_.power_hi = network.max_power();
      const double low = std::max(network.min_power(), setup.options.varpower_low_ratio * node.power);
      var_.schedule = PowerSchedule::two_level(node.power, low, setup.options.varpower_high_fraction,
                                               setup.budget);
      var_.payload = payload;
      break;
    }
  }
}

std::optional<Emission> BroadcastNode::step(StepContext& ctx, std::span<const InboxEntry> inbox) {
  const Slot slot = ctx.slot();
  std::optional<Emission> out;
  switch (setup_.protocol) {
    case BroadcastProtocol::Fixed:
      if (!fixed_.complete()) out = fixed_step(fixed_, slot, ctx.rng());
      break;
    case BroadcastProtocol::SlowStart:
      if (!slow_.complete) {
        const auto heard = static_cast<std::size_t>(
            std::count_if(inbox.begin(), inbox.end(), [](const InboxEntry& e) {
              return e.message.kind == MessageKind::Broadcast;
            }));
        out = slowstart_step(slow_, slot, heard, ctx.rng());
        if (slow_.complete) ctx.log("slowstart_complete", slow_.slots_at_cap);
      }
      break;
    case BroadcastProtocol::VarPower:
      if (!var_.complete(slot)) out = varpower_step(var_, slot, ctx.rng());
      break;
  }
  last_step_ = slot;
  return out;
}

Slot BroadcastNode::next_event() const {
  Slot next = kNever;
  switch (setup_.protocol) {
    case BroadcastProtocol::Fixed:
      if (!fixed_.complete()) next = std::min(fixed_.next_tx, fixed_.last_slot());
      break;
    case BroadcastProtocol::SlowStart:
      if (!slow_.complete) {
        next = std::min(slow_.next_tx, slow_.start + slow_.global_budget - 1);
        if (slow_.p_cur < slow_.p_cap) {
          next = std::min(next, slow_.next_boundary);
        } else {
          next = std::min(next, slow_.cursor + (slow_.cap_slots_needed - slow_.slots_at_cap) - 1);
        }
      }
      break;
    case BroadcastProtocol::VarPower:
      if (last_step_ < var_.start + var_.schedule.length - 1) {
        next = std::min(var_.next_tx, var_.start + var_.schedule.length - 1);
      }
      break;
  }
  return std::max(next, last_step_ + 1);
}

double BroadcastNode::transmit_probability() const {
  switch (setup_.protocol) {
    case BroadcastProtocol::Fixed: return fixed_.complete() ? 0.0 : fixed_.p;
    case BroadcastProtocol::SlowStart: return slow_.complete ? 0.0 : slow_.p_cur;
    case BroadcastProtocol::VarPower:
      return last_step_ >= var_.start + var_.schedule.length - 1 ? 0.0 : var_.p;
  }
  return 0.0;
}

bool BroadcastNode::finished() const {
  switch (setup_.protocol) {
    case BroadcastProtocol::Fixed: return fixed_.complete();
    case BroadcastProtocol::SlowStart: return slow_.complete;
    case BroadcastProtocol::VarPower:
      return var_.start >= 0 && last_step_ >= var_.start + var_.schedule.length - 1;
  }
  return true;
}

ProtocolFactory broadcast_factory(const BroadcastSetup& setup) {
  return [setup](const Network& network, NodeIndex v) -> std::unique_ptr<NodeProtocol> {
    return std::make_unique<BroadcastNode>(network, v, setup);
  };
}

std::vector<NodeIndex> intended_receivers(const Network& network, NodeIndex sender,
                                          SlotWindow window, std::optional<double> radius) {
  if (sender >= network.size()) throw std::invalid_argument("unknown sender");
  const double r = radius.value_or(network.r_bcast(sender));
  std::vector<NodeIndex> out;
  for (NodeIndex u = 0; u < network.size(); ++u) {
    if (u == sender || network.distance(sender, u) > r) continue;
    const Node& node = network.node(u);
    const bool awake_throughout = node.wake_slot <= window.begin &&
                                  (!node.sleep_slot || *node.sleep_slot >= window.end);
    if (awake_throughout) out.push_back(u);
  }
  return out;
}

std::optional<Slot> local_broadcast_completion_slot(const SimTrace& trace, const Network& network,
                                                    NodeIndex sender, SlotWindow window,
                                                    std::optional<double> radius) {
  const auto receivers = intended_receivers(network, sender, window, radius);
  std::map<NodeIndex, Slot> first;
  for (NodeIndex u : receivers) first[u] = kNever;
  std::size_t missing = receivers.size();
  if (missing == 0) return window.begin;
  for (const auto& o : trace.outcomes) {
    if (o.slot < window.begin || o.slot >= window.end) continue;
    for (const auto& r : o.receptions) {
      const auto& tx = o.transmissions[r.transmission];
      if (tx.sender != sender || tx.payload.kind != MessageKind::Broadcast) continue;
      auto it = first.find(r.listener);
      if (it != first.end() && it->second == kNever) {
        it->second = o.slot;
        if (--missing == 0) return o.slot;
      }
    }
  }
  return std::nullopt;
}

bool verify_local_broadcast(const SimTrace& trace, const Network& network, NodeIndex sender,
                            SlotWindow window, std::optional<double> radius) {
  return local_broadcast_completion_slot(trace, network, sender, window, radius).has_value();
}

SenderSuccessStats sender_success_stats(const SimTrace& trace, const Network& network,
                                        NodeIndex sender, SlotWindow window) {
  const auto receivers = intended_receivers(network, sender, window);
  const std::set<NodeIndex> wanted(receivers.begin(), receivers.end());
  SenderSuccessStats stats;
  for (const auto& o : trace.outcomes) {
    if (o.slot < window.begin || o.slot >= window.end) continue;
    for (std::size_t k = 0; k < o.transmissions.size(); ++k) {
      if (o.transmissions[k].sender != sender) continue;
      ++stats.transmissions;
      std::size_t heard = 0;
      for (const auto& r : o.receptions) {
        if (r.transmission == k && wanted.count(r.listener)) ++heard;
      }
      if (heard == wanted.size()) ++stats.full_successes;
    }
  }
  return stats;
}

}  // namespace sinrnet
