// Slotted SINR resolution and the deterministic simulation loop.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sinrnet/model.hpp"
#include "sinrnet/rng.hpp"

namespace sinrnet {

enum class MessageKind : std::uint8_t {
  Broadcast,   // local-broadcast token
  LearnReq,    // neighborhood learning request
  LearnReply,  // reply to a learning request (target = requester)
  LearnAck,    // acknowledgement of a reply (target = replier)
  Compete,     // M_A^i(v, c_v): color = i, value = counter
  Colored,     // M_C^i(v): color = i
  Request,     // M_R^v(w): target = leader
  Serve,       // M_S^target(j): value = j, color = serving leader's color
};

std::string_view to_string(MessageKind kind);

/// Payload of one transmission. The engine copies it and never inspects it.
struct Message {
  MessageKind kind = MessageKind::Broadcast;
  NodeIndex origin = 0;
  NodeIndex target = 0;
  std::int64_t color = 0;
  std::int64_t value = 0;

  bool operator==(const Message&) const = default;
};

struct Transmission {
  NodeIndex sender = 0;
  Slot slot = 0;
  double power = 0.0;
  Message payload;

  bool operator==(const Transmission&) const = default;
};

struct Reception {
  NodeIndex listener = 0;
  /// Index into SlotOutcome::transmissions.
  std::size_t transmission = 0;

  bool operator==(const Reception&) const = default;
};

struct SlotOutcome {
  Slot slot = 0;
  std::vector<Transmission> transmissions;
  std::vector<Reception> receptions;

  bool operator==(const SlotOutcome&) const = default;
};

/// A transmitter as seen by a listener.
struct Emitter {
  Vec2 position;
  double power = 0.0;
};

/// SINR test with the true α, β, N. Throws std::invalid_argument when the
/// listener coincides with the sender or an interferer.
bool sinr_check(const Emitter& sender, Vec2 listener, std::span<const Emitter> interferers,
                const NetworkParams& params);

/// Resolves one slot: every awake, non-transmitting node receives each
/// transmission whose SINR (all other transmitters interfering) reaches β.
/// A listener decoding two transmissions at once decodes neither.
SlotOutcome resolve_slot(const Network& network, Slot slot,
                         std::span<const Transmission> transmissions);

/// Message delivered to a node at the slot after it was sent.
struct InboxEntry {
  NodeIndex sender = 0;
  Slot sent_slot = 0;
  Message message;
};

struct Emission {
  Message payload;
  double power = 0.0;
};

struct ProtocolEvent {
  Slot slot = 0;
  NodeIndex node = 0;
  std::string kind;
  std::int64_t value = 0;

  bool operator==(const ProtocolEvent&) const = default;
};

class StepContext {
 public:
  StepContext(Slot slot, NodeIndex node, Rng& rng, std::vector<ProtocolEvent>* events)
      : slot_(slot), node_(node), rng_(rng), events_(events) {}

  Slot slot() const { return slot_; }
  NodeIndex node() const { return node_; }
  Rng& rng() { return rng_; }
  void log(std::string_view kind, std::int64_t value = 0) {
    if (events_) events_->push_back({slot_, node_, std::string(kind), value});
  }

 private:
  Slot slot_;
  NodeIndex node_;
  Rng& rng_;
  std::vector<ProtocolEvent>* events_;
};

/// Per-node protocol state machine. The engine steps a node at the slots it
/// reports through next_event() and at any slot whose inbox is non-empty; at
/// all other slots the node listens. Randomised per-slot decisions are drawn
/// ahead as geometric skips, which is distributionally the same as an
/// independent coin per slot.
class NodeProtocol {
 public:
  virtual ~NodeProtocol() = default;

  virtual std::optional<Emission> step(StepContext& ctx, std::span<const InboxEntry> inbox) = 0;
  /// Next slot strictly after the last step that needs a step, or kNever.
  virtual Slot next_event() const = 0;
  /// Upper bound on this node's per-slot transmission probability right now.
  virtual double transmit_probability() const = 0;
  /// True when the node has nothing left to do; the run ends once every
  /// node is finished.
  virtual bool finished() const = 0;
};

using ProtocolFactory =
    std::function<std::unique_ptr<NodeProtocol>(const Network&, NodeIndex)>;

enum class TraceLevel : std::uint8_t {
  None,        // only protocol events and final states
  Receptions,  // plus every transmission and reception
};

/// Checks Σ_{w ∈ B_v ∪ {v}} p_w ≤ cap for every region after each change.
struct ProbabilityMonitor {
  double cap = 1.0;
};

struct SimConfig {
  Slot max_slots = 1;
  std::uint64_t seed = 0;
  TraceLevel trace = TraceLevel::None;
  bool log_events = true;
  std::optional<ProbabilityMonitor> monitor;
};

struct ProbabilityViolation {
  Slot slot = 0;
  NodeIndex region = 0;
  double sum = 0.0;
};

struct SimTrace {
  std::uint64_t seed = 0;
  /// Slots with at least one transmission (TraceLevel::Receptions only).
  std::vector<SlotOutcome> outcomes;
  std::vector<ProtocolEvent> events;
  Slot end_slot = 0;
  bool all_finished = false;
  std::uint64_t transmissions = 0;
  std::uint64_t receptions = 0;
  double max_region_sum = 0.0;
  std::vector<ProbabilityViolation> violations;
};

/// Result of a run: the trace plus the final protocol objects so callers can
/// read protocol-specific final state.
struct SimRun {
  SimTrace trace;
  std::vector<std::unique_ptr<NodeProtocol>> protocols;
};

/// Runs slots [0, max_slots). Deterministic in (network, factory, config).
/// An exception from a step is rethrown as ProtocolViolation naming node
/// and slot.
SimRun run_simulation(const Network& network, const ProtocolFactory& factory,
                      const SimConfig& config);

/// Line-delimited JSON records {slot, sender, listener?, kind}.
void write_trace_lines(std::ostream& out, const Network& network, const SimTrace& trace);

}  // namespace sinrnet
