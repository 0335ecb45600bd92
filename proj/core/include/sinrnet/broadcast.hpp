// Local-broadcasting protocols as slot-stepped state machines, plus the
// success verifier.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "sinrnet/analysis.hpp"
#include "sinrnet/engine.hpp"
#include "sinrnet/model.hpp"
#include "sinrnet/rng.hpp"

namespace sinrnet {

// --- fixed probability (Δ known) ------------------------------------------

struct FixedProbState {
  double p = 0.0;
  Slot budget = 1;
  Message payload;
  double power = 1.0;

  Slot start = -1;
  Slot next_tx = kNever;
  Slot elapsed = 0;

  bool complete() const { return elapsed >= budget; }
  Slot last_slot() const { return start + budget - 1; }
};

/// Transmits with probability p for `budget` slots starting at the first
/// call. Throws ProtocolViolation once the budget is spent.
std::optional<Emission> fixed_step(FixedProbState& state, Slot slot, Rng& rng);

// --- slow start (Δ unknown) -------------------------------------------------

struct SlowStartState {
  double p_cap = 0.0;
  double p_init = 0.0;
  Slot phase_len = 1;
  Slot cap_slots_needed = 1;
  Slot global_budget = 1;
  Message payload;
  double power = 1.0;

  double p_cur = 0.0;
  Slot start = -1;
  Slot cursor = 0;         // first slot not yet accounted for
  Slot next_boundary = 0;  // next phase end
  Slot slots_at_cap = 0;
  Slot next_tx = kNever;
  double sampled_p = -1.0;
  std::int64_t halvings = 0;
  bool complete = false;
};

/// One slot: applies elapsed phase ends (doubling, capped at p_cap), halves
/// on any reception in `received`, then transmits with p_cur. Completes after
/// cap_slots_needed slots at p_cap or when the global budget elapses.
std::optional<Emission> slowstart_step(SlowStartState& state, Slot slot, std::size_t received,
                                       Rng& rng);

// --- variable power ---------------------------------------------------------

/// Piecewise-constant power over [0, length) relative to the node's start;
/// a level of 0 means the node is silent in those slots.
struct PowerSchedule {
  struct Level {
    Slot begin = 0;
    double power = 0.0;
  };
  std::vector<Level> levels;  // sorted by begin, first begin == 0
  Slot length = 0;

  double power_at(Slot offset) const;
  /// First offset > `offset` where the power may change (or length).
  Slot next_change(Slot offset) const;

  static PowerSchedule constant(double power, Slot length);
  /// `high` for the first ⌈high_fraction·length⌉ slots, then `low`.
  static PowerSchedule two_level(double high, double low, double high_fraction, Slot length);
};

struct VarPowerState {
  double p = 0.0;
  PowerSchedule schedule;
  double power_lo = 0.0;
  double power_hi = 0.0;
  Message payload;

  Slot start = -1;
  Slot cursor = 0;
  Slot next_tx = kNever;
  PowerTrace trace;

  bool complete(Slot slot) const { return start >= 0 && slot - start >= schedule.length; }
};

/// Transmit decision with probability p at power schedule(slot); the slot is
/// recorded in the PowerTrace. Throws ProtocolViolation if the schedule
/// leaves [power_lo, power_hi].
std::optional<Emission> varpower_step(VarPowerState& state, Slot slot, Rng& rng);

// --- configuration and engine adapters -------------------------------------

enum class BroadcastProtocol { Fixed, SlowStart, VarPower };

const char* to_string(BroadcastProtocol protocol);
BroadcastProtocol parse_broadcast_protocol(const std::string& name);

struct BroadcastOptions {
  /// Upper bound ñ on n known to slow-start nodes; 0 means ñ = n.
  std::size_t n_estimate = 0;
  /// Constant C of the slow-start global budget.
  double slowstart_constant = 64.0;
  /// Variable power: interval length as a multiple of the whp budget and the
  /// share of it spent at the node's full power.
  double varpower_interval_factor = 2.5;
  double varpower_high_fraction = 0.5;
  /// Low level as a fraction of the node's power (clamped to the network's
  /// minimum power).
  double varpower_low_ratio = 0.25;
};

struct BroadcastSetup {
  BroadcastProtocol protocol = BroadcastProtocol::Fixed;
  BroadcastOptions options;
  double gamma = 0.0;
  /// Fixed / variable power: γ/Δ. Slow start: γ/16.
  double p = 0.0;
  /// Slots each node runs (fixed: whp budget; slow start: global budget;
  /// variable power: interval length).
  Slot budget = 1;
  Slot phase_len = 1;
  Slot cap_slots_needed = 1;
  double p_init = 0.0;
};

BroadcastSetup make_broadcast_setup(const Network& network, BroadcastProtocol protocol,
                                    const BroadcastOptions& options = {});

/// Per-node state machine wrapping one of the three step functions.
class BroadcastNode final : public NodeProtocol {
 public:
  BroadcastNode(const Network& network, NodeIndex self, const BroadcastSetup& setup);

  std::optional<Emission> step(StepContext& ctx, std::span<const InboxEntry> inbox) override;
  Slot next_event() const override;
  double transmit_probability() const override;
  bool finished() const override;

  BroadcastProtocol protocol() const { return setup_.protocol; }
  const FixedProbState& fixed() const { return fixed_; }
  const SlowStartState& slowstart() const { return slow_; }
  const VarPowerState& varpower() const { return var_; }

 private:
  BroadcastSetup setup_;
  FixedProbState fixed_;
  SlowStartState slow_;
  VarPowerState var_;
  Slot last_step_ = -1;
};

ProtocolFactory broadcast_factory(const BroadcastSetup& setup);

// --- verification -----------------------------------------------------------

struct SlotWindow {
  Slot begin = 0;
  Slot end = 0;  // exclusive
};

/// Intended receivers of v: nodes within `radius` (default r_bcast(v)) that
/// are awake for the whole window.
std::vector<NodeIndex> intended_receivers(const Network& network, NodeIndex sender,
                                          SlotWindow window, std::optional<double> radius = {});

/// True iff every intended receiver decoded at least one of v's broadcast
/// transmissions inside the window. Needs a trace recorded with
/// TraceLevel::Receptions. Throws std::invalid_argument for unknown senders.
bool verify_local_broadcast(const SimTrace& trace, const Network& network, NodeIndex sender,
                            SlotWindow window, std::optional<double> radius = {});

/// Slot by which every intended receiver had decoded v at least once.
std::optional<Slot> local_broadcast_completion_slot(const SimTrace& trace, const Network& network,
                                                    NodeIndex sender, SlotWindow window,
                                                    std::optional<double> radius = {});

struct SenderSuccessStats {
  std::int64_t transmissions = 0;
  /// Transmissions decoded by every intended receiver in the same slot.
  std::int64_t full_successes = 0;
};

SenderSuccessStats sender_success_stats(const SimTrace& trace, const Network& network,
                                        NodeIndex sender, SlotWindow window);

}  // namespace sinrnet
