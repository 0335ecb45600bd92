// Distributed coloring and MIS for heterogeneous-power networks, run as a
// per-node state machine under the slot engine.
//
// Time inside the protocol is counted in rounds of two slots. A node
// originates core messages on slots of even offset from its wake slot and
// learning-handshake messages on odd offsets. Durations below are in rounds.
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "sinrnet/engine.hpp"
#include "sinrnet/model.hpp"

namespace sinrnet {

enum class ColoringMode { Coloring, Mis };

struct ColoringConstants {
  double gamma = 0.0;
  double p_s = 0.0;
  double p_l = 0.0;
  Slot kappa_s = 1;
  Slot kappa_l = 1;
  int delta = 1;
  /// ⌈9Γ²⌉: leader colors are 0..leader_max.
  std::int64_t leader_max = 0;
  /// ⌈38Γ²⌉: spacing of non-leader colors handed out by a leader.
  std::int64_t request_interval = 1;
  /// (⌈38Γ²⌉ + 3)·κ_s, also the delay t₁ before a new leader serves.
  Slot listen_len = 1;
  Slot t1 = 1;

  std::int64_t leader_color_count() const { return leader_max + 1; }
  bool is_leader_color(std::int64_t color) const { return color >= 0 && color <= leader_max; }
  /// (⌈9Γ²⌉ + 1) + ⌈38Γ²⌉·(Δ + 1).
  std::int64_t color_bound() const;
};

ColoringConstants coloring_constants(const Network& network);

/// Largest x <= 0 outside every [d − ζ, d + ζ].
std::int64_t chi(std::span<const std::int64_t> d, std::int64_t zeta);

/// Upper bound in slots on the completion of a static-wake-up run (counted
/// from the latest wake slot).
Slot coloring_termination_budget(const ColoringConstants& k, const Network& network);

enum class ColoringPhase { Learning, Wait, Compete, Request, Announce, Colored };
const char* to_string(ColoringPhase phase);

struct ColoringOptions {
  ColoringMode mode = ColoringMode::Coloring;
  /// (node, slot): the node resigns its color at the first slot >= slot at
  /// which it is colored.
  std::vector<std::pair<NodeIndex, Slot>> forced_resignations;
  /// Known colors of neighbors expire after this many κ_s windows without a
  /// fresh announcement.
  Slot known_expiry_windows = 1;
};

struct ColoringSetup {
  ColoringConstants constants;
  ColoringOptions options;
};

struct ColoringMetrics {
  Slot colored_at = -1;
  std::int64_t competes_visited = 0;
  std::int64_t max_consecutive_competes = 0;
  std::int64_t resigned_count = 0;
  std::int64_t request_timeouts = 0;
  /// Smallest counter value taken in Compete(0) / Compete(i > 0).
  std::int64_t min_counter_leader = 0;
  std::int64_t min_counter_other = 0;
  std::int64_t served = 0;
};

class ColoringNode final : public NodeProtocol {
 public:
  ColoringNode(const Network& network, NodeIndex self, std::shared_ptr<const ColoringSetup> setup);

  std::optional<Emission> step(StepContext& ctx, std::span<const InboxEntry> inbox) override;
  Slot next_event() const override;
  double transmit_probability() const override;
  bool finished() const override;

  ColoringPhase phase() const { return phase_; }
  /// Color of the current Compete / Announce / Colored phase.
  std::int64_t phase_color() const { return color_; }
  std::optional<std::int64_t> color() const;
  bool is_leader() const;
  const ColoringMetrics& metrics() const { return metrics_; }
  const std::map<NodeIndex, std::int64_t>& reuse_table() const { return reuse_; }
  const std::set<NodeIndex>& in_set() const { return in_; }
  const std::set<NodeIndex>& out_set() const { return out_; }
  /// Decided dominators: In \ Out minus nodes still awaiting an ack.
  std::vector<NodeIndex> dominators() const;

 private:
  struct Channel {
    double q = 0.0;
    Slot next = kNever;
  };
  struct LearnTask {
    MessageKind kind = MessageKind::LearnReq;
    NodeIndex target = 0;
  };
  struct Known {
    std::int64_t color = 0;
    Slot expires = 0;
  };

  bool core_slot(Slot s) const { return ((s - wake_) & 1) == 0; }
  Slot rounds(Slot r) const { return 2 * r; }
  Slot align(Slot s, bool core) const;
  void resample(Channel& ch, Slot from, bool core, Rng& rng) const;
  void set_core(double q, Rng& rng);
  std::int64_t zeta() const;
  std::int64_t counter() const;

  void receive(StepContext& ctx, const InboxEntry& entry);
  void on_colored_message(StepContext& ctx, NodeIndex w, std::int64_t color);
  void advance_tasks(Rng& rng);
  void run_timers(StepContext& ctx);
  std::optional<Emission> transmit(StepContext& ctx);

  void learn_about(NodeIndex w);
  void note_color(NodeIndex w, std::int64_t color);
  bool known_colored(NodeIndex w) const;
  bool uncolored_core() const;
  /// Announcing or holding a leader color (requests are queued).
  bool leader_phase() const;
  void decide_pending(StepContext& ctx);

  void enter_wait(StepContext& ctx, Slot test_at);
  void wait_test(StepContext& ctx);
  void enter_compete(StepContext& ctx, std::int64_t i);
  void take_counter(std::int64_t value);
  std::int64_t chi_now() const;
  void schedule_win();
  void compete_activate(StepContext& ctx);
  void compete_reset(StepContext& ctx);
  void compete_win(StepContext& ctx);
  void enter_request(StepContext& ctx, NodeIndex leader);
  void enter_announce(StepContext& ctx, std::int64_t color);
  void enter_colored(StepContext& ctx, std::int64_t color);
  void resign(StepContext& ctx);
  void start_service(StepContext& ctx);

  const Network& network_;
  NodeIndex self_;
  std::shared_ptr<const ColoringSetup> setup_;
  const ColoringConstants& k_;
  bool mis_;
  Slot wake_;
  Slot now_ = -1;
  Slot last_step_ = -1;

  // learning handshake
  std::set<NodeIndex> in_;
  std::set<NodeIndex> out_;
  std::map<NodeIndex, Slot> pending_;  // heard, not yet known to hear us
  std::set<NodeIndex> replied_;
  std::set<NodeIndex> acked_;
  std::deque<LearnTask> tasks_;
  std::optional<LearnTask> task_;
  Slot task_end_ = kNever;
  Channel learn_;
  Slot learning_end_ = 0;

  std::map<NodeIndex, Known> known_;

  // core
  ColoringPhase phase_ = ColoringPhase::Learning;
  std::int64_t color_ = 0;
  Channel core_;
  Slot deadline_ = kNever;  // phase timer

  // compete
  std::map<NodeIndex, std::int64_t> offsets_;  // d_v(w) − round
  bool active_ = false;
  std::int64_t counter_offset_ = 0;  // c_v − round
  std::int64_t consecutive_ = 0;

  // request
  NodeIndex leader_ = 0;
  Slot request_tx_end_ = kNever;

  // announce
  int announce_stage_ = 0;

  // colored
  Slot serve_from_ = kNever;
  std::deque<NodeIndex> queue_;
  std::optional<NodeIndex> serving_;
  std::int64_t serving_color_ = 0;
  std::int64_t serve_count_ = 0;
  std::map<NodeIndex, std::int64_t> reuse_;
  bool resign_pending_ = false;
  std::vector<Slot> forced_;

  ColoringMetrics metrics_;
};

ProtocolFactory coloring_factory(std::shared_ptr<const ColoringSetup> setup);

/// Final per-node state collected from a finished run.
struct ColoringOutcome {
  std::vector<std::optional<std::int64_t>> colors;
  std::vector<ColoringMetrics> metrics;
  std::vector<std::map<NodeIndex, std::int64_t>> reuse_tables;
};

ColoringOutcome collect_coloring(const SimRun& run);

}  // namespace sinrnet
