#include "sinrnet/coloring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sinrnet/analysis.hpp"

namespace sinrnet {

namespace {

std::int64_t ceil_int(double x) { return static_cast<std::int64_t>(std::ceil(x - 1e-9)); }

Slot round_of(Slot slot) { return slot / 2; }

Slot saturating_add(Slot a, Slot b) {
  if (a == kNever || b == kNever || a > kNever - b) return kNever;
  return a + b;
}

}  // namespace

std::int64_t ColoringConstants::color_bound() const {
  return leader_max + 1 + request_interval * (static_cast<std::int64_t>(delta) + 1);
}

ColoringConstants coloring_constants(const Network& network) {
  const NetworkParams& params = network.params();
  const double g2 = network.gamma_ratio() * network.gamma_ratio();
  ColoringConstants k;
  k.gamma = gamma_bound(network);
  k.delta = network.delta_max();
  k.p_s = k.gamma / (2.0 * k.delta);
  k.p_l = k.gamma / (18.0 * g2);
  k.kappa_s = whp_slot_budget(k.p_s, params, network.size());
  k.kappa_l = whp_slot_budget(k.p_l, params, network.size());
  k.leader_max = ceil_int(9.0 * g2);
  k.request_interval = ceil_int(38.0 * g2);
  k.listen_len = (k.request_interval + 3) * k.kappa_s;
  k.t1 = k.listen_len;
  return k;
}

std::int64_t chi(std::span<const std::int64_t> d, std::int64_t zeta) {
  std::int64_t x = 0;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::int64_t v : d) {
      if (x >= v - zeta && x <= v + zeta) {
        x = v - zeta - 1;
        moved = true;
      }
    }
  }
  return x;
}

Slot coloring_termination_budget(const ColoringConstants& k, const Network& network) {
  const Slot ks = k.kappa_s;
  const Slot kl = k.kappa_l;
  const Slot g38 = k.request_interval;
  const Slot delta = k.delta;
  const Slot g120 = ceil_int(120.0 * network.gamma_ratio() * network.gamma_ratio());
  const Slot learning = (2 * delta + 1) * ks;
  const Slot per_level = ks + (3 * ks + delta * kl) + ((g38 + 4) * ks + delta * kl) +
                         (g38 * g38 + g120) * ks + (kl + ks);
  const Slot rounds = learning + k.listen_len + (network.ell() + 1) * per_level;
  return 2 * rounds + 2;
}

const char* to_string(ColoringPhase phase) {
  switch (phase) {
    case ColoringPhase::Learning: return "learning";
    case ColoringPhase::Wait: return "wait";
    case ColoringPhase::Compete: return "compete";
    case ColoringPhase::Request: return "request";
    case ColoringPhase::Announce: return "announce";
    case ColoringPhase::Colored: return "colored";
  }
  return "unknown";
}

ColoringNode::ColoringNode(const Network& network, NodeIndex self,
                           std::shared_ptr<const ColoringSetup> setup)
    : network_(network),
      self_(self),
      setup_(std::move(setup)),
      k_(setup_->constants),
      mis_(setup_->options.mode == ColoringMode::Mis),
      wake_(network.node(self).wake_slot) {
  learning_end_ = wake_ + rounds((2 * k_.delta + 1) * k_.kappa_s);
  tasks_.push_back({MessageKind::LearnReq, self_});
  for (const auto& [node, slot] : setup_->options.forced_resignations) {
    if (node == self_) forced_.push_back(slot);
  }
  std::sort(forced_.begin(), forced_.end());
}

std::optional<std::int64_t> ColoringNode::color() const {
  if (phase_ != ColoringPhase::Colored) return std::nullopt;
  return color_;
}

bool ColoringNode::leader_phase() const {
  const bool holding = phase_ == ColoringPhase::Colored || phase_ == ColoringPhase::Announce;
  return holding && !mis_ && k_.is_leader_color(color_);
}

bool ColoringNode::is_leader() const {
  if (phase_ != ColoringPhase::Colored) return false;
  return mis_ ? color_ == 0 : k_.is_leader_color(color_);
}

std::vector<NodeIndex> ColoringNode::dominators() const {
  std::vector<NodeIndex> out;
  for (NodeIndex w : in_) {
    if (!out_.count(w) && !pending_.count(w)) out.push_back(w);
  }
  return out;
}

Slot ColoringNode::align(Slot s, bool core) const {
  return core_slot(s) == core ? s : s + 1;
}

void ColoringNode::resample(Channel& ch, Slot from, bool core, Rng& rng) const {
  if (!(ch.q > 0.0)) {
    ch.next = kNever;
    return;
  }
  const Slot skip = rng.geometric_failures(ch.q);
  ch.next = saturating_add(align(from, core), skip == kNever || skip > kNever / 4 ? kNever : 2 * skip);
}

void ColoringNode::set_core(double q, Rng& rng) {
  core_.q = q;
  resample(core_, now_, true, rng);
}

std::int64_t ColoringNode::zeta() const { return color_ == 0 ? k_.kappa_l : k_.kappa_s; }

std::int64_t ColoringNode::counter() const { return counter_offset_ + round_of(now_); }

std::optional<Emission> ColoringNode::step(StepContext& ctx, std::span<const InboxEntry> inbox) {
  now_ = ctx.slot();
  for (const auto& entry : inbox) receive(ctx, entry);
  run_timers(ctx);
  auto out = transmit(ctx);
  last_step_ = now_;
  return out;
}

void ColoringNode::learn_about(NodeIndex w) {
  if (!in_.insert(w).second) return;
  if (!out_.count(w)) pending_[w] = now_ + rounds((2 * k_.delta + 2) * k_.kappa_s);
}

void ColoringNode::note_color(NodeIndex w, std::int64_t color) {
  known_[w] = {color, now_ + rounds(setup_->options.known_expiry_windows * k_.kappa_s)};
}

bool ColoringNode::known_colored(NodeIndex w) const {
  auto it = known_.find(w);
  return it != known_.end() && it->second.expires > now_;
}

bool ColoringNode::uncolored_core() const {
  return phase_ == ColoringPhase::Compete || phase_ == ColoringPhase::Request;
}

void ColoringNode::receive(StepContext& ctx, const InboxEntry& entry) {
  const NodeIndex w = entry.sender;
  // Link-layer filter: only messages from in-neighbors are accepted.
  if (!network_.has_edge(w, self_)) return;
  const Message& m = entry.message;
  learn_about(w);

  switch (m.kind) {
    case MessageKind::LearnReq:
      if (replied_.insert(w).second) tasks_.push_back({MessageKind::LearnReply, w});
      break;
    case MessageKind::LearnReply:
      if (m.target == self_) {
        out_.insert(w);
        pending_.erase(w);
        if (acked_.insert(w).second) tasks_.push_back({MessageKind::LearnAck, w});
      }
      break;
    case MessageKind::LearnAck:
      if (m.target == self_) {
        out_.insert(w);
        pending_.erase(w);
      }
      break;
    case MessageKind::Compete:
      if (phase_ == ColoringPhase::Compete && m.color == color_) {
        const std::int64_t offset = m.value - round_of(entry.sent_slot);
        offsets_[w] = offset;
        if (active_ && std::abs(counter_offset_ - offset) <= zeta()) compete_reset(ctx);
      }
      break;
    case MessageKind::Colored:
      note_color(w, m.color);
      on_colored_message(ctx, w, m.color);
      break;
    case MessageKind::Request:
      if (!mis_ && leader_phase() && m.target == self_ && serving_ != w &&
          std::find(queue_.begin(), queue_.end(), w) == queue_.end()) {
        queue_.push_back(w);
      }
      break;
    case MessageKind::Serve:
      note_color(w, m.color);
      if (phase_ == ColoringPhase::Request && m.target == self_ && w == leader_) {
        ctx.log("assigned", m.value);
        enter_compete(ctx, m.value);
      }
      break;
    case MessageKind::Broadcast:
      break;
  }
}

void ColoringNode::on_colored_message(StepContext& ctx, NodeIndex w, std::int64_t color) {
  const bool dominator = !out_.count(w) && !pending_.count(w);
  if (mis_) {
    if (color != 0) return;
    if (phase_ == ColoringPhase::Wait || uncolored_core()) {
      enter_colored(ctx, 1);
    } else if (phase_ == ColoringPhase::Colored && color_ == 0 && dominator) {
      ++metrics_.resigned_count;
      ctx.log("resign", 0);
      enter_colored(ctx, 1);
    }
    return;
  }
  switch (phase_) {
    case ColoringPhase::Compete:
      if (color_ == 0) {
        if (k_.is_leader_color(color) && out_.count(w)) enter_request(ctx, w);
      } else if (color == color_) {
        enter_compete(ctx, color_ + 1);
      }
      break;
    case ColoringPhase::Colored:
      if (color == color_ && dominator) {
        if (serving_) {
          resign_pending_ = true;
        } else {
          resign(ctx);
        }
      }
      break;
    default:
      break;
  }
}

void ColoringNode::advance_tasks(Rng& rng) {
  if (task_ && now_ >= task_end_) task_.reset();
  if (!task_ && !tasks_.empty()) {
    task_ = tasks_.front();
    tasks_.pop_front();
    task_end_ = now_ + rounds(k_.kappa_s);
    learn_.q = k_.p_s;
    resample(learn_, now_, false, rng);
  }
  if (!task_) {
    task_end_ = kNever;
    learn_.q = 0.0;
    learn_.next = kNever;
  }
}

void ColoringNode::decide_pending(StepContext& ctx) {
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (it->second > now_) {
      ++it;
      continue;
    }
    const NodeIndex w = it->first;
    it = pending_.erase(it);
    ctx.log("dominator", network_.node(w).id);
    if (uncolored_core() && !known_colored(w)) enter_wait(ctx, now_ + rounds(k_.kappa_s));
  }
}

void ColoringNode::run_timers(StepContext& ctx) {
  for (int guard = 0;; ++guard) {
    if (guard > 1000) throw ProtocolViolation("coloring timers did not settle");
    const ColoringPhase before = phase_;
    const Slot deadline_before = deadline_;
    advance_tasks(ctx.rng());
    decide_pending(ctx);

    if (phase_ == ColoringPhase::Learning && now_ >= learning_end_) {
      enter_wait(ctx, now_ + rounds(k_.listen_len));
    }
    if (phase_ == ColoringPhase::Request && now_ >= request_tx_end_) {
      request_tx_end_ = kNever;
      set_core(0.0, ctx.rng());
    }
    if (phase_ == ColoringPhase::Colored && !serving_ && !queue_.empty() && now_ >= serve_from_) {
      start_service(ctx);
    }
    if (phase_ == ColoringPhase::Colored && !forced_.empty() && forced_.front() <= now_) {
      forced_.erase(forced_.begin());
      ctx.log("forced_resign");
      if (serving_) {
        resign_pending_ = true;
      } else {
        resign(ctx);
      }
    }

    if (deadline_ <= now_) {
      switch (phase_) {
        case ColoringPhase::Learning:
          deadline_ = kNever;
          break;
        case ColoringPhase::Wait:
          wait_test(ctx);
          break;
        case ColoringPhase::Compete:
          if (!active_) {
            compete_activate(ctx);
          } else if (counter() > k_.kappa_s) {
            compete_win(ctx);
          } else {
            schedule_win();
          }
          break;
        case ColoringPhase::Request:
          ++metrics_.request_timeouts;
          ctx.log("request_timeout", network_.node(leader_).id);
          enter_wait(ctx, now_ + rounds(k_.kappa_s));
          break;
        case ColoringPhase::Announce:
          if (announce_stage_ == 0) {
            announce_stage_ = 1;
            set_core(k_.p_s, ctx.rng());
            deadline_ = now_ + rounds(k_.kappa_s);
          } else {
            enter_colored(ctx, color_);
          }
          break;
        case ColoringPhase::Colored:
          deadline_ = kNever;
          if (serving_) {
            serving_.reset();
            set_core(k_.p_s, ctx.rng());
            if (resign_pending_) resign(ctx);
          }
          break;
      }
    }
    if (phase_ == before && deadline_ == deadline_before && (deadline_ > now_) &&
        !(task_ && now_ >= task_end_) &&
        !(phase_ == ColoringPhase::Colored && !serving_ && !queue_.empty() && now_ >= serve_from_)) {
      break;
    }
  }
}

void ColoringNode::enter_wait(StepContext& ctx, Slot test_at) {
  phase_ = ColoringPhase::Wait;
  active_ = false;
  offsets_.clear();
  consecutive_ = 0;
  request_tx_end_ = kNever;
  set_core(0.0, ctx.rng());
  deadline_ = test_at;
  ctx.log("wait");
}

void ColoringNode::wait_test(StepContext& ctx) {
  for (NodeIndex d : dominators()) {
    if (!known_colored(d)) {
      deadline_ = now_ + rounds(k_.kappa_s);
      return;
    }
  }
  if (mis_) {
    for (NodeIndex w : in_) {
      if (known_colored(w) && known_.at(w).color == 0) {
        enter_colored(ctx, 1);
        return;
      }
    }
    enter_compete(ctx, 0);
    return;
  }
  std::optional<NodeIndex> leader;
  for (NodeIndex w : in_) {
    if (!out_.count(w) || !known_colored(w) || !k_.is_leader_color(known_.at(w).color)) continue;
    if (!leader || network_.node(w).id < network_.node(*leader).id) leader = w;
  }
  if (leader) {
    enter_request(ctx, *leader);
  } else {
    enter_compete(ctx, 0);
  }
}

void ColoringNode::enter_compete(StepContext& ctx, std::int64_t i) {
  phase_ = ColoringPhase::Compete;
  color_ = i;
  offsets_.clear();
  active_ = false;
  request_tx_end_ = kNever;
  set_core(0.0, ctx.rng());
  deadline_ = now_ + rounds(k_.kappa_s);
  ++metrics_.competes_visited;
  consecutive_ = i > 0 ? consecutive_ + 1 : 0;
  metrics_.max_consecutive_competes = std::max(metrics_.max_consecutive_competes, consecutive_);
  ctx.log("compete", i);
}

void ColoringNode::take_counter(std::int64_t value) {
  counter_offset_ = value - round_of(now_);
  auto& floor = color_ == 0 ? metrics_.min_counter_leader : metrics_.min_counter_other;
  floor = std::min(floor, value);
  schedule_win();
}

std::int64_t ColoringNode::chi_now() const {
  std::vector<std::int64_t> d;
  d.reserve(offsets_.size());
  for (const auto& [w, offset] : offsets_) d.push_back(offset + round_of(now_));
  return chi(d, zeta());
}

void ColoringNode::schedule_win() {
  // First core slot whose round puts the counter above κ_s.
  const Slot target_round = k_.kappa_s - counter_offset_ + 1;
  deadline_ = align(std::max(now_ + 1, 2 * target_round), true);
}

void ColoringNode::compete_activate(StepContext& ctx) {
  active_ = true;
  take_counter(chi_now());
  set_core(k_.p_s, ctx.rng());
}

void ColoringNode::compete_reset(StepContext& ctx) {
  take_counter(chi_now());
  ctx.log("reset", counter());
}

void ColoringNode::compete_win(StepContext& ctx) {
  if (mis_) {
    enter_announce(ctx, 0);
    return;
  }
  std::set<std::int64_t> taken;
  for (NodeIndex w : in_) {
    if (known_colored(w)) taken.insert(known_.at(w).color);
  }
  if (color_ > 0) {
    if (taken.count(color_)) {
      enter_compete(ctx, color_ + 1);
    } else {
      enter_announce(ctx, color_);
    }
    return;
  }
  for (std::int64_t j = 0; j <= k_.leader_max; ++j) {
    if (!taken.count(j)) {
      enter_announce(ctx, j);
      return;
    }
  }
  ctx.log("no_leader_color");
  enter_wait(ctx, now_ + rounds(k_.kappa_s));
}

void ColoringNode::enter_request(StepContext& ctx, NodeIndex leader) {
  phase_ = ColoringPhase::Request;
  leader_ = leader;
  active_ = false;
  consecutive_ = 0;
  set_core(k_.p_s, ctx.rng());
  request_tx_end_ = now_ + rounds(k_.kappa_s);
  deadline_ = now_ + rounds((k_.request_interval + 4) * k_.kappa_s + k_.delta * k_.kappa_l);
  ctx.log("request", network_.node(leader).id);
}

void ColoringNode::enter_announce(StepContext& ctx, std::int64_t color) {
  phase_ = ColoringPhase::Announce;
  color_ = color;
  active_ = false;
  announce_stage_ = 0;
  const bool leader = mis_ ? color == 0 : k_.is_leader_color(color);
  set_core(leader ? k_.p_l : k_.p_s, ctx.rng());
  deadline_ = now_ + rounds(leader ? k_.kappa_l : k_.kappa_s);
  ctx.log("announce", color);
}

void ColoringNode::enter_colored(StepContext& ctx, std::int64_t color) {
  phase_ = ColoringPhase::Colored;
  color_ = color;
  active_ = false;
  consecutive_ = 0;
  request_tx_end_ = kNever;
  deadline_ = kNever;
  serving_.reset();
  resign_pending_ = false;
  serve_from_ = !mis_ && k_.is_leader_color(color) ? now_ + rounds(k_.t1) : kNever;
  set_core(k_.p_s, ctx.rng());
  metrics_.colored_at = now_;
  ctx.log("colored", color);
}

void ColoringNode::resign(StepContext& ctx) {
  ++metrics_.resigned_count;
  metrics_.colored_at = -1;
  ctx.log("resign", color_);
  serving_.reset();
  queue_.clear();
  resign_pending_ = false;
  serve_from_ = kNever;
  enter_wait(ctx, now_ + rounds(k_.kappa_s));
}

void ColoringNode::start_service(StepContext& ctx) {
  const NodeIndex r = queue_.front();
  queue_.pop_front();
  auto it = reuse_.find(r);
  if (it == reuse_.end()) it = reuse_.emplace(r, ++serve_count_ * k_.request_interval).first;
  serving_ = r;
  serving_color_ = it->second;
  ++metrics_.served;
  set_core(k_.p_l, ctx.rng());
  deadline_ = now_ + rounds(k_.kappa_l);
  ctx.log("serve", serving_color_);
}

std::optional<Emission> ColoringNode::transmit(StepContext& ctx) {
  const double power = network_.node(self_).power;
  if (core_slot(now_)) {
    if (core_.next != now_) return std::nullopt;
    resample(core_, now_ + 1, true, ctx.rng());
    Message m{MessageKind::Colored, self_, self_, color_, 0};
    switch (phase_) {
      case ColoringPhase::Compete:
        m.kind = MessageKind::Compete;
        m.value = counter();
        break;
      case ColoringPhase::Request:
        m.kind = MessageKind::Request;
        m.target = leader_;
        break;
      case ColoringPhase::Announce:
        break;
      case ColoringPhase::Colored:
        if (serving_) {
          m.kind = MessageKind::Serve;
          m.target = *serving_;
          m.value = serving_color_;
        }
        break;
      default:
        return std::nullopt;
    }
    return Emission{m, power};
  }
  if (!task_ || learn_.next != now_) return std::nullopt;
  resample(learn_, now_ + 1, false, ctx.rng());
  return Emission{Message{task_->kind, self_, task_->target, 0, 0}, power};
}

Slot ColoringNode::next_event() const {
  Slot next = std::min({core_.next, learn_.next, task_end_, deadline_});
  if (phase_ == ColoringPhase::Learning) next = std::min(next, learning_end_);
  if (phase_ == ColoringPhase::Request) next = std::min(next, request_tx_end_);
  if (phase_ == ColoringPhase::Colored && !serving_ && !queue_.empty()) {
    next = std::min(next, serve_from_);
  }
  if (!forced_.empty() && forced_.front() > last_step_) next = std::min(next, forced_.front());
  for (const auto& [w, at] : pending_) next = std::min(next, at);
  return std::max(next, last_step_ + 1);
}

double ColoringNode::transmit_probability() const {
  return std::max(core_.q, task_ ? learn_.q : 0.0);
}

bool ColoringNode::finished() const {
  return phase_ == ColoringPhase::Colored && !serving_ && queue_.empty() && !task_ &&
         tasks_.empty() && forced_.empty() && !resign_pending_;
}

ProtocolFactory coloring_factory(std::shared_ptr<const ColoringSetup> setup) {
  return [setup](const Network& network, NodeIndex v) -> std::unique_ptr<NodeProtocol> {
    return std::make_unique<ColoringNode>(network, v, setup);
  };
}

ColoringOutcome collect_coloring(const SimRun& run) {
  ColoringOutcome out;
  for (const auto& proto : run.protocols) {
    const auto* node = dynamic_cast<const ColoringNode*>(proto.get());
    if (!node) throw std::invalid_argument("collect_coloring: run did not use coloring nodes");
    out.colors.push_back(node->color());
    out.metrics.push_back(node->metrics());
    out.reuse_tables.push_back(node->reuse_table());
  }
  return out;
}

}  // namespace sinrnet
