// Static network description: geometry, powers, ranges and the directed
// communication graph.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sinrnet {

using Slot = std::int64_t;
using NodeId = std::int64_t;
using NodeIndex = std::uint32_t;

inline constexpr Slot kNever = INT64_MAX;

/// Raised when a structural property that the model guarantees is violated
/// (for example a cycle of unidirectional links).
class ModelViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a protocol or the engine is driven outside its contract.
class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physical constants. The `*_true` values drive reception; nodes only know
/// the `[lo, hi]` bounds, which is what every range formula uses.
struct NetworkParams {
  double alpha_true = 3.0;
  double alpha_lo = 3.0;
  double alpha_hi = 3.0;
  double beta_true = 1.0;
  double beta_lo = 1.0;
  double beta_hi = 1.0;
  double noise_true = 1.0;
  double noise_lo = 1.0;
  double noise_hi = 1.0;
  double delta = 2.0;
  double c_whp = 2.0;
  /// Multiplies every slot-count constant. Values below 1 void the
  /// high-probability guarantees and exist for fast tests.
  double scale = 1.0;

  /// Throws std::invalid_argument naming the first broken constraint.
  void validate() const;

  bool operator==(const NetworkParams&) const = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

double distance(Vec2 a, Vec2 b);

struct Node {
  NodeId id = 0;
  Vec2 position;
  double power = 1.0;
  Slot wake_slot = 0;
  std::optional<Slot> sleep_slot;

  bool awake_at(Slot slot) const {
    return slot >= wake_slot && (!sleep_slot || slot < *sleep_slot);
  }
  bool operator==(const Node&) const = default;
};

/// R̄_v = (P / (N̄ β̄))^{1/ᾱ}
double max_transmission_range(double power, const NetworkParams& params);

/// R_v = (P / (δ N̄ β̄))^{1/α̲}
double broadcast_range(double power, const NetworkParams& params);

struct RingClass {
  bool proximity = false;
  /// Ring index i ≥ 2 when not in the proximity region.
  int ring = 0;

  static RingClass in_proximity() { return {true, 0}; }
  static RingClass in_ring(int i) { return {false, i}; }
  bool operator==(const RingClass&) const = default;
};

/// Immutable network with all derived quantities. Node indices are positions
/// in the construction order; node ids are only used for I/O and tie-breaks.
class Network {
 public:
  static Network build(std::vector<Node> nodes, const NetworkParams& params);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeIndex i) const { return nodes_[i]; }
  const NetworkParams& params() const { return params_; }
  std::optional<NodeIndex> index_of(NodeId id) const;

  double distance(NodeIndex a, NodeIndex b) const;
  double r_max(NodeIndex i) const { return r_max_[i]; }
  double r_bcast(NodeIndex i) const { return r_bcast_[i]; }
  double r_max_global() const { return r_max_global_; }
  double r_min_global() const { return r_min_global_; }
  double gamma_ratio() const { return r_max_global_ / r_min_global_; }
  double min_power() const { return min_power_; }
  double max_power() const { return max_power_; }

  /// Maximum number of nodes inside any node's closed r_max disc, the node
  /// itself included.
  int delta_max() const { return delta_max_; }
  /// Longest path over strictly unidirectional links.
  int ell() const { return ell_; }

  /// Sorted targets u with dist(v, u) <= r_bcast(v).
  const std::vector<NodeIndex>& out_edges(NodeIndex v) const { return out_[v]; }
  /// Sorted sources w with dist(w, v) <= r_bcast(w).
  const std::vector<NodeIndex>& in_edges(NodeIndex v) const { return in_[v]; }
  bool has_edge(NodeIndex from, NodeIndex to) const;
  bool bidirectional(NodeIndex a, NodeIndex b) const {
    return has_edge(a, b) && has_edge(b, a);
  }

 private:
  std::vector<Node> nodes_;
  NetworkParams params_;
  std::vector<double> r_max_;
  std::vector<double> r_bcast_;
  double r_max_global_ = 0.0;
  double r_min_global_ = 0.0;
  double min_power_ = 0.0;
  double max_power_ = 0.0;
  int delta_max_ = 0;
  int ell_ = 0;
  std::vector<std::vector<NodeIndex>> out_;
  std::vector<std::vector<NodeIndex>> in_;
};

/// ℓ: edges on the longest path of the unidirectional-link subgraph.
/// Throws ModelViolation if that subgraph has a cycle.
int longest_directed_path(const Network& network);

/// Proximity (< 3R̄) or ring C_i with (i+1)R̄ <= d <= (i+2)R̄, ties to the
/// smaller i.
RingClass ring_index(const Network& network, NodeIndex center, NodeIndex other);
RingClass ring_index_for_distance(double dist, double r_max_global);

}  // namespace sinrnet
