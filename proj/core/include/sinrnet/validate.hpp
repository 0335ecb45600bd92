// Post-hoc checks on final colorings and independent sets.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sinrnet/coloring.hpp"
#include "sinrnet/model.hpp"

namespace sinrnet {

struct ColoringVerdict {
  bool complete = false;
  std::vector<NodeIndex> uncolored;
  /// Linked node pairs (either direction) sharing a color.
  std::vector<std::pair<NodeIndex, NodeIndex>> conflicts;
  std::size_t distinct_colors = 0;
  std::int64_t color_bound = 0;
  bool within_bound = false;
  /// No bidirectional link between two leader-colored nodes.
  bool leaders_independent = false;
  /// Largest number of other leaders within r_max(v) / 2R̄ of a leader v, and
  /// the limits ⌈9Γ²⌉ / ⌈19Γ²⌉.
  std::size_t max_leaders_near = 0;
  std::size_t max_leaders_2r = 0;
  std::size_t leaders_near_limit = 0;
  std::size_t leaders_2r_limit = 0;

  bool valid() const { return complete && conflicts.empty(); }
  bool leader_density_ok() const {
    return max_leaders_near <= leaders_near_limit && max_leaders_2r <= leaders_2r_limit;
  }
  bool ok() const { return valid() && within_bound && leaders_independent && leader_density_ok(); }
};

ColoringVerdict validate_coloring(const Network& network,
                                  std::span<const std::optional<std::int64_t>> colors,
                                  const ColoringConstants& constants);

struct MisVerdict {
  bool complete = false;
  std::vector<NodeIndex> undecided;
  /// Linked member pairs.
  std::vector<std::pair<NodeIndex, NodeIndex>> adjacent_members;
  /// Non-members without an incoming link from a member.
  std::vector<NodeIndex> undominated;

  bool independent() const { return adjacent_members.empty(); }
  bool dominating() const { return undominated.empty(); }
  bool ok() const { return complete && independent() && dominating(); }
};

MisVerdict validate_mis(const Network& network, std::span<const std::optional<bool>> membership);

/// MIS membership from final MIS-mode colors (0 = member).
std::vector<std::optional<bool>> mis_membership(std::span<const std::optional<std::int64_t>> colors);

}  // namespace sinrnet
