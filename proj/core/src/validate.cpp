#include "sinrnet/validate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace sinrnet {

ColoringVerdict validate_coloring(const Network& network,
                                  std::span<const std::optional<std::int64_t>> colors,
                                  const ColoringConstants& constants) {
  if (colors.size() != network.size()) throw std::invalid_argument("validate_coloring: size mismatch");
  ColoringVerdict v;
  std::set<std::int64_t> distinct;
  std::vector<NodeIndex> leaders;
  for (NodeIndex a = 0; a < network.size(); ++a) {
    if (!colors[a]) {
      v.uncolored.push_back(a);
      continue;
    }
    distinct.insert(*colors[a]);
    if (constants.is_leader_color(*colors[a])) leaders.push_back(a);
    for (NodeIndex b : network.out_edges(a)) {
      if (!colors[b] || *colors[a] != *colors[b]) continue;
      // Report each pair once.
      if (a < b || !network.has_edge(b, a)) v.conflicts.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  v.complete = v.uncolored.empty();
  v.distinct_colors = distinct.size();
  v.color_bound = constants.color_bound();
  v.within_bound = static_cast<std::int64_t>(v.distinct_colors) <= v.color_bound;

  v.leaders_independent = true;
  const double g2 = network.gamma_ratio() * network.gamma_ratio();
  v.leaders_near_limit = static_cast<std::size_t>(std::ceil(9.0 * g2 - 1e-9));
  v.leaders_2r_limit = static_cast<std::size_t>(std::ceil(19.0 * g2 - 1e-9));
  const double two_r = 2.0 * network.r_max_global();
  for (NodeIndex a : leaders) {
    std::size_t near = 0;
    std::size_t within_2r = 0;
    for (NodeIndex b : leaders) {
      if (a == b) continue;
      const double d = network.distance(a, b);
      if (d <= network.r_max(a)) ++near;
      if (d <= two_r) ++within_2r;
      if (network.bidirectional(a, b)) v.leaders_independent = false;
    }
    v.max_leaders_near = std::max(v.max_leaders_near, near);
    v.max_leaders_2r = std::max(v.max_leaders_2r, within_2r);
  }
  return v;
}

MisVerdict validate_mis(const Network& network, std::span<const std::optional<bool>> membership) {
  if (membership.size() != network.size()) throw std::invalid_argument("validate_mis: size mismatch");
  MisVerdict v;
  for (NodeIndex a = 0; a < network.size(); ++a) {
    if (!membership[a]) {
      v.undecided.push_back(a);
      continue;
    }
    if (*membership[a]) {
      for (NodeIndex b : network.out_edges(a)) {
        if (membership[b].value_or(false) && (a < b || !network.has_edge(b, a))) {
          v.adjacent_members.emplace_back(std::min(a, b), std::max(a, b));
        }
      }
    } else {
      const auto& in = network.in_edges(a);
      const bool dominated = std::any_of(in.begin(), in.end(), [&](NodeIndex w) {
        return membership[w].value_or(false);
      });
      if (!dominated) v.undominated.push_back(a);
    }
  }
  v.complete = v.undecided.empty();
  return v;
}

std::vector<std::optional<bool>> mis_membership(std::span<const std::optional<std::int64_t>> colors) {
  std::vector<std::optional<bool>> out;
  out.reserve(colors.size());
  for (const auto& c : colors) {
    out.push_back(c ? std::optional<bool>(*c == 0) : std::nullopt);
  }
  return out;
}

}  // namespace sinrnet
