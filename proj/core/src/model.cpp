#include "sinrnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_set>

namespace sinrnet {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("NetworkParams: ") + what);
}

void check_power(double power) {
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw std::invalid_argument("transmission power must be positive and finite");
  }
}

}  // namespace

void NetworkParams::validate() const {
  require(alpha_lo <= alpha_true && alpha_true <= alpha_hi, "alpha_lo <= alpha_true <= alpha_hi");
  require(beta_lo <= beta_true && beta_true <= beta_hi, "beta_lo <= beta_true <= beta_hi");
  require(noise_lo <= noise_true && noise_true <= noise_hi, "noise_lo <= noise_true <= noise_hi");
  require(beta_lo >= 1.0, "beta_lo >= 1");
  require(noise_lo > 0.0, "noise_lo > 0");
  require(delta > 1.0, "delta > 1");
  require(alpha_lo > 1.0, "alpha_lo > 1");
  require(c_whp > 1.0, "c_whp > 1");
  require(scale > 0.0 && scale <= 1.0, "scale in (0, 1]");
}

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double max_transmission_range(double power, const NetworkParams& params) {
  check_power(power);
  return std::pow(power / (params.noise_hi * params.beta_hi), 1.0 / params.alpha_hi);
}

double broadcast_range(double power, const NetworkParams& params) {
  check_power(power);
  return std::pow(power / (params.delta * params.noise_hi * params.beta_hi),
                  1.0 / params.alpha_lo);
}

Network Network::build(std::vector<Node> nodes, const NetworkParams& params) {
  params.validate();
  if (nodes.empty()) throw std::invalid_argument("network needs at least one node");

  std::unordered_set<NodeId> ids;
  for (const auto& n : nodes) {
    if (!ids.insert(n.id).second) {
      throw std::invalid_argument("duplicate node id " + std::to_string(n.id));
    }
    check_power(n.power);
    if (n.wake_slot < 0) throw std::invalid_argument("wake_slot must be >= 0");
    if (n.sleep_slot && *n.sleep_slot <= n.wake_slot) {
      throw std::invalid_argument("sleep_slot must be after wake_slot");
    }
  }

  Network net;
  net.nodes_ = std::move(nodes);
  net.params_ = params;
  const std::size_t n = net.nodes_.size();

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (net.nodes_[a].position == net.nodes_[b].position) {
        std::ostringstream msg;
        msg << "nodes " << net.nodes_[a].id << " and " << net.nodes_[b].id
            << " share a position";
        throw std::invalid_argument(msg.str());
      }
    }
  }

  net.r_max_.resize(n);
  net.r_bcast_.resize(n);
  net.min_power_ = std::numeric_limits<double>::infinity();
  net.max_power_ = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    net.r_max_[i] = max_transmission_range(net.nodes_[i].power, params);
    net.r_bcast_[i] = broadcast_range(net.nodes_[i].power, params);
    net.min_power_ = std::min(net.min_power_, net.nodes_[i].power);
    net.max_power_ = std::max(net.max_power_, net.nodes_[i].power);
  }
  net.r_max_global_ = *std::max_element(net.r_max_.begin(), net.r_max_.end());
  net.r_min_global_ = *std::min_element(net.r_max_.begin(), net.r_max_.end());

  net.out_.assign(n, {});
  net.in_.assign(n, {});
  net.delta_max_ = 0;
  for (std::size_t v = 0; v < n; ++v) {
    int in_disc = 0;
    for (std::size_t u = 0; u < n; ++u) {
      const double d = net.distance(static_cast<NodeIndex>(v), static_cast<NodeIndex>(u));
      if (d <= net.r_max_[v]) ++in_disc;
      if (u != v && d <= net.r_bcast_[v]) {
        net.out_[v].push_back(static_cast<NodeIndex>(u));
        net.in_[u].push_back(static_cast<NodeIndex>(v));
      }
    }
    net.delta_max_ = std::max(net.delta_max_, in_disc);
  }
  net.ell_ = longest_directed_path(net);
  return net;
}

std::optional<NodeIndex> Network::index_of(NodeId id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return static_cast<NodeIndex>(i);
  }
  return std::nullopt;
}

double Network::distance(NodeIndex a, NodeIndex b) const {
  return sinrnet::distance(nodes_[a].position, nodes_[b].position);
}

bool Network::has_edge(NodeIndex from, NodeIndex to) const {
  const auto& out = out_[from];
  return std::binary_search(out.begin(), out.end(), to);
}

int longest_directed_path(const Network& network) {
  const std::size_t n = network.size();
  std::vector<std::vector<NodeIndex>> uni(n);
  std::vector<int> indegree(n, 0);
  for (NodeIndex v = 0; v < n; ++v) {
    for (NodeIndex u : network.out_edges(v)) {
      if (!network.has_edge(u, v)) {
        uni[v].push_back(u);
        ++indegree[u];
      }
    }
  }

  std::deque<NodeIndex> ready;
  for (NodeIndex v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  std::vector<int> longest(n, 0);
  std::size_t visited = 0;
  int best = 0;
  while (!ready.empty()) {
    const NodeIndex v = ready.front();
    ready.pop_front();
    ++visited;
    best = std::max(best, longest[v]);
    for (NodeIndex u : uni[v]) {
      longest[u] = std::max(longest[u], longest[v] + 1);
      if (--indegree[u] == 0) ready.push_back(u);
    }
  }
  if (visited != n) {
    throw ModelViolation("unidirectional links form a directed cycle");
  }
  return best;
}

RingClass ring_index_for_distance(double dist, double r_max_global) {
  const double ratio = dist / r_max_global;
  if (ratio < 3.0) return RingClass::in_proximity();
  const int i = static_cast<int>(std::ceil(ratio)) - 2;
  return RingClass::in_ring(std::max(2, i));
}

RingClass ring_index(const Network& network, NodeIndex center, NodeIndex other) {
  return ring_index_for_distance(network.distance(center, other), network.r_max_global());
}

}  // namespace sinrnet
