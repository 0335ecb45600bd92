// Topology document: {params: {...}, nodes: [{id, x, y, power, wake_slot, sleep_slot?}]}
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sinrnet/model.hpp"

namespace sinrnet {

struct TopologyDocument {
  NetworkParams params;
  std::vector<Node> nodes;

  bool operator==(const TopologyDocument&) const = default;
};

std::string to_topology_text(const TopologyDocument& doc);
/// Throws std::invalid_argument on malformed or incomplete documents.
TopologyDocument parse_topology_text(const std::string& text);

TopologyDocument read_topology_file(const std::string& path);
void write_topology_file(const std::string& path, const TopologyDocument& doc);

inline TopologyDocument document_of(const Network& network) {
  return {network.params(), network.nodes()};
}

}  // namespace sinrnet
