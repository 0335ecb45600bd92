#include "sinrnet/topology_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sinrnet {

using nlohmann::json;

namespace {

json params_to_json(const NetworkParams& p) {
  return json{{"alpha_lo", p.alpha_lo},     {"alpha_hi", p.alpha_hi},
              {"alpha_true", p.alpha_true}, {"beta_lo", p.beta_lo},
              {"beta_hi", p.beta_hi},       {"beta_true", p.beta_true},
              {"noise_lo", p.noise_lo},     {"noise_hi", p.noise_hi},
              {"noise_true", p.noise_true}, {"delta", p.delta},
              {"c_whp", p.c_whp},           {"scale", p.scale}};
}

double number_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw std::invalid_argument(std::string("topology: missing numeric field '") + key + "'");
  }
  return it->get<double>();
}

std::int64_t integer_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    throw std::invalid_argument(std::string("topology: missing integer field '") + key + "'");
  }
  return it->get<std::int64_t>();
}

}  // namespace

std::string to_topology_text(const TopologyDocument& doc) {
  json nodes = json::array();
  for (const auto& n : doc.nodes) {
    json entry{{"id", n.id},
               {"x", n.position.x},
               {"y", n.position.y},
               {"power", n.power},
               {"wake_slot", n.wake_slot}};
    if (n.sleep_slot) entry["sleep_slot"] = *n.sleep_slot;
    nodes.push_back(std::move(entry));
  }
  json root{{"params", params_to_json(doc.params)}, {"nodes", std::move(nodes)}};
  // max_digits10 output keeps doubles value-identical through a round trip.
  return root.dump(2) + "\n";
}

TopologyDocument parse_topology_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("topology: ") + e.what());
  }
  if (!root.is_object() || !root.contains("params") || !root.contains("nodes")) {
    throw std::invalid_argument("topology: expected object with 'params' and 'nodes'");
  }
  TopologyDocument doc;
  const json& p = root["params"];
  doc.params.alpha_lo = number_field(p, "alpha_lo");
  doc.params.alpha_hi = number_field(p, "alpha_hi");
  doc.params.alpha_true = number_field(p, "alpha_true");
  doc.params.beta_lo = number_field(p, "beta_lo");
  doc.params.beta_hi = number_field(p, "beta_hi");
  doc.params.beta_true = number_field(p, "beta_true");
  doc.params.noise_lo = number_field(p, "noise_lo");
  doc.params.noise_hi = number_field(p, "noise_hi");
  doc.params.noise_true = number_field(p, "noise_true");
  doc.params.delta = number_field(p, "delta");
  doc.params.c_whp = number_field(p, "c_whp");
  doc.params.scale = number_field(p, "scale");

  const json& nodes = root["nodes"];
  if (!nodes.is_array()) throw std::invalid_argument("topology: 'nodes' must be an array");
  for (const json& entry : nodes) {
    Node n;
    n.id = integer_field(entry, "id");
    n.position = {number_field(entry, "x"), number_field(entry, "y")};
    n.power = number_field(entry, "power");
    n.wake_slot = integer_field(entry, "wake_slot");
    if (entry.contains("sleep_slot") && !entry["sleep_slot"].is_null()) {
      n.sleep_slot = integer_field(entry, "sleep_slot");
    }
    doc.nodes.push_back(n);
  }
  return doc;
}

TopologyDocument read_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_topology_text(buf.str());
}

void write_topology_file(const std::string& path, const TopologyDocument& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write topology file " + path);
  out << to_topology_text(doc);
}

}  // namespace sinrnet
