#include "sinrnet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sinrnet/analysis.hpp"
#include "sinrnet/rng.hpp"
#include "sinrnet/validate.hpp"

namespace sinrnet {

using nlohmann::json;

namespace {

std::map<std::string, std::string> parse_pairs(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("topology spec: expected key=value, got '" + item + "'");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

double parse_number(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || !std::isfinite(x)) {
    throw std::invalid_argument("topology spec: bad value for " + key + ": '" + value + "'");
  }
  return x;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  const double x = parse_number(key, value);
  if (x < 1.0 || x != std::floor(x)) {
    throw std::invalid_argument("topology spec: " + key + " must be a positive integer");
  }
  return static_cast<std::size_t>(x);
}

std::string fmt(double x, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

NodeId id_of(const Network& net, NodeIndex v) { return net.node(v).id; }

Slot max_wake(const Network& net) {
  Slot m = 0;
  for (const auto& node : net.nodes()) m = std::max(m, node.wake_slot);
  return m;
}

void note_violations(const SimTrace& trace, const Network& net, TrialResult& r) {
  r.max_region_sum = trace.max_region_sum;
  r.probability_violations = trace.violations.size();
  if (!trace.violations.empty()) {
    const auto& v = trace.violations.front();
    r.failures.push_back("node " + std::to_string(id_of(net, v.region)) +
                         ": region probability sum " + fmt(v.sum) + " above cap at slot " +
                         std::to_string(v.slot));
  }
}

}  // namespace

// --- topologies -----------------------------------------------------------------

TopologySpec parse_topology_spec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  TopologySpec spec;
  if (kind == "random") {
    spec.kind = TopologySpec::Kind::Random;
  } else if (kind == "grid") {
    spec.kind = TopologySpec::Kind::Grid;
  } else if (kind == "chain") {
    spec.kind = TopologySpec::Kind::Chain;
  } else if (kind == "uniform") {
    spec.kind = TopologySpec::Kind::Uniform;
  } else {
    throw std::invalid_argument("unknown topology preset '" + kind + "'");
  }
  if (colon == std::string::npos) return spec;
  for (const auto& [key, value] : parse_pairs(text.substr(colon + 1))) {
    if (key == "n") spec.n = parse_count(key, value);
    else if (key == "rows") spec.rows = parse_count(key, value);
    else if (key == "cols") spec.cols = parse_count(key, value);
    else if (key == "side") spec.side = parse_number(key, value);
    else if (key == "pmin") spec.power_lo = parse_number(key, value);
    else if (key == "pmax") spec.power_hi = parse_number(key, value);
    else if (key == "spacing") spec.spacing = parse_number(key, value);
    else if (key == "power") spec.power = parse_number(key, value);
    else if (key == "ratio") spec.ratio = parse_number(key, value);
    else throw std::invalid_argument("topology spec: unknown key '" + key + "'");
  }
  return spec;
}

std::string to_string(const TopologySpec& spec) {
  std::ostringstream os;
  switch (spec.kind) {
    case TopologySpec::Kind::Random:
      os << "random:n=" << spec.n << ",side=" << spec.side << ",pmin=" << spec.power_lo
         << ",pmax=" << spec.power_hi;
      break;
    case TopologySpec::Kind::Grid:
      os << "grid:rows=" << spec.rows << ",cols=" << spec.cols << ",spacing=" << spec.spacing
         << ",power=" << spec.power;
      break;
    case TopologySpec::Kind::Chain:
      os << "chain:n=" << spec.n << ",ratio=" << spec.ratio << ",pmin=" << spec.power_lo;
      break;
    case TopologySpec::Kind::Uniform:
      os << "uniform:n=" << spec.n << ",side=" << spec.side << ",power=" << spec.power;
      break;
  }
  return os.str();
}

Network generate_topology(const TopologySpec& spec, std::uint64_t seed,
                          const NetworkParams& params) {
  Rng rng(splitmix64(seed ^ 0x70f0109eULL));
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * (1.0 - rng.uniform_open0()); };
  std::vector<Node> nodes;

  auto scatter = [&](std::size_t n, double side, auto power_of) {
    if (!(side > 0.0)) throw std::invalid_argument("topology: side must be > 0");
    const double min_gap = 1e-6 * side;
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 p;
      for (int attempt = 0;; ++attempt) {
        if (attempt > 10000) throw std::invalid_argument("topology: cannot place nodes apart");
        p = {uniform(0.0, side), uniform(0.0, side)};
        const bool clear = std::all_of(nodes.begin(), nodes.end(), [&](const Node& o) {
          return distance(o.position, p) >= min_gap;
        });
        if (clear) break;
      }
      nodes.push_back({static_cast<NodeId>(i), p, power_of(), 0, std::nullopt});
    }
  };

  switch (spec.kind) {
    case TopologySpec::Kind::Random:
      if (!(spec.power_lo > 0.0 && spec.power_hi >= spec.power_lo)) {
        throw std::invalid_argument("topology: need 0 < pmin <= pmax");
      }
      scatter(spec.n, spec.side, [&] { return uniform(spec.power_lo, spec.power_hi); });
      break;
    case TopologySpec::Kind::Uniform:
      scatter(spec.n, spec.side, [&] { return spec.power; });
      break;
    case TopologySpec::Kind::Grid:
      if (!(spec.spacing > 0.0)) throw std::invalid_argument("topology: grid spacing must be > 0");
      for (std::size_t r = 0; r < spec.rows; ++r) {
        for (std::size_t c = 0; c < spec.cols; ++c) {
          nodes.push_back({static_cast<NodeId>(r * spec.cols + c),
                           {static_cast<double>(c) * spec.spacing, static_cast<double>(r) * spec.spacing},
                           spec.power, 0, std::nullopt});
        }
      }
      break;
    case TopologySpec::Kind::Chain: {
      if (!(spec.ratio > 1.0)) throw std::invalid_argument("topology: chain ratio must be > 1");
      if (!(spec.power_lo > 0.0)) throw std::invalid_argument("topology: chain pmin must be > 0");
      std::vector<double> power(spec.n);
      for (std::size_t i = 0; i < spec.n; ++i) {
        power[i] = spec.power_lo * std::pow(spec.ratio, static_cast<double>(spec.n - 1 - i));
      }
      double x = 0.0;
      for (std::size_t i = 0; i < spec.n; ++i) {
        if (i > 0) {
          // Between the two broadcast ranges: i−1 reaches i, not the reverse.
          x += 0.5 * (broadcast_range(power[i - 1], params) + broadcast_range(power[i], params));
        }
        nodes.push_back({static_cast<NodeId>(i), {x, 0.0}, power[i], 0, std::nullopt});
      }
      break;
    }
  }
  return Network::build(std::move(nodes), params);
}

Network with_random_wakeup(const Network& network, Slot window, std::uint64_t seed) {
  if (window < 0) throw std::invalid_argument("wake window must be >= 0");
  std::vector<Node> nodes = network.nodes();
  for (auto& node : nodes) {
    Rng rng(node_stream_seed(splitmix64(seed ^ 0xa5a5f00dULL), node.id));
    node.wake_slot = static_cast<Slot>(rng.below(static_cast<std::uint64_t>(window) + 1));
  }
  return Network::build(std::move(nodes), network.params());
}

Network with_scale(const Network& network, double scale) {
  NetworkParams params = network.params();
  params.scale = scale;
  return Network::build(network.nodes(), params);
}

// --- experiments -------------------------------------------------------------------

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Broadcast: return "broadcast";
    case ExperimentKind::Coloring: return "coloring";
    case ExperimentKind::Mis: return "mis";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw std::invalid_argument("experiment needs at least one seed");
  if (scale && !(*scale > 0.0 && *scale <= 1.0)) throw std::invalid_argument("scale must be in (0, 1]");
  if (wake_window < 0) throw std::invalid_argument("wake window must be >= 0");
  if (forced_resignations > 0 && kind != ExperimentKind::Coloring) {
    throw std::invalid_argument("forced resignations apply to coloring runs only");
  }
}

Certificate compute_certificate(const Network& network) {
  Certificate c;
  c.gamma = gamma_bound(network);
  const auto probs =
      ProbabilityAssignment::uniform(network.size(), c.gamma / network.delta_max());
  c.max_region_sum = region_probability_sums(network, probs);
  const NetworkParams& params = network.params();
  c.interference_bound = (params.delta - 1.0) * params.noise_hi / 2.0;
  for (NodeIndex v = 0; v < network.size(); ++v) {
    c.max_interference = std::max(
        c.max_interference, expected_out_of_proximity_interference(network, probs, v, params.alpha_hi));
    c.min_no_proximity = std::min(c.min_no_proximity, prob_no_proximity_transmission(network, probs, v));
  }
  return c;
}

const std::vector<std::string>& broadcast_csv_header() {
  static const std::vector<std::string> h{"seed", "node_id", "protocol", "success",
                                          "first_success_slot", "budget"};
  return h;
}

const std::vector<std::string>& coloring_csv_header() {
  static const std::vector<std::string> h{"seed", "node_id", "final_color", "colored_at_slot",
                                          "competes_visited", "resigned_count"};
  return h;
}

const std::vector<std::string>& mis_csv_header() {
  static const std::vector<std::string> h{"seed", "node_id", "mis", "colored_at_slot",
                                          "competes_visited", "resigned_count"};
  return h;
}

namespace {

TrialResult run_broadcast_trial(const Network& net, const ExperimentConfig& config,
                                std::uint64_t seed, CsvTable& csv, std::optional<SimTrace>* keep) {
  TrialResult r;
  r.seed = seed;
  const BroadcastSetup setup = make_broadcast_setup(net, config.protocol, config.broadcast);
  r.budget = setup.budget;

  SimConfig sim;
  sim.max_slots = max_wake(net) + setup.budget + 1;
  sim.seed = seed;
  sim.trace = TraceLevel::Receptions;
  sim.log_events = false;
  if (config.monitor_probabilities) sim.monitor = ProbabilityMonitor{setup.gamma};
  SimRun run = run_simulation(net, broadcast_factory(setup), sim);
  r.end_slot = run.trace.end_slot;

  double total = 0.0;
  for (NodeIndex v = 0; v < net.size(); ++v) {
    const Slot wake = net.node(v).wake_slot;
    const SlotWindow window{wake, wake + setup.budget};
    std::optional<double> radius;
    if (config.protocol == BroadcastProtocol::VarPower) {
      const auto& node = dynamic_cast<const BroadcastNode&>(*run.protocols[v]);
      radius = variable_power_guarantee(node.varpower().trace, setup.p, net.params(), net.size(),
                                        net.params().scale)
                   .radius;
    }
    const auto done = local_broadcast_completion_slot(run.trace, net, v, window, radius);
    if (done) {
      ++r.nodes_succeeded;
      total += static_cast<double>(*done - wake + 1);
    } else if (r.failures.size() < 5) {
      r.failures.push_back("node " + std::to_string(id_of(net, v)) +
                           ": local broadcast incomplete at slot " + std::to_string(window.end - 1));
    }
    csv.rows.push_back({std::to_string(seed), std::to_string(id_of(net, v)),
                        to_string(config.protocol), done ? "1" : "0",
                        std::to_string(done ? *done : -1), std::to_string(setup.budget)});
  }
  r.mean_slots_to_success = r.nodes_succeeded ? total / static_cast<double>(r.nodes_succeeded) : 0.0;
  note_violations(run.trace, net, r);
  r.passed = r.failures.empty();
  if (keep && !*keep) *keep = std::move(run.trace);
  return r;
}

/// Every reassignment logged by a requester matches the serving leader's
/// reuse table. Returns the number of reassignments checked.
std::size_t check_reuse(const Network& net, const SimTrace& trace, const ColoringOutcome& out,
                        TrialResult& r) {
  std::vector<std::optional<NodeIndex>> leader(net.size());
  std::vector<int> assigned(net.size(), 0);
  std::size_t checked = 0;
  for (const auto& e : trace.events) {
    if (e.kind == "request") {
      leader[e.node] = net.index_of(e.value);
    } else if (e.kind == "assigned" && leader[e.node]) {
      const auto& table = out.reuse_tables[*leader[e.node]];
      auto it = table.find(e.node);
      if (it == table.end() || it->second != e.value) {
        r.failures.push_back("node " + std::to_string(id_of(net, e.node)) + ": assigned color " +
                             std::to_string(e.value) + " at slot " + std::to_string(e.slot) +
                             " disagrees with the leader's reuse table");
      }
      if (++assigned[e.node] > 1) ++checked;
    }
  }
  return checked;
}

TrialResult run_coloring_trial(const Network& net, const ExperimentConfig& config,
                               std::uint64_t seed, CsvTable& csv, std::optional<SimTrace>* keep) {
  const bool mis = config.kind == ExperimentKind::Mis;
  TrialResult r;
  r.seed = seed;
  auto setup = std::make_shared<ColoringSetup>();
  setup->constants = coloring_constants(net);
  setup->options.mode = mis ? ColoringMode::Mis : ColoringMode::Coloring;
  const ColoringConstants k = setup->constants;
  r.budget = coloring_termination_budget(k, net);

  SimConfig sim;
  sim.seed = seed;
  sim.max_slots = max_wake(net) + r.budget + 1;
  sim.trace = keep && !*keep ? TraceLevel::Receptions : TraceLevel::None;
  if (config.monitor_probabilities) sim.monitor = ProbabilityMonitor{k.gamma};
  Slot deadline = sim.max_slots - 1;

  if (config.forced_resignations > 0) {
    SimRun pre = run_simulation(net, coloring_factory(setup), sim);
    const ColoringOutcome first = collect_coloring(pre);
    std::vector<NodeIndex> candidates;
    for (NodeIndex v = 0; v < net.size(); ++v) {
      if (first.colors[v] && !k.is_leader_color(*first.colors[v])) candidates.push_back(v);
    }
    Rng pick(splitmix64(seed ^ 0x5e1ec7edULL));
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      std::swap(candidates[i], candidates[i + pick.below(candidates.size() - i)]);
    }
    if (candidates.size() < config.forced_resignations) {
      r.failures.push_back("only " + std::to_string(candidates.size()) +
                           " non-leader colored nodes available for resignation at slot " +
                           std::to_string(pre.trace.end_slot));
    }
    candidates.resize(std::min(candidates.size(), config.forced_resignations));
    const Slot at = pre.trace.end_slot + 1;
    auto churn = std::make_shared<ColoringSetup>(*setup);
    for (NodeIndex v : candidates) churn->options.forced_resignations.emplace_back(v, at);
    setup = churn;
    sim.max_slots = at + r.budget + 1;
    deadline = sim.max_slots - 1;
  }

  SimRun run = run_simulation(net, coloring_factory(setup), sim);
  r.end_slot = run.trace.end_slot;
  const ColoringOutcome out = collect_coloring(run);

  if (!run.trace.all_finished) {
    r.failures.push_back("run did not settle by slot " + std::to_string(deadline));
  }
  if (mis) {
    const MisVerdict v = validate_mis(net, mis_membership(out.colors));
    for (NodeIndex u : v.undecided) {
      r.failures.push_back("node " + std::to_string(id_of(net, u)) + ": undecided at slot " +
                           std::to_string(r.end_slot));
    }
    for (const auto& [a, b] : v.adjacent_members) {
      r.failures.push_back("nodes " + std::to_string(id_of(net, a)) + " and " +
                           std::to_string(id_of(net, b)) + ": adjacent MIS members at slot " +
                           std::to_string(r.end_slot));
    }
    for (NodeIndex u : v.undominated) {
      r.failures.push_back("node " + std::to_string(id_of(net, u)) +
                           ": not dominated by an MIS member at slot " + std::to_string(r.end_slot));
    }
    r.colors_used = static_cast<std::size_t>(
        std::count_if(out.colors.begin(), out.colors.end(), [](const auto& c) { return c == 0; }));
  } else {
    const ColoringVerdict v = validate_coloring(net, out.colors, k);
    for (NodeIndex u : v.uncolored) {
      r.failures.push_back("node " + std::to_string(id_of(net, u)) + ": uncolored at slot " +
                           std::to_string(r.end_slot));
    }
    for (const auto& [a, b] : v.conflicts) {
      r.failures.push_back("nodes " + std::to_string(id_of(net, a)) + " and " +
                           std::to_string(id_of(net, b)) + ": share color " +
                           std::to_string(*out.colors[a]) + " at slot " + std::to_string(r.end_slot));
    }
    r.colors_used = v.distinct_colors;
    r.color_bound = v.color_bound;
    if (!v.within_bound) {
      r.failures.push_back(std::to_string(v.distinct_colors) + " colors exceed the bound " +
                           std::to_string(v.color_bound));
    }
    if (!v.leaders_independent) r.failures.push_back("two linked leaders hold leader colors");
    if (!v.leader_density_ok()) {
      r.failures.push_back("leader density " + std::to_string(v.max_leaders_near) + "/" +
                           std::to_string(v.max_leaders_2r) + " above " +
                           std::to_string(v.leaders_near_limit) + "/" +
                           std::to_string(v.leaders_2r_limit));
    }
    if (config.forced_resignations > 0) r.reassignments_checked = check_reuse(net, run.trace, out, r);
  }
  for (NodeIndex u = 0; u < net.size(); ++u) {
    const auto& m = out.metrics[u];
    r.resigned += static_cast<std::size_t>(m.resigned_count);
    if (out.colors[u]) {
      ++r.nodes_succeeded;
      r.mean_slots_to_success += static_cast<double>(m.colored_at - net.node(u).wake_slot + 1);
    }
    std::string value = out.colors[u] ? std::to_string(*out.colors[u]) : "-1";
    if (mis) value = out.colors[u] ? (*out.colors[u] == 0 ? "1" : "0") : "-1";
    csv.rows.push_back({std::to_string(seed), std::to_string(id_of(net, u)), value,
                        std::to_string(m.colored_at), std::to_string(m.competes_visited),
                        std::to_string(m.resigned_count)});
  }
  if (r.nodes_succeeded) r.mean_slots_to_success /= static_cast<double>(r.nodes_succeeded);
  note_violations(run.trace, net, r);
  r.passed = r.failures.empty();
  if (keep && !*keep) *keep = std::move(run.trace);
  return r;
}

}  // namespace

std::size_t ExperimentReport::passed_trials() const {
  return static_cast<std::size_t>(
      std::count_if(trials.begin(), trials.end(), [](const TrialResult& t) { return t.passed; }));
}

ExperimentReport run_experiment(const Network& network, const ExperimentConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const Network base = config.scale ? with_scale(network, *config.scale) : network;

  ExperimentReport report;
  report.kind = config.kind;
  report.protocol = config.kind == ExperimentKind::Broadcast ? to_string(config.protocol)
                                                             : to_string(config.kind);
  report.n = base.size();
  report.delta = base.delta_max();
  report.ell = base.ell();
  report.gamma_ratio = base.gamma_ratio();
  report.scale = base.params().scale;
  report.certificate = compute_certificate(base);
  switch (config.kind) {
    case ExperimentKind::Broadcast: report.csv.header = broadcast_csv_header(); break;
    case ExperimentKind::Coloring: report.csv.header = coloring_csv_header(); break;
    case ExperimentKind::Mis: report.csv.header = mis_csv_header(); break;
  }

  std::optional<SimTrace>* keep = config.keep_trace ? &report.trace : nullptr;
  for (std::uint64_t seed : config.seeds) {
    const Network net = config.wake_window > 0 ? with_random_wakeup(base, config.wake_window, seed) : base;
    if (config.kind == ExperimentKind::Broadcast) {
      report.trials.push_back(run_broadcast_trial(net, config, seed, report.csv, keep));
    } else {
      report.trials.push_back(run_coloring_trial(net, config, seed, report.csv, keep));
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto cell = [&](const std::string& c) {
    if (c.find_first_of(",\"\n") == std::string::npos) {
      out << c;
      return;
    }
    out << '"';
    for (char ch : c) out << (ch == '"' ? "\"\"" : std::string(1, ch));
    out << '"';
  };
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      cell(cells[i]);
    }
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

std::string report_summary(const ExperimentReport& report) {
  std::ostringstream os;
  const std::size_t total = report.trials.size();
  const std::size_t passed = report.passed_trials();
  os << to_string(report.kind) << " (" << report.protocol << ") on n=" << report.n
     << ": Delta=" << report.delta << " ell=" << report.ell << " Gamma=" << fmt(report.gamma_ratio)
     << " scale=" << fmt(report.scale) << '\n';
  const double rate = total ? 100.0 * static_cast<double>(passed) / static_cast<double>(total) : 0.0;
  os << "success " << fmt(rate, 4) << "% (" << passed << "/" << total << " trials)\n";

  double mean = 0.0;
  Slot budget = 0;
  std::size_t colors = 0;
  std::int64_t bound = 0;
  for (const auto& t : report.trials) {
    mean += t.mean_slots_to_success;
    budget = std::max(budget, t.budget);
    colors = std::max(colors, t.colors_used);
    bound = std::max(bound, t.color_bound);
  }
  if (total) mean /= static_cast<double>(total);
  os << "slots-to-success mean " << fmt(mean) << " vs budget " << budget << '\n';
  if (report.kind == ExperimentKind::Coloring) {
    os << "colors max " << colors << " vs bound " << bound << '\n';
  } else if (report.kind == ExperimentKind::Mis) {
    os << "mis size max " << colors << '\n';
  }
  const Certificate& c = report.certificate;
  os << "margins: out-of-proximity interference " << fmt(c.max_interference) << " vs (delta-1)N/2 "
     << fmt(c.interference_bound) << "; no-proximity product min " << fmt(c.min_no_proximity)
     << " vs 0.25; region sum max " << fmt(c.max_region_sum) << " vs gamma " << fmt(c.gamma)
     << '\n';
  for (const auto& t : report.trials) {
    for (const auto& f : t.failures) os << "FAIL seed " << t.seed << ": " << f << '\n';
  }
  return os.str();
}

std::string report_to_json(const ExperimentReport& report) {
  json trials = json::array();
  for (const auto& t : report.trials) {
    trials.push_back({{"seed", t.seed},
                      {"passed", t.passed},
                      {"failures", t.failures},
                      {"end_slot", t.end_slot},
                      {"budget", t.budget},
                      {"nodes_succeeded", t.nodes_succeeded},
                      {"mean_slots_to_success", t.mean_slots_to_success},
                      {"max_region_sum", t.max_region_sum},
                      {"probability_violations", t.probability_violations},
                      {"colors_used", t.colors_used},
                      {"color_bound", t.color_bound},
                      {"resigned", t.resigned},
                      {"reassignments_checked", t.reassignments_checked}});
  }
  const Certificate& c = report.certificate;
  json root{{"kind", to_string(report.kind)},
            {"protocol", report.protocol},
            {"n", report.n},
            {"delta", report.delta},
            {"ell", report.ell},
            {"gamma_ratio", report.gamma_ratio},
            {"scale", report.scale},
            {"certificate",
             {{"gamma", c.gamma},
              {"max_region_sum", c.max_region_sum},
              {"max_interference", c.max_interference},
              {"interference_bound", c.interference_bound},
              {"min_no_proximity", c.min_no_proximity}}},
            {"trials", std::move(trials)},
            {"passed_trials", report.passed_trials()},
            {"wall_seconds", report.wall_seconds}};
  return root.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
  ExperimentReport r;
  try {
    const json root = json::parse(text);
    const std::string kind = root.at("kind").get<std::string>();
    if (kind == "broadcast") r.kind = ExperimentKind::Broadcast;
    else if (kind == "coloring") r.kind = ExperimentKind::Coloring;
    else if (kind == "mis") r.kind = ExperimentKind::Mis;
    else throw std::invalid_argument("unknown experiment kind '" + kind + "'");
    r.protocol = root.at("protocol").get<std::string>();
    r.n = root.at("n").get<std::size_t>();
    r.delta = root.at("delta").get<int>();
    r.ell = root.at("ell").get<int>();
    r.gamma_ratio = root.at("gamma_ratio").get<double>();
    r.scale = root.at("scale").get<double>();
    const json& c = root.at("certificate");
    r.certificate = {c.at("gamma").get<double>(), c.at("max_region_sum").get<double>(),
                     c.at("max_interference").get<double>(), c.at("interference_bound").get<double>(),
                     c.at("min_no_proximity").get<double>()};
    for (const json& t : root.at("trials")) {
      TrialResult tr;
      tr.seed = t.at("seed").get<std::uint64_t>();
      tr.passed = t.at("passed").get<bool>();
      tr.failures = t.at("failures").get<std::vector<std::string>>();
      tr.end_slot = t.at("end_slot").get<Slot>();
      tr.budget = t.at("budget").get<Slot>();
      tr.nodes_succeeded = t.at("nodes_succeeded").get<std::size_t>();
      tr.mean_slots_to_success = t.at("mean_slots_to_success").get<double>();
      tr.max_region_sum = t.at("max_region_sum").get<double>();
      tr.probability_violations = t.at("probability_violations").get<std::size_t>();
      tr.colors_used = t.at("colors_used").get<std::size_t>();
      tr.color_bound = t.at("color_bound").get<std::int64_t>();
      tr.resigned = t.at("resigned").get<std::size_t>();
      tr.reassignments_checked = t.at("reassignments_checked").get<std::size_t>();
      r.trials.push_back(std::move(tr));
    }
    r.wall_seconds = root.at("wall_seconds").get<double>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed report: ") + e.what());
  }
  return r;
}

}  // namespace sinrnet
