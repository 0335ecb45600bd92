// sinrnet command-line tool.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sinrnet/analysis.hpp"
#include "sinrnet/harness.hpp"
#include "sinrnet/topology_io.hpp"

using namespace sinrnet;
using nlohmann::json;

namespace {

struct RunOptions {
  std::string topology;
  std::size_t seeds = 1;
  std::uint64_t seed_base = 1;
  double scale = 1.0;
  std::string csv;
  std::string summary;
  std::string trace;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--topology", o.topology, "Topology file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seeds", o.seeds, "Number of seeded trials")->check(CLI::PositiveNumber);
  cmd->add_option("--seed-base", o.seed_base, "First seed; trials use seed-base, seed-base+1, ...");
  cmd->add_option("--scale", o.scale, "Slot-budget scale in (0, 1]")->check(CLI::Range(1e-9, 1.0));
  cmd->add_option("--csv", o.csv, "Per-node CSV output (default: stdout)");
  cmd->add_option("--summary", o.summary, "JSON summary output");
  cmd->add_option("--trace", o.trace, "Transmission/reception trace of the first seed (JSON lines)");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

Slot parse_wakeup(const std::string& text) {
  if (text == "none") return 0;
  const std::string prefix = "random:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string w = text.substr(prefix.size());
    std::size_t used = 0;
    long long window = -1;
    try {
      window = std::stoll(w, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == w.size() && window > 0) return window;
  }
  throw CLI::ValidationError("--async-wakeup", "expected none or random:WINDOW with WINDOW > 0");
}

int run(const RunOptions& o, ExperimentConfig config) {
  const Network network = [&] {
    const TopologyDocument doc = read_topology_file(o.topology);
    return Network::build(doc.nodes, doc.params);
  }();
  for (std::size_t i = 0; i < o.seeds; ++i) config.seeds.push_back(o.seed_base + i);
  config.scale = o.scale;
  config.keep_trace = !o.trace.empty();
  const ExperimentReport report = run_experiment(network, config);

  std::ostringstream csv;
  write_csv(csv, report.csv);
  if (o.csv.empty()) {
    std::cout << csv.str();
  } else {
    write_text(o.csv, csv.str());
  }
  if (!o.summary.empty()) write_text(o.summary, report_to_json(report));
  if (!o.trace.empty() && report.trace) {
    std::ofstream out(o.trace);
    if (!out) throw std::runtime_error("cannot write " + o.trace);
    write_trace_lines(out, network, *report.trace);
  }
  (o.csv.empty() ? std::cerr : std::cout) << report_summary(report);
  return report.all_passed() ? 0 : 1;
}

json analyze(const Network& net) {
  const Certificate cert = compute_certificate(net);
  const auto probs = ProbabilityAssignment::uniform(net.size(), cert.gamma / net.delta_max());
  json nodes = json::array();
  for (NodeIndex v = 0; v < net.size(); ++v) {
    nodes.push_back({{"id", net.node(v).id},
                     {"quiet_proximity_product", prob_no_proximity_transmission(net, probs, v)},
                     {"interference", expected_out_of_proximity_interference(
                                          net, probs, v, net.params().alpha_hi)},
                     {"interference_true_alpha", expected_out_of_proximity_interference(
                                                     net, probs, v, net.params().alpha_true)},
                     {"region_sum", region_probability_sum(net, probs, v)},
                     {"out_degree", net.out_edges(v).size()}});
  }
  return {{"n", net.size()},
          {"gamma", cert.gamma},
          {"p", cert.gamma / net.delta_max()},
          {"Gamma", net.gamma_ratio()},
          {"Delta", net.delta_max()},
          {"ell", net.ell()},
          {"interference_bound", cert.interference_bound},
          {"max_interference", cert.max_interference},
          {"min_quiet_proximity_product", cert.min_no_proximity},
          {"max_region_sum", cert.max_region_sum},
          {"nodes", std::move(nodes)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SINR network simulator: local broadcasting, coloring and MIS experiments"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Write a generated topology file");
  std::string preset = "random:n=32,side=5,pmin=1,pmax=4";
  std::uint64_t topo_seed = 1;
  std::string out_path;
  NetworkParams params;
  gen->add_option("--preset", preset,
                  "random:n=,side=,pmin=,pmax= | grid:rows=,cols=,spacing=,power= | "
                  "chain:n=,ratio=,pmin= | uniform:n=,side=,power=");
  gen->add_option("--seed", topo_seed, "Generator seed");
  gen->add_option("--out", out_path, "Output file")->required();
  gen->add_option("--alpha", params.alpha_true, "Path-loss exponent (true value and both bounds)");
  gen->add_option("--delta", params.delta, "Broadcast range margin delta > 1");
  gen->add_option("--c-whp", params.c_whp, "Success exponent c");
  gen->add_option("--scale", params.scale, "Slot-budget scale in (0, 1]");

  auto* ana = app.add_subcommand("analyze", "Print interference certificates for a topology");
  std::string ana_topology;
  std::string ana_out;
  ana->add_option("--topology", ana_topology, "Topology file")->required()->check(CLI::ExistingFile);
  ana->add_option("--out", ana_out, "Write the report to a file instead of stdout");

  auto* bc = app.add_subcommand("run-broadcast", "Run local-broadcast trials");
  RunOptions bc_opts;
  std::string protocol = "fixed";
  std::size_t n_estimate = 0;
  bc->add_option("--protocol", protocol, "fixed | slowstart | varpower")
      ->check(CLI::IsMember({"fixed", "slowstart", "varpower"}));
  bc->add_option("--n-estimate", n_estimate, "Slow start: known upper bound on n (default n)");
  add_run_options(bc, bc_opts);

  auto* col = app.add_subcommand("run-coloring", "Run distributed coloring trials");
  RunOptions col_opts;
  std::string wakeup = "none";
  std::size_t resign = 0;
  col->add_option("--async-wakeup", wakeup, "none | random:WINDOW");
  col->add_option("--resign", resign, "Colored non-leaders forced to resign after settling");
  add_run_options(col, col_opts);

  auto* mis = app.add_subcommand("run-mis", "Run MIS trials");
  RunOptions mis_opts;
  std::string mis_wakeup = "none";
  mis->add_option("--async-wakeup", mis_wakeup, "none | random:WINDOW");
  add_run_options(mis, mis_opts);

  auto* rep = app.add_subcommand("report", "Print a human-readable summary of a JSON summary");
  std::string rep_path;
  rep->add_option("--summary", rep_path, "Summary file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      params.alpha_lo = params.alpha_hi = params.alpha_true;
      const Network net = generate_topology(parse_topology_spec(preset), topo_seed, params);
      write_topology_file(out_path, document_of(net));
      std::cout << "wrote " << net.size() << " nodes to " << out_path << " (Delta=" << net.delta_max()
                << ", ell=" << net.ell() << ", Gamma=" << net.gamma_ratio() << ")\n";
      return 0;
    }
    if (*ana) {
      const TopologyDocument doc = read_topology_file(ana_topology);
      const std::string text = analyze(Network::build(doc.nodes, doc.params)).dump(2) + "\n";
      if (ana_out.empty()) {
        std::cout << text;
      } else {
        write_text(ana_out, text);
      }
      return 0;
    }
    if (*bc) {
      ExperimentConfig config;
      config.kind = ExperimentKind::Broadcast;
      config.protocol = parse_broadcast_protocol(protocol);
      config.broadcast.n_estimate = n_estimate;
      return run(bc_opts, config);
    }
    if (*col) {
      ExperimentConfig config;
      config.kind = ExperimentKind::Coloring;
      config.wake_window = parse_wakeup(wakeup);
      config.forced_resignations = resign;
      return run(col_opts, config);
    }
    if (*mis) {
      ExperimentConfig config;
      config.kind = ExperimentKind::Mis;
      config.wake_window = parse_wakeup(mis_wakeup);
      return run(mis_opts, config);
    }
    if (*rep) {
      std::ifstream in(rep_path);
      std::stringstream buf;
      buf << in.rdbuf();
      const ExperimentReport report = report_from_json(buf.str());
      std::cout << report_summary(report);
      return report.all_passed() ? 0 : 1;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
