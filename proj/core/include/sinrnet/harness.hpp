// Topology generation, experiment orchestration and reporting.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sinrnet/broadcast.hpp"
#include "sinrnet/coloring.hpp"
#include "sinrnet/model.hpp"

namespace sinrnet {

// --- topologies ---------------------------------------------------------------

struct TopologySpec {
  enum class Kind { Random, Grid, Chain, Uniform };
  Kind kind = Kind::Random;
  std::size_t n = 16;
  double side = 4.0;
  double power_lo = 1.0;
  double power_hi = 4.0;
  std::size_t rows = 4;
  std::size_t cols = 4;
  double spacing = 1.0;
  /// Grid and uniform power.
  double power = 2.0;
  /// Chain: P_i = P_0 / ratio^i with P_{n−1} = power_lo.
  double ratio = 2.0;
};

/// Parses "random:n=64,side=5,pmin=1,pmax=4", "grid:rows=4,cols=4,spacing=1,power=2",
/// "chain:n=5,ratio=2,pmin=1" or "uniform:n=16,side=4,power=2". Unlisted keys
/// keep their defaults. Throws std::invalid_argument.
TopologySpec parse_topology_spec(const std::string& text);
std::string to_string(const TopologySpec& spec);

/// Node ids are 0..n−1, all awake from slot 0. Random positions closer than
/// 1e−6·side to an earlier node are redrawn. Throws std::invalid_argument
/// for parameters that yield coincident nodes.
Network generate_topology(const TopologySpec& spec, std::uint64_t seed,
                          const NetworkParams& params = {});

/// Copy of the network with wake slots drawn uniformly from [0, window].
Network with_random_wakeup(const Network& network, Slot window, std::uint64_t seed);

/// Copy of the network with a different scale knob.
Network with_scale(const Network& network, double scale);

// --- experiments ----------------------------------------------------------------

enum class ExperimentKind { Broadcast, Coloring, Mis };
const char* to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Broadcast;
  BroadcastProtocol protocol = BroadcastProtocol::Fixed;
  BroadcastOptions broadcast;
  std::vector<std::uint64_t> seeds;
  /// Overrides the topology's scale when set.
  std::optional<double> scale;
  /// Random wake slots in [0, window] per seed; 0 keeps the topology's.
  Slot wake_window = 0;
  /// Coloring only: resign this many colored non-leaders after the run
  /// settles, then let them recolor.
  std::size_t forced_resignations = 0;
  bool monitor_probabilities = true;
  /// Keep every transmission and reception of the first seed for export.
  bool keep_trace = false;

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Certificate values for p_v = γ/Δ on the network.
struct Certificate {
  double gamma = 0.0;
  double max_region_sum = 0.0;
  double max_interference = 0.0;
  double interference_bound = 0.0;
  double min_no_proximity = 1.0;
};

Certificate compute_certificate(const Network& network);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct TrialResult {
  std::uint64_t seed = 0;
  bool passed = false;
  std::vector<std::string> failures;
  Slot end_slot = 0;
  Slot budget = 0;
  std::size_t nodes_succeeded = 0;
  double mean_slots_to_success = 0.0;
  double max_region_sum = 0.0;
  std::size_t probability_violations = 0;
  std::size_t colors_used = 0;
  std::int64_t color_bound = 0;
  std::size_t resigned = 0;
  std::size_t reassignments_checked = 0;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::Broadcast;
  std::string protocol;
  std::size_t n = 0;
  int delta = 0;
  int ell = 0;
  double gamma_ratio = 1.0;
  double scale = 1.0;
  Certificate certificate;
  std::vector<TrialResult> trials;
  CsvTable csv;
  /// Trace of the first seed when requested.
  std::optional<SimTrace> trace;
  double wall_seconds = 0.0;

  std::size_t passed_trials() const;
  bool all_passed() const { return passed_trials() == trials.size(); }
};

ExperimentReport run_experiment(const Network& network, const ExperimentConfig& config);

/// Per-node CSV column schemas.
const std::vector<std::string>& broadcast_csv_header();
const std::vector<std::string>& coloring_csv_header();
const std::vector<std::string>& mis_csv_header();

void write_csv(std::ostream& out, const CsvTable& table);
std::string report_summary(const ExperimentReport& report);
/// Report without the CSV rows and trace, as JSON.
std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);

}  // namespace sinrnet
