// Closed-form interference quantities and analytic certificates.
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sinrnet/model.hpp"

namespace sinrnet {

/// Transmission probability per node index, each in [0, 1].
class ProbabilityAssignment {
 public:
  ProbabilityAssignment() = default;
  explicit ProbabilityAssignment(std::vector<double> probs);
  static ProbabilityAssignment uniform(std::size_t n, double p);

  std::size_t size() const { return probs_.size(); }
  double operator[](NodeIndex i) const { return probs_[i]; }
  std::span<const double> values() const { return probs_; }

 private:
  std::vector<double> probs_;
};

/// γ = min(δ−1, 1) / (120 β̄ Γ² Σ_{i=1}^{n} i^{−(ᾱ−1)}).
double gamma_bound(const NetworkParams& params, double gamma_ratio, std::size_t n);

/// γ for a concrete network (Γ and n taken from it).
inline double gamma_bound(const Network& network) {
  return gamma_bound(network.params(), network.gamma_ratio(), network.size());
}

/// Π_{u ≠ v, dist(u,v) < 3R̄} (1 − p_u).
double prob_no_proximity_transmission(const Network& network, const ProbabilityAssignment& probs,
                                      NodeIndex v);

/// Largest expected interference Σ p_w P_w / d(w,u)^exponent from nodes w
/// outside v's proximity region, over receivers u in B_v. Receivers are the
/// nodes inside B_v (v included) and, per interferer, the point of B_v's
/// boundary closest to it.
double expected_out_of_proximity_interference(const Network& network,
                                              const ProbabilityAssignment& probs, NodeIndex v,
                                              double exponent);

/// Σ p_w P_w / d(w, receiver)^exponent over nodes w outside v's proximity
/// region.
double out_of_proximity_interference_at(const Network& network, const ProbabilityAssignment& probs,
                                        NodeIndex v, Vec2 receiver, double exponent);

/// Same sum with every interferer moved to its ring floor distance i·R̄,
/// which is how the per-ring bound is derived.
double ring_floor_interference(const Network& network, const ProbabilityAssignment& probs,
                               NodeIndex v);

/// Per-ring bound 60 γ β̄ N̄ Γ² / i^{ᾱ−1}. Throws for i < 2.
double ring_interference_bound(int i, double gamma, const NetworkParams& params,
                               double gamma_ratio);

/// Σ_{i=2}^{last_ring} ring_interference_bound(i, ...).
double ring_bound_sum(int last_ring, double gamma, const NetworkParams& params,
                      double gamma_ratio);

/// Σ_{w ∈ B_v ∪ {v}} p_w for one region.
double region_probability_sum(const Network& network, const ProbabilityAssignment& probs,
                              NodeIndex v);
/// Maximum of region_probability_sum over all nodes.
double region_probability_sums(const Network& network, const ProbabilityAssignment& probs);

/// Powers used by one node over an interval, run-length encoded. Slots not
/// covered by any segment are gaps with power 0.
class PowerTrace {
 public:
  struct Segment {
    Slot start = 0;
    Slot length = 0;
    double power = 0.0;
  };

  explicit PowerTrace(Slot interval_length = 0) : interval_length_(interval_length) {}

  /// Appends slots [start, start + length) at `power`; extends the interval.
  void add(Slot start, Slot length, double power);
  void record_transmission(Slot slot, double power);

  Slot interval_length() const { return interval_length_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<std::pair<Slot, double>>& transmissions() const { return transmissions_; }

  /// Distinct levels {0 = P[0] < P[1] < ... < P[k]}.
  std::vector<double> levels() const;
  /// T_j = number of slots with power >= P[j]; T_0 is the interval length.
  std::vector<Slot> counts_at_least() const;

 private:
  Slot interval_length_ = 0;
  std::vector<Segment> segments_;
  std::vector<std::pair<Slot, double>> transmissions_;
};

struct PowerGuarantee {
  std::size_t level = 0;
  double radius = 0.0;
  bool operator==(const PowerGuarantee&) const = default;
};

/// Threshold scale·8·c/p·ln n. Largest level j with T_j above it and the
/// broadcast range of P[j]; (0, 0) if no positive level qualifies.
PowerGuarantee variable_power_guarantee(const PowerTrace& trace, double p,
                                        const NetworkParams& params, std::size_t n, double scale);

/// (1/4)^{Σp} ≤ Π(1−p) ≤ (1/e)^{Σp}; requires every p in [0, 1/2].
bool fact_bounds_check(std::span<const double> probs);
/// e^t (1 − t²/n) ≤ (1 + t/n)^n ≤ e^t; requires n ≥ 1 and |t| ≤ n.
bool fact_bounds_check(double n, double t);

/// Shared slot-budget formula ⌈scale · 8 c / p · ln n⌉.
Slot whp_slot_budget(double p, const NetworkParams& params, std::size_t n);

}  // namespace sinrnet
