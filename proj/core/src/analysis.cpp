#include "sinrnet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sinrnet {

ProbabilityAssignment::ProbabilityAssignment(std::vector<double> probs) : probs_(std::move(probs)) {
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0, 1]");
  }
}

ProbabilityAssignment ProbabilityAssignment::uniform(std::size_t n, double p) {
  return ProbabilityAssignment(std::vector<double>(n, p));
}

double gamma_bound(const NetworkParams& params, double gamma_ratio, std::size_t n) {
  if (n < 1) throw std::invalid_argument("gamma_bound: n must be >= 1");
  if (gamma_ratio < 1.0) throw std::invalid_argument("gamma_bound: Gamma must be >= 1");
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    sum += std::pow(static_cast<double>(i), -(params.alpha_hi - 1.0));
  }
  const double numerator = std::min(params.delta - 1.0, 1.0);
  return numerator / (120.0 * params.beta_hi * gamma_ratio * gamma_ratio * sum);
}

double prob_no_proximity_transmission(const Network& network, const ProbabilityAssignment& probs,
                                      NodeIndex v) {
  const double radius = 3.0 * network.r_max_global();
  double product = 1.0;
  for (NodeIndex u = 0; u < network.size(); ++u) {
    if (u != v && network.distance(u, v) < radius) product *= 1.0 - probs[u];
  }
  return product;
}

double expected_out_of_proximity_interference(const Network& network,
                                              const ProbabilityAssignment& probs, NodeIndex v,
                                              double exponent) {
  if (!(exponent > 1.0)) throw std::invalid_argument("attenuation exponent must be > 1");
  const Vec2 center = network.node(v).position;
  const double r_b = network.r_bcast(v);

  std::vector<NodeIndex> far;
  for (NodeIndex w = 0; w < network.size(); ++w) {
    if (w != v && ring_index(network, v, w).proximity == false && probs[w] > 0.0) {
      far.push_back(w);
    }
  }
  if (far.empty()) return 0.0;

  std::vector<Vec2> receivers{center};
  for (NodeIndex u : network.out_edges(v)) receivers.push_back(network.node(u).position);
  for (NodeIndex w : far) {
    const Vec2 p = network.node(w).position;
    const double d = distance(center, p);
    receivers.push_back({center.x + r_b * (p.x - center.x) / d, center.y + r_b * (p.y - center.y) / d});
  }

  double worst = 0.0;
  for (const Vec2& u : receivers) {
    double sum = 0.0;
    for (NodeIndex w : far) {
      const Node& node = network.node(w);
      sum += probs[w] * node.power / std::pow(distance(node.position, u), exponent);
    }
    worst = std::max(worst, sum);
  }
  return worst;
}

double out_of_proximity_interference_at(const Network& network, const ProbabilityAssignment& probs,
                                        NodeIndex v, Vec2 receiver, double exponent) {
  if (!(exponent > 1.0)) throw std::invalid_argument("attenuation exponent must be > 1");
  double sum = 0.0;
  for (NodeIndex w = 0; w < network.size(); ++w) {
    if (w == v || probs[w] <= 0.0 || ring_index(network, v, w).proximity) continue;
    const Node& node = network.node(w);
    sum += probs[w] * node.power / std::pow(distance(node.position, receiver), exponent);
  }
  return sum;
}

double ring_floor_interference(const Network& network, const ProbabilityAssignment& probs,
                               NodeIndex v) {
  const double r_bar = network.r_max_global();
  const double alpha = network.params().alpha_hi;
  double sum = 0.0;
  for (NodeIndex w = 0; w < network.size(); ++w) {
    if (w == v) continue;
    const RingClass cls = ring_index(network, v, w);
    if (cls.proximity) continue;
    sum += probs[w] * network.node(w).power / std::pow(cls.ring * r_bar, alpha);
  }
  return sum;
}

double ring_interference_bound(int i, double gamma, const NetworkParams& params,
                               double gamma_ratio) {
  if (i < 2) throw std::invalid_argument("ring_interference_bound: ring index must be >= 2");
  return 60.0 * gamma * params.beta_hi * params.noise_hi * gamma_ratio * gamma_ratio /
         std::pow(static_cast<double>(i), params.alpha_hi - 1.0);
}

double ring_bound_sum(int last_ring, double gamma, const NetworkParams& params,
                      double gamma_ratio) {
  double sum = 0.0;
  for (int i = 2; i <= last_ring; ++i) sum += ring_interference_bound(i, gamma, params, gamma_ratio);
  return sum;
}

double region_probability_sum(const Network& network, const ProbabilityAssignment& probs,
                              NodeIndex v) {
  double sum = probs[v];
  for (NodeIndex w : network.out_edges(v)) sum += probs[w];
  return sum;
}

double region_probability_sums(const Network& network, const ProbabilityAssignment& probs) {
  double worst = 0.0;
  for (NodeIndex v = 0; v < network.size(); ++v) {
    worst = std::max(worst, region_probability_sum(network, probs, v));
  }
  return worst;
}

void PowerTrace::add(Slot start, Slot length, double power) {
  if (length <= 0) return;
  if (power < 0.0) throw std::invalid_argument("PowerTrace: negative power");
  if (!segments_.empty()) {
    auto& back = segments_.back();
    if (back.power == power && back.start + back.length == start) {
      back.length += length;
      interval_length_ = std::max(interval_length_, start + length);
      return;
    }
  }
  segments_.push_back({start, length, power});
  interval_length_ = std::max(interval_length_, start + length);
}

void PowerTrace::record_transmission(Slot slot, double power) {
  transmissions_.emplace_back(slot, power);
}

std::vector<double> PowerTrace::levels() const {
  std::vector<double> out{0.0};
  for (const auto& s : segments_) {
    if (s.power > 0.0) out.push_back(s.power);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Slot> PowerTrace::counts_at_least() const {
  const auto lv = levels();
  std::vector<Slot> counts(lv.size(), 0);
  counts[0] = interval_length_;
  for (std::size_t j = 1; j < lv.size(); ++j) {
    for (const auto& s : segments_) {
      if (s.power >= lv[j]) counts[j] += s.length;
    }
  }
  return counts;
}

PowerGuarantee variable_power_guarantee(const PowerTrace& trace, double p,
                                        const NetworkParams& params, std::size_t n, double scale) {
  if (!(p > 0.0)) return {};
  const double threshold =
      scale * 8.0 * params.c_whp / p * std::log(static_cast<double>(n));
  const auto lv = trace.levels();
  const auto counts = trace.counts_at_least();
  for (std::size_t j = lv.size(); j-- > 1;) {
    if (static_cast<double>(counts[j]) > threshold) return {j, broadcast_range(lv[j], params)};
  }
  return {};
}

bool fact_bounds_check(std::span<const double> probs) {
  double sum = 0.0;
  double product = 1.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 0.5)) throw std::invalid_argument("fact_bounds_check: p outside [0, 1/2]");
    sum += p;
    product *= 1.0 - p;
  }
  constexpr double eps = 1e-12;
  const double lower = std::pow(0.25, sum);
  const double upper = std::exp(-sum);
  return lower <= product * (1.0 + eps) && product <= upper * (1.0 + eps);
}

bool fact_bounds_check(double n, double t) {
  if (!(n >= 1.0) || !(std::abs(t) <= n)) {
    throw std::invalid_argument("fact_bounds_check: need n >= 1 and |t| <= n");
  }
  constexpr double eps = 1e-12;
  const double middle = std::pow(1.0 + t / n, n);
  const double lower = std::exp(t) * (1.0 - t * t / n);
  const double upper = std::exp(t);
  return lower <= middle + eps * upper && middle <= upper * (1.0 + eps);
}

Slot whp_slot_budget(double p, const NetworkParams& params, std::size_t n) {
  if (!(p > 0.0)) throw std::invalid_argument("whp_slot_budget: p must be > 0");
  const double raw = params.scale * 8.0 * params.c_whp / p * std::log(static_cast<double>(n));
  return std::max<Slot>(1, static_cast<Slot>(std::ceil(raw)));
}

}  // namespace sinrnet
