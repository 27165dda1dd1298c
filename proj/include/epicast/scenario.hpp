#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace epicast {

using Matrix = std::vector<std::vector<double>>;

// One class of nodes sharing mobility and sharing behaviour.
struct NodeTypeSpec {
  int id = 0;                   // 1-based type index
  int count = 0;                // number of nodes of this type
  double speed_mps = 0.0;       // 0 for static nodes / access points
  double active_period_s = 0.0; // retransmission window after receiving a packet
};

// Pairwise inter-meeting rates. rates_hz[h][k] is the rate of the Poisson
// meeting process between one type-h node and one type-k node. An entry of
// +infinity models a permanently connected pair (e.g. wired APs).
struct ContactMatrix {
  Matrix rates_hz;

  int size() const { return static_cast<int>(rates_hz.size()); }
  double at(int h, int k) const { return rates_hz[h][k]; }
};

struct ScenarioConfig {
  std::vector<NodeTypeSpec> types;
  double side_length_m = 0.0; // torus side L
  double radio_range_m = 0.0; // unit-disk radius r0
  int message_count = 1;      // M
  std::optional<ContactMatrix> contact_rates;
  std::uint64_t rng_seed = 0;

  // Initial push: beta packets to beta distinct nodes. When source_counts is
  // absent the per-type split is chosen by the sharing-maximisation rule.
  int initial_packets = 1;
  std::optional<std::vector<int>> source_counts;

  // Mobility parameters (spatial simulator only).
  double direction_hold_mean_s = 60.0; // mean of exponential heading-change epochs
  double time_step_s = 0.0;            // 0 selects min(0.1, r0 / (4 v_max))

  // Fraction of N above which a packet counts as spread out.
  double spread_threshold = 0.1;

  int num_types() const { return static_cast<int>(types.size()); }
  int total_nodes() const;
  double max_speed() const;
};

struct ValidationIssue {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string describe() const;
};

// Checks every structural invariant; never throws, never mutates.
ValidationReport validate_scenario(const ScenarioConfig& cfg);

// Probability that a type-h node meets a given type-k node during its active
// period: 1 - exp(-rate * tau). An infinite rate with tau > 0 yields exactly 1.
double meeting_probability(double rate_hz, double active_period_s);

// gamma[h][k] = meeting_probability(rates[h][k], tau_h). Asymmetric in general
// because the transmitter's active period is used.
Matrix gamma_matrix(const ScenarioConfig& cfg);

// Mean offspring matrix: entry (h,k) = N_k * gamma[h][k].
Matrix mean_offspring_matrix(const ScenarioConfig& cfg);

} // namespace epicast
