#pragma once

#include <vector>

#include "epicast/analytic.hpp"
#include "epicast/scenario.hpp"

namespace epicast::loadopt {

enum class Coding { erasure_coded, uncoded };

struct LoadPoint {
  int beta = 0;
  double complement = 0.0; // expected complement-phase packets Y
  double total = 0.0;      // beta + Y
};

struct LoadCurve {
  std::vector<LoadPoint> entries;
  int best_beta = 0;
  double best_total = 0.0;
  Coding coding = Coding::erasure_coded;
};

// Which node types host the beta initially pushed packets.
struct SourceAllocation {
  std::vector<int> per_type_counts; // beta_h, sums to beta
  std::vector<int> ordering;        // type indices sorted by ascending extinction prob
};

// Expected complement-phase load N * E[(M - B)+] with B ~ Binomial(beta, z1).
double complement_load_coded(int total_nodes, int message_count, int beta, double z1);

// Same expectation when the per-packet reception probabilities differ
// (Poisson-binomial B), as happens once the source fill order crosses types.
double complement_load_coded_mixed(int total_nodes, int message_count,
                                   const std::vector<double>& per_packet_z);

// Fill types in ascending extinction probability, overflowing to the next
// type; ties break on type index.
SourceAllocation allocate_sources(const std::vector<double>& extinction,
                                  const std::vector<int>& counts, int beta);

// Even split of beta copies over M messages, remainder to the lowest indices.
std::vector<int> uncoded_even_allocation(int message_count, int beta);

// No-coding benchmark: Y = N * sum_m (1 - z(beta_m)), where z(beta_m) is the
// multi-source fraction for the beta_m copies of message m.
double complement_load_uncoded(const ScenarioConfig& cfg,
                               const analytic::AnalyticResult& analysis,
                               const std::vector<int>& copies_per_message);

// Sweeps beta over {1..N}, smallest beta wins ties.
LoadCurve optimize_beta(const ScenarioConfig& cfg, Coding coding);

} // namespace epicast::loadopt
