#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace epicast {

struct PacketResult {
  int source_node = -1;
  int source_type = -1;
  bool spread_out = false;
  int total_recipients = 0;            // includes the source
  std::vector<int> recipients_per_type;
};

struct SimOutcome {
  int replication = 0;
  std::uint64_t seed = 0;
  std::vector<PacketResult> packets;
  std::vector<int> packets_per_node;   // distinct packets B held by each node
  long long complement_packets = 0;    // sum over nodes of (M - B)+
};

struct PacketSummary {
  int packet = 0;
  int source_type = -1;
  double spread_out_freq = 0.0;
  // Mean recipient fraction per type among spread-out replications.
  std::vector<double> mean_fraction;
  // Unconditional mean overall fraction of recipients.
  double mean_overall_fraction = 0.0;
};

struct BatchSummary {
  int replications = 0;
  std::uint64_t seed = 0;
  std::vector<PacketSummary> packets;
  double complement_mean = 0.0;
  double complement_std = 0.0;
};

// A packet counts as spread out once its recipients reach the given fraction
// of the population.
bool spread_out_classifier(int recipients, int total_nodes, double threshold_fraction);

BatchSummary summarize(const std::vector<SimOutcome>& outcomes,
                       const std::vector<int>& counts_per_type,
                       std::uint64_t master_seed);

// Per-replication seed derivation (splitmix64 of master ^ mixed index), so a
// batch can be extended without recomputing earlier replications.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Replication-level parallel map; worker count from the EPICAST_THREADS
// environment variable (default: hardware concurrency). Results are indexed,
// so output order never depends on scheduling.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace epicast
