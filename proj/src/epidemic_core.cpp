#include "epicast/epidemic_core.hpp"

#include <algorithm>

#include "epicast/loadopt.hpp"
#include "epicast/scenario.hpp"
#include "epicast/sim_types.hpp"

namespace epicast {

std::vector<int> build_type_of(const ScenarioConfig& cfg) {
  std::vector<int> type_of;
  type_of.reserve(cfg.total_nodes());
  for (int h = 0; h < cfg.num_types(); ++h)
    type_of.insert(type_of.end(), cfg.types[h].count, h);
  return type_of;
}

std::vector<int> source_nodes(const ScenarioConfig& cfg,
                              const loadopt::SourceAllocation& sources) {
  std::vector<int> first_of_type(cfg.num_types());
  int base = 0;
  for (int h = 0; h < cfg.num_types(); ++h) {
    first_of_type[h] = base;
    base += cfg.types[h].count;
  }
  std::vector<int> nodes;
  for (int t : sources.ordering)
    for (int i = 0; i < sources.per_type_counts[t]; ++i)
      nodes.push_back(first_of_type[t] + i);
  return nodes;
}

SimOutcome collect_outcome(const SirEngine& engine, const ScenarioConfig& cfg,
                           const std::vector<int>& src_nodes,
                           std::uint64_t seed, int replication) {
  const int n = engine.num_nodes();
  SimOutcome out;
  out.replication = replication;
  out.seed = seed;
  out.packets.resize(src_nodes.size());
  for (size_t j = 0; j < src_nodes.size(); ++j) {
    auto& pr = out.packets[j];
    pr.source_node = src_nodes[j];
    pr.source_type = engine.type_of()[src_nodes[j]];
    pr.total_recipients = engine.recipients(static_cast<int>(j));
    pr.recipients_per_type =
        engine.recipients_per_type(static_cast<int>(j), cfg.num_types());
    pr.spread_out =
        spread_out_classifier(pr.total_recipients, n, cfg.spread_threshold);
  }
  out.packets_per_node.resize(n);
  for (int v = 0; v < n; ++v) {
    const int b = engine.distinct_packets(v);
    out.packets_per_node[v] = b;
    out.complement_packets += std::max(0, cfg.message_count - b);
  }
  return out;
}

} // namespace epicast
