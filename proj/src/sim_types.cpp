#include "epicast/sim_types.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace epicast {

bool spread_out_classifier(int recipients, int total_nodes,
                           double threshold_fraction) {
  if (threshold_fraction <= 0.0 || threshold_fraction >= 1.0)
    throw std::domain_error("spread_out_classifier: threshold in (0,1)");
  return recipients >= threshold_fraction * total_nodes;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over master xored with the mixed index.
  std::uint64_t z = master ^ (index + 0x9e3779b97f4a7c15ULL) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

BatchSummary summarize(const std::vector<SimOutcome>& outcomes,
                       const std::vector<int>& counts_per_type,
                       std::uint64_t master_seed) {
  BatchSummary s;
  s.replications = static_cast<int>(outcomes.size());
  s.seed = master_seed;
  if (outcomes.empty()) return s;

  int total_nodes = 0;
  for (int c : counts_per_type) total_nodes += c;

  const size_t num_packets = outcomes.front().packets.size();
  s.packets.resize(num_packets);
  for (size_t p = 0; p < num_packets; ++p) {
    auto& ps = s.packets[p];
    ps.packet = static_cast<int>(p);
    ps.source_type = outcomes.front().packets[p].source_type;
    ps.mean_fraction.assign(counts_per_type.size(), 0.0);
    int spread = 0;
    for (const auto& o : outcomes) {
      const auto& pr = o.packets[p];
      ps.mean_overall_fraction += static_cast<double>(pr.total_recipients) / total_nodes;
      if (pr.spread_out) {
        ++spread;
        for (size_t h = 0; h < counts_per_type.size(); ++h)
          ps.mean_fraction[h] +=
              static_cast<double>(pr.recipients_per_type[h]) / counts_per_type[h];
      }
    }
    ps.spread_out_freq = static_cast<double>(spread) / outcomes.size();
    ps.mean_overall_fraction /= outcomes.size();
    if (spread > 0)
      for (auto& f : ps.mean_fraction) f /= spread;
  }

  double sum = 0.0, sumsq = 0.0;
  for (const auto& o : outcomes) {
    sum += static_cast<double>(o.complement_packets);
    sumsq += static_cast<double>(o.complement_packets) *
             static_cast<double>(o.complement_packets);
  }
  const double n = static_cast<double>(outcomes.size());
  s.complement_mean = sum / n;
  s.complement_std =
      n > 1 ? std::sqrt(std::max(0.0, (sumsq - sum * sum / n) / (n - 1))) : 0.0;
  return s;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EPICAST_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) workers = v;
  }
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

} // namespace epicast
