#include "epicast/loadopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace epicast::loadopt {
namespace {

// Builds the per-slot type sequence for pushing beta packets: types ordered by
// ascending extinction probability, each filled to capacity before the next.
std::vector<int> slot_types(const SourceAllocation& alloc) {
  std::vector<int> slots;
  for (int t : alloc.ordering)
    slots.insert(slots.end(), alloc.per_type_counts[t], t);
  return slots;
}

double weighted_fraction(const analytic::AnalyticResult& a,
                         const std::vector<int>& counts) {
  double total = 0.0, weighted = 0.0;
  for (size_t i = 0; i < counts.size(); ++i) {
    total += counts[i];
    weighted += counts[i] * a.fractions[i];
  }
  return weighted / total;
}

std::vector<int> type_counts(const ScenarioConfig& cfg) {
  std::vector<int> c;
  c.reserve(cfg.types.size());
  for (const auto& t : cfg.types) c.push_back(t.count);
  return c;
}

} // namespace

double complement_load_coded(int total_nodes, int message_count, int beta,
                             double z1) {
  if (std::isnan(z1) || z1 < 0.0 || z1 > 1.0)
    throw std::domain_error("complement_load_coded: z1 must be in [0,1]");
  if (beta < 1) throw std::domain_error("complement_load_coded: beta >= 1");
  if (z1 == 0.0) return static_cast<double>(total_nodes) * message_count;
  if (z1 == 1.0)
    return static_cast<double>(total_nodes) * std::max(0, message_count - beta);

  const double lz = std::log(z1);
  const double l1z = std::log1p(-z1);
  double expect = 0.0;
  const int bmax = std::min(message_count - 1, beta);
  for (int b = 0; b <= bmax; ++b) {
    const double logc = std::lgamma(beta + 1.0) - std::lgamma(b + 1.0) -
                        std::lgamma(beta - b + 1.0);
    expect += (message_count - b) * std::exp(logc + b * lz + (beta - b) * l1z);
  }
  return total_nodes * expect;
}

double complement_load_coded_mixed(int total_nodes, int message_count,
                                   const std::vector<double>& per_packet_z) {
  if (per_packet_z.empty())
    throw std::domain_error("complement_load_coded_mixed: no packets");
  // dp[b] = P(node holds exactly b distinct packets), b < M; mass at >= M is
  // irrelevant to the expectation and is dropped.
  std::vector<double> dp(message_count, 0.0);
  dp[0] = 1.0;
  for (double p : per_packet_z) {
    if (std::isnan(p) || p < 0.0 || p > 1.0)
      throw std::domain_error("complement_load_coded_mixed: z outside [0,1]");
    for (int b = message_count - 1; b >= 1; --b)
      dp[b] = dp[b] * (1.0 - p) + dp[b - 1] * p;
    dp[0] *= (1.0 - p);
  }
  double expect = 0.0;
  for (int b = 0; b < message_count; ++b) expect += (message_count - b) * dp[b];
  return total_nodes * expect;
}

SourceAllocation allocate_sources(const std::vector<double>& extinction,
                                  const std::vector<int>& counts, int beta) {
  if (extinction.size() != counts.size())
    throw std::domain_error("allocate_sources: size mismatch");
  const long capacity = std::accumulate(counts.begin(), counts.end(), 0L);
  if (beta < 0 || beta > capacity)
    throw std::domain_error("allocate_sources: beta exceeds node count");

  SourceAllocation alloc;
  alloc.ordering.resize(extinction.size());
  std::iota(alloc.ordering.begin(), alloc.ordering.end(), 0);
  std::stable_sort(alloc.ordering.begin(), alloc.ordering.end(),
                   [&](int a, int b) { return extinction[a] < extinction[b]; });

  alloc.per_type_counts.assign(counts.size(), 0);
  int remaining = beta;
  for (int t : alloc.ordering) {
    const int take = std::min(remaining, counts[t]);
    alloc.per_type_counts[t] = take;
    remaining -= take;
    if (remaining == 0) break;
  }
  return alloc;
}

std::vector<int> uncoded_even_allocation(int message_count, int beta) {
  if (message_count < 1)
    throw std::domain_error("uncoded_even_allocation: message_count >= 1");
  if (beta < 0) throw std::domain_error("uncoded_even_allocation: beta >= 0");
  std::vector<int> copies(message_count, beta / message_count);
  for (int m = 0; m < beta % message_count; ++m) ++copies[m];
  return copies;
}

double complement_load_uncoded(const ScenarioConfig& cfg,
                               const analytic::AnalyticResult& analysis,
                               const std::vector<int>& copies_per_message) {
  const int n = cfg.total_nodes();
  const int beta =
      std::accumulate(copies_per_message.begin(), copies_per_message.end(), 0);
  const double zbar = weighted_fraction(analysis, type_counts(cfg));

  // Copies occupy source slots in the same ascending-extinction fill order as
  // the coded case, messages taking consecutive slots in index order.
  std::vector<int> slots;
  if (beta > 0)
    slots = slot_types(allocate_sources(analysis.extinction, type_counts(cfg), beta));

  double y = 0.0;
  size_t slot = 0;
  for (int copies : copies_per_message) {
    if (copies < 0)
      throw std::domain_error("complement_load_uncoded: negative copy count");
    double extinct = 1.0;
    for (int c = 0; c < copies; ++c)
      extinct *= analysis.extinction[slots[slot++]];
    const double z = copies == 0 ? 0.0 : zbar * (1.0 - extinct);
    y += n * (1.0 - z);
  }
  return y;
}

LoadCurve optimize_beta(const ScenarioConfig& cfg, Coding coding) {
  const auto report = validate_scenario(cfg);
  if (!report.ok())
    throw std::runtime_error("optimize_beta: invalid scenario\n" + report.describe());

  const analytic::AnalyticResult analysis = analytic::analyze(cfg);
  const int n = cfg.total_nodes();
  const int m = cfg.message_count;
  const double zbar = weighted_fraction(analysis, type_counts(cfg));

  LoadCurve curve;
  curve.coding = coding;
  curve.entries.reserve(n);

  if (coding == Coding::erasure_coded) {
    // One distinct packet per slot: its spread probability depends only on
    // the slot's type. The distinct-packet count B is Poisson-binomial; the
    // dp extends incrementally as beta grows.
    const std::vector<int> slots =
        slot_types(allocate_sources(analysis.extinction, type_counts(cfg), n));
    std::vector<double> dp(m, 0.0);
    dp[0] = 1.0;
    for (int beta = 1; beta <= n; ++beta) {
      const double p = zbar * (1.0 - analysis.extinction[slots[beta - 1]]);
      for (int b = m - 1; b >= 1; --b)
        dp[b] = dp[b] * (1.0 - p) + dp[b - 1] * p;
      dp[0] *= (1.0 - p);
      double expect = 0.0;
      for (int b = 0; b < m; ++b) expect += (m - b) * dp[b];
      const double y = n * expect;
      curve.entries.push_back({beta, y, beta + y});
    }
  } else {
    for (int beta = 1; beta <= n; ++beta) {
      const double y =
          complement_load_uncoded(cfg, analysis, uncoded_even_allocation(m, beta));
      curve.entries.push_back({beta, y, beta + y});
    }
  }

  curve.best_beta = curve.entries.front().beta;
  curve.best_total = curve.entries.front().total;
  for (const auto& e : curve.entries) {
    if (e.total < curve.best_total) {
      curve.best_total = e.total;
      curve.best_beta = e.beta;
    }
  }
  return curve;
}

} // namespace epicast::loadopt
