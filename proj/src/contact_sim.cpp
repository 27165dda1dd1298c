#include "epicast/contact_sim.hpp"

#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>

#include "epicast/epidemic_core.hpp"

namespace epicast::contactsim {
namespace {

double exp_sample(std::mt19937_64& rng, double rate) {
  // Hand-rolled inverse transform keeps the draw sequence stable across
  // standard-library implementations.
  const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  return -std::log(u) / rate;
}

struct Event {
  double time;
  int u, v;
  bool operator>(const Event& o) const { return time > o.time; }
};

using EventQueue = std::priority_queue<Event, std::vector<Event>, std::greater<Event>>;

// Single-packet epidemic on its own meeting randomness. Exact for Poisson
// pairwise meetings: only the first meeting of each (infection, pair) can
// transmit, and it is sampled lazily by memorylessness.
void run_single_packet(const ScenarioConfig& cfg, const Matrix& rates,
                       const std::vector<int>& type_of, SirEngine& engine,
                       int packet, int source, double horizon,
                       std::mt19937_64& rng) {
  const int n = static_cast<int>(type_of.size());
  EventQueue queue;

  auto schedule_from = [&](int u, double t) {
    const double window_end = std::min(t + engine.tau_of(u), horizon);
    if (t >= window_end) return;
    const int hu = type_of[u];
    for (int v = 0; v < n; ++v) {
      if (v == u || engine.informed(packet, v)) continue;
      const double rate = rates[hu][type_of[v]];
      if (rate <= 0.0) continue;
      const double meet = std::isinf(rate) ? t : t + exp_sample(rng, rate);
      if (meet < window_end) queue.push({meet, u, v});
    }
  };

  engine.seed(packet, source, 0.0);
  schedule_from(source, 0.0);
  while (!queue.empty()) {
    const Event e = queue.top();
    queue.pop();
    if (engine.informed(packet, e.v)) continue;
    engine.seed(packet, e.v, e.time);
    schedule_from(e.v, e.time);
  }
}

// All packets on one pairwise meeting process. At most one pending meeting
// per pair; the stream is resampled only while an endpoint carries an active
// packet, which is exact by memorylessness.
void run_shared(const ScenarioConfig& cfg, const Matrix& rates,
                const std::vector<int>& type_of, SirEngine& engine,
                const std::vector<int>& src_nodes, double horizon,
                std::mt19937_64& rng) {
  const int n = static_cast<int>(type_of.size());
  EventQueue queue;
  std::vector<char> scheduled(static_cast<size_t>(n) * n, 0);
  auto pair_index = [n](int u, int v) {
    return static_cast<size_t>(std::min(u, v)) * n + std::max(u, v);
  };

  std::vector<std::pair<int, double>> receipts; // (node, time) cascade
  auto process_receipt = [&](int node, double t) {
    receipts.emplace_back(node, t);
    while (!receipts.empty()) {
      auto [u, tu] = receipts.back();
      receipts.pop_back();
      const int hu = type_of[u];
      // Permanently connected neighbours hear everything immediately.
      for (int v = 0; v < n; ++v) {
        if (v == u || !std::isinf(rates[hu][type_of[v]])) continue;
        engine.on_meeting(tu, u, v,
                          [&](int, int recv) { receipts.emplace_back(recv, tu); });
      }
      for (int v = 0; v < n; ++v) {
        if (v == u) continue;
        const double rate = rates[hu][type_of[v]];
        if (rate <= 0.0 || std::isinf(rate)) continue;
        const size_t pi = pair_index(u, v);
        if (scheduled[pi]) continue;
        const double meet = tu + exp_sample(rng, rate);
        if (meet < horizon) {
          queue.push({meet, u, v});
          scheduled[pi] = 1;
        }
      }
    }
  };

  for (size_t j = 0; j < src_nodes.size(); ++j) {
    engine.seed(static_cast<int>(j), src_nodes[j], 0.0);
    process_receipt(src_nodes[j], 0.0);
  }

  while (!queue.empty()) {
    const Event e = queue.top();
    queue.pop();
    scheduled[pair_index(e.u, e.v)] = 0;
    engine.on_meeting(e.time, e.u, e.v,
                      [&](int, int recv) { process_receipt(recv, e.time); });
    if (engine.any_active(e.u, e.time) || engine.any_active(e.v, e.time)) {
      const double rate = rates[type_of[e.u]][type_of[e.v]];
      const double meet = e.time + exp_sample(rng, rate);
      if (meet < horizon) {
        queue.push({meet, e.u, e.v});
        scheduled[pair_index(e.u, e.v)] = 1;
      }
    }
  }
}

} // namespace

SimOutcome run_replication(const ScenarioConfig& cfg,
                           const loadopt::SourceAllocation& sources,
                           std::optional<double> horizon, MeetingMode mode,
                           std::uint64_t seed, int replication) {
  if (!cfg.contact_rates)
    throw std::runtime_error("contactsim: scenario has no contact_rates");
  const Matrix& rates = cfg.contact_rates->rates_hz;
  const std::vector<int> type_of = build_type_of(cfg);
  const int n = static_cast<int>(type_of.size());
  const double t_end = horizon.value_or(std::numeric_limits<double>::infinity());

  std::vector<double> tau(cfg.num_types());
  for (int h = 0; h < cfg.num_types(); ++h) tau[h] = cfg.types[h].active_period_s;

  const std::vector<int> src_nodes = source_nodes(cfg, sources);
  const int beta = static_cast<int>(src_nodes.size());
  SirEngine engine(type_of, tau, beta);

  if (mode == MeetingMode::shared) {
    std::mt19937_64 rng(seed);
    run_shared(cfg, rates, type_of, engine, src_nodes, t_end, rng);
  } else {
    for (int j = 0; j < beta; ++j) {
      std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
      run_single_packet(cfg, rates, type_of, engine, j, src_nodes[j], t_end, rng);
    }
  }

  return collect_outcome(engine, cfg, src_nodes, seed, replication);
}

std::vector<SimOutcome> run_batch(const ScenarioConfig& cfg,
                                  const loadopt::SourceAllocation& sources,
                                  int replications, std::uint64_t master_seed,
                                  std::optional<double> horizon, MeetingMode mode,
                                  BatchSummary* summary) {
  if (replications < 1)
    throw std::domain_error("run_batch: replications >= 1");
  std::vector<SimOutcome> outcomes(replications);
  parallel_for(replications, [&](int i) {
    outcomes[i] = run_replication(cfg, sources, horizon, mode,
                                  derive_seed(master_seed, i), i);
  });
  if (summary) {
    std::vector<int> counts;
    for (const auto& t : cfg.types) counts.push_back(t.count);
    *summary = summarize(outcomes, counts, master_seed);
  }
  return outcomes;
}

} // namespace epicast::contactsim
