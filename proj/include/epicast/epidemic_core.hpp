#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace epicast {

// Per-packet SIR state shared by the contact-process and spatial simulators.
// A node is infectious for packet j during [recv_time, recv_time + tau_type)
// and refuses j forever after; recipients are sets, duplicates are no-ops.
class SirEngine {
 public:
  SirEngine(std::vector<int> type_of, std::vector<double> tau_per_type,
            int num_packets)
      : type_of_(std::move(type_of)),
        tau_(std::move(tau_per_type)),
        num_packets_(num_packets),
        recv_time_(num_packets,
                   std::vector<double>(type_of_.size(),
                                       std::numeric_limits<double>::quiet_NaN())) {}

  int num_nodes() const { return static_cast<int>(type_of_.size()); }
  int num_packets() const { return num_packets_; }

  bool informed(int packet, int node) const {
    return !std::isnan(recv_time_[packet][node]);
  }

  bool active(int packet, int node, double t) const {
    const double r = recv_time_[packet][node];
    return !std::isnan(r) && t >= r && t < r + tau_[type_of_[node]];
  }

  bool any_active(int node, double t) const {
    for (int p = 0; p < num_packets_; ++p)
      if (active(p, node, t)) return true;
    return false;
  }

  void seed(int packet, int node, double t) { deliver(packet, node, t); }

  // Meeting between u and v at time t: every packet u is currently
  // infectious for is handed to v if v has never held it, and vice versa.
  // Returns the (packet, receiver) deliveries that happened.
  template <typename OnDeliver>
  void on_meeting(double t, int u, int v, OnDeliver&& on_deliver) {
    for (int p = 0; p < num_packets_; ++p) {
      if (active(p, u, t) && !informed(p, v)) {
        deliver(p, v, t);
        on_deliver(p, v);
      } else if (active(p, v, t) && !informed(p, u)) {
        deliver(p, u, t);
        on_deliver(p, u);
      }
    }
  }

  void on_meeting(double t, int u, int v) {
    on_meeting(t, u, v, [](int, int) {});
  }

  double recv_time(int packet, int node) const { return recv_time_[packet][node]; }

  // No infection can happen after this instant.
  double latest_window_end() const { return latest_window_end_; }

  int recipients(int packet) const {
    int n = 0;
    for (int v = 0; v < num_nodes(); ++v)
      if (informed(packet, v)) ++n;
    return n;
  }

  std::vector<int> recipients_per_type(int packet, int num_types) const {
    std::vector<int> c(num_types, 0);
    for (int v = 0; v < num_nodes(); ++v)
      if (informed(packet, v)) ++c[type_of_[v]];
    return c;
  }

  int distinct_packets(int node) const {
    int n = 0;
    for (int p = 0; p < num_packets_; ++p)
      if (informed(p, node)) ++n;
    return n;
  }

  const std::vector<int>& type_of() const { return type_of_; }
  double tau_of(int node) const { return tau_[type_of_[node]]; }

 private:
  void deliver(int packet, int node, double t) {
    recv_time_[packet][node] = t;
    latest_window_end_ = std::max(latest_window_end_, t + tau_[type_of_[node]]);
  }

  std::vector<int> type_of_;
  std::vector<double> tau_;
  int num_packets_;
  std::vector<std::vector<double>> recv_time_; // [packet][node], NaN = susceptible
  double latest_window_end_ = 0.0;
};

struct ScenarioConfig;
struct SimOutcome;
namespace loadopt { struct SourceAllocation; }

// Node index -> type index, nodes grouped by type in config order.
std::vector<int> build_type_of(const ScenarioConfig& cfg);

// Packet j's source is the j-th node slot in the ascending-extinction fill
// order; within a type, nodes are taken in index order.
std::vector<int> source_nodes(const ScenarioConfig& cfg,
                              const loadopt::SourceAllocation& sources);

SimOutcome collect_outcome(const SirEngine& engine, const ScenarioConfig& cfg,
                           const std::vector<int>& src_nodes,
                           std::uint64_t seed, int replication);

} // namespace epicast
