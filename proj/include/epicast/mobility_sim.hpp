#pragma once

#include <optional>
#include <random>

#include "epicast/loadopt.hpp"
#include "epicast/scenario.hpp"
#include "epicast/sim_types.hpp"

namespace epicast::mobsim {

struct NodeKinematics {
  double x = 0.0, y = 0.0; // in (0, L]^2
  double heading = 0.0;    // radians
  double speed = 0.0;      // m/s
  double next_turn = 0.0;  // absolute time of the next heading redraw
};

struct MobilityState {
  std::vector<NodeKinematics> nodes;
  std::vector<int> type_of;
  double side = 0.0;
  double time = 0.0;
};

struct MeetingEvent {
  double time = 0.0;
  int u = -1, v = -1; // u < v
};

// Shortest displacement on the torus (minimum-image convention).
double torus_distance(double ax, double ay, double bx, double by, double side);

// Uniform placement, uniform headings, exponential turn epochs.
MobilityState init_state(const ScenarioConfig& cfg, std::mt19937_64& rng);

// Random-direction step: straight motion at constant speed, heading redrawn
// at exponential epochs, position wrapped modulo L.
void step_mobility(MobilityState& state, double dt, double hold_mean_s,
                   std::mt19937_64& rng);

// dt = min(0.1 s, r0 / (4 v_max)); guarantees no pair can tunnel through the
// contact disk between ticks.
double auto_time_step(const ScenarioConfig& cfg);

// Tracks pairwise connectivity and reports entry events (distance newly
// <= r0). Pairs already in range at the first update count as meeting then.
class MeetingDetector {
 public:
  MeetingDetector(double side, double radio_range, int num_nodes);

  // Returns entry events at the state's current time, sorted by pair id.
  std::vector<MeetingEvent> update(const MobilityState& state);

 private:
  double side_, range_;
  int n_, cells_;
  double cell_size_;
  std::vector<char> connected_;
  std::vector<int> cell_head_, next_in_cell_;
};

struct RateEstimate {
  ContactMatrix rates;                      // MLE per type pair; 0 when unestimated
  std::vector<std::vector<long long>> samples; // inter-meeting samples per type pair
  Matrix ci_low, ci_high;                   // 95% normal-approximation interval
  bool estimated(int h, int k) const { return samples[h][k] > 0; }
};

// Mobility-only run; inter-meeting times pooled over node pairs per type pair,
// rate = (#samples) / (sum of samples). Samples before warmup are discarded.
RateEstimate estimate_rates(const ScenarioConfig& cfg, double warmup_s,
                            double duration_s);

// Full spatial pipeline with the same SIR semantics as the contact simulator;
// a meeting delivers every packet the infectious endpoint currently carries.
SimOutcome run_spatial_epidemic(const ScenarioConfig& cfg,
                                const loadopt::SourceAllocation& sources,
                                std::optional<double> horizon,
                                std::uint64_t seed, int replication = 0);

std::vector<SimOutcome> run_spatial_batch(const ScenarioConfig& cfg,
                                          const loadopt::SourceAllocation& sources,
                                          int replications,
                                          std::uint64_t master_seed,
                                          std::optional<double> horizon = std::nullopt,
                                          BatchSummary* summary = nullptr);

} // namespace epicast::mobsim
