#pragma once

#include <optional>

#include "epicast/loadopt.hpp"
#include "epicast/scenario.hpp"
#include "epicast/sim_types.hpp"

namespace epicast::contactsim {

// per_packet: each packet's epidemic runs on its own meeting randomness (the
// independence approximation behind the Binomial load model).
// shared: all packets ride one pairwise meeting process, exposing the true
// correlation between packets at a node.
enum class MeetingMode { per_packet, shared };

SimOutcome run_replication(const ScenarioConfig& cfg,
                           const loadopt::SourceAllocation& sources,
                           std::optional<double> horizon, MeetingMode mode,
                           std::uint64_t seed, int replication = 0);

std::vector<SimOutcome> run_batch(const ScenarioConfig& cfg,
                                  const loadopt::SourceAllocation& sources,
                                  int replications, std::uint64_t master_seed,
                                  std::optional<double> horizon = std::nullopt,
                                  MeetingMode mode = MeetingMode::per_packet,
                                  BatchSummary* summary = nullptr);

} // namespace epicast::contactsim
