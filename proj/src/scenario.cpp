#include "epicast/scenario.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace epicast {

int ScenarioConfig::total_nodes() const {
  int n = 0;
  for (const auto& t : types) n += t.count;
  return n;
}

double ScenarioConfig::max_speed() const {
  double v = 0.0;
  for (const auto& t : types) v = std::max(v, t.speed_mps);
  return v;
}

std::string ValidationReport::describe() const {
  std::ostringstream os;
  for (const auto& i : issues) os << i.field << ": " << i.message << "\n";
  return os.str();
}

ValidationReport validate_scenario(const ScenarioConfig& cfg) {
  ValidationReport report;
  auto fail = [&](std::string field, std::string msg) {
    report.issues.push_back({std::move(field), std::move(msg)});
  };

  if (cfg.types.empty()) fail("types", "at least one node type required");
  for (size_t i = 0; i < cfg.types.size(); ++i) {
    const auto& t = cfg.types[i];
    const std::string p = "types[" + std::to_string(i) + "]";
    if (t.count < 1) fail(p + ".count", "count >= 1");
    if (t.active_period_s < 0) fail(p + ".active_period_s", "active_period >= 0");
    if (t.speed_mps < 0) fail(p + ".speed_mps", "speed >= 0");
  }
  if (!(cfg.side_length_m > 0)) fail("side_length_m", "side_length > 0");
  if (!(cfg.radio_range_m > 0)) fail("radio_range_m", "radio_range > 0");
  if (cfg.radio_range_m >= cfg.side_length_m / 2)
    fail("radio_range_m", "radio_range >= L/2");
  if (cfg.message_count < 1) fail("message_count", "message_count >= 1");
  if (cfg.total_nodes() < 1) fail("types", "total node count >= 1");
  if (cfg.initial_packets < 1) fail("initial_packets", "initial_packets >= 1");
  if (cfg.initial_packets > cfg.total_nodes())
    fail("initial_packets", "initial_packets <= total node count");
  if (cfg.spread_threshold <= 0 || cfg.spread_threshold >= 1)
    fail("spread_threshold", "spread_threshold in (0,1)");
  if (cfg.direction_hold_mean_s <= 0)
    fail("direction_hold_mean_s", "direction_hold_mean > 0");

  if (cfg.contact_rates) {
    const auto& m = cfg.contact_rates->rates_hz;
    const size_t h = cfg.types.size();
    if (m.size() != h) {
      fail("contact_rates_hz", "matrix must be HxH");
    } else {
      for (size_t i = 0; i < h; ++i) {
        if (m[i].size() != h) {
          fail("contact_rates_hz[" + std::to_string(i) + "]", "row length must be H");
          continue;
        }
        for (size_t j = 0; j < h; ++j) {
          const double r = m[i][j];
          if (std::isnan(r) || r < 0)
            fail("contact_rates_hz[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                 "rate >= 0");
          else if (j > i && m[j].size() == h && m[j][i] != r)
            fail("contact_rates_hz[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                 "rates must be symmetric");
        }
      }
    }
  }

  if (cfg.source_counts) {
    if (cfg.source_counts->size() != cfg.types.size()) {
      fail("source_counts", "length must be H");
    } else {
      int total = 0;
      for (size_t i = 0; i < cfg.source_counts->size(); ++i) {
        const int b = (*cfg.source_counts)[i];
        if (b < 0) fail("source_counts[" + std::to_string(i) + "]", "count >= 0");
        if (i < cfg.types.size() && b > cfg.types[i].count)
          fail("source_counts[" + std::to_string(i) + "]", "count <= N_h");
        total += b;
      }
      if (total != cfg.initial_packets)
        fail("source_counts", "must sum to initial_packets");
    }
  }

  return report;
}

double meeting_probability(double rate_hz, double active_period_s) {
  if (std::isnan(rate_hz) || rate_hz < 0)
    throw std::domain_error("meeting_probability: rate must be >= 0");
  if (std::isnan(active_period_s) || active_period_s < 0)
    throw std::domain_error("meeting_probability: active_period must be >= 0");
  if (active_period_s == 0) return 0.0;
  if (std::isinf(rate_hz)) return 1.0; // permanently connected pair
  return -std::expm1(-rate_hz * active_period_s);
}

Matrix gamma_matrix(const ScenarioConfig& cfg) {
  if (!cfg.contact_rates)
    throw std::runtime_error("gamma_matrix: scenario has no contact_rates");
  const int h = cfg.num_types();
  if (cfg.contact_rates->size() != h)
    throw std::runtime_error("gamma_matrix: contact_rates dimension mismatch");
  Matrix g(h, std::vector<double>(h));
  for (int i = 0; i < h; ++i)
    for (int k = 0; k < h; ++k)
      g[i][k] = meeting_probability(cfg.contact_rates->at(i, k),
                                    cfg.types[i].active_period_s);
  return g;
}

Matrix mean_offspring_matrix(const ScenarioConfig& cfg) {
  Matrix m = gamma_matrix(cfg);
  for (auto& row : m)
    for (int k = 0; k < cfg.num_types(); ++k) row[k] *= cfg.types[k].count;
  return m;
}

} // namespace epicast
