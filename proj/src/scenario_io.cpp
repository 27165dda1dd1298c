#include "epicast/scenario_io.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace epicast {
namespace {

using nlohmann::json;

double rate_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity")
      return std::numeric_limits<double>::infinity();
    throw std::runtime_error("contact rate string must be \"inf\"");
  }
  return j.get<double>();
}

json rate_to_json(double r) {
  if (std::isinf(r)) return json("inf");
  return json(r);
}

} // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
  json j = json::parse(json_text);
  ScenarioConfig cfg;
  for (const auto& t : j.at("types")) {
    NodeTypeSpec spec;
    spec.id = t.value("id", static_cast<int>(cfg.types.size()) + 1);
    spec.count = t.at("count").get<int>();
    spec.speed_mps = t.value("speed_mps", 0.0);
    spec.active_period_s = t.at("active_period_s").get<double>();
    cfg.types.push_back(spec);
  }
  cfg.side_length_m = j.at("side_length_m").get<double>();
  cfg.radio_range_m = j.at("radio_range_m").get<double>();
  cfg.message_count = j.value("message_count", 1);
  cfg.rng_seed = j.value("rng_seed", std::uint64_t{0});
  cfg.initial_packets = j.value("initial_packets", 1);
  if (j.contains("source_counts"))
    cfg.source_counts = j.at("source_counts").get<std::vector<int>>();
  if (j.contains("contact_rates_hz")) {
    ContactMatrix m;
    for (const auto& row : j.at("contact_rates_hz")) {
      m.rates_hz.emplace_back();
      for (const auto& e : row) m.rates_hz.back().push_back(rate_from_json(e));
    }
    cfg.contact_rates = std::move(m);
  }
  cfg.direction_hold_mean_s = j.value("direction_hold_mean_s", 60.0);
  cfg.time_step_s = j.value("time_step_s", 0.0);
  cfg.spread_threshold = j.value("spread_threshold", 0.1);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  for (const auto& t : cfg.types)
    j["types"].push_back({{"id", t.id},
                          {"count", t.count},
                          {"speed_mps", t.speed_mps},
                          {"active_period_s", t.active_period_s}});
  j["side_length_m"] = cfg.side_length_m;
  j["radio_range_m"] = cfg.radio_range_m;
  j["message_count"] = cfg.message_count;
  j["rng_seed"] = cfg.rng_seed;
  j["initial_packets"] = cfg.initial_packets;
  if (cfg.source_counts) j["source_counts"] = *cfg.source_counts;
  if (cfg.contact_rates) {
    json rows = json::array();
    for (const auto& row : cfg.contact_rates->rates_hz) {
      json r = json::array();
      for (double e : row) r.push_back(rate_to_json(e));
      rows.push_back(r);
    }
    j["contact_rates_hz"] = rows;
  }
  j["direction_hold_mean_s"] = cfg.direction_hold_mean_s;
  j["time_step_s"] = cfg.time_step_s;
  j["spread_threshold"] = cfg.spread_threshold;
  return j.dump(2);
}

void set_config_field(std::string& json_text, const std::string& path,
                      double value) {
  static const char* kValidPaths =
      "valid paths: side_length_m, radio_range_m, message_count, "
      "initial_packets, rng_seed, direction_hold_mean_s, time_step_s, "
      "spread_threshold, types[i].count, types[i].speed_mps, "
      "types[i].active_period_s, contact_rates_hz[i][j], source_counts[i]";

  // Translate bracket/dot addressing into a JSON pointer.
  std::string ptr = "/";
  for (char c : path) {
    if (c == '.' ) ptr += '/';
    else if (c == '[') ptr += '/';
    else if (c == ']') continue;
    else ptr += c;
  }
  json j = json::parse(json_text);
  json::json_pointer p(ptr);
  if (!j.contains(p)) {
    // Allow addressing optional fields that exist in the schema but not yet
    // in this file, as long as the parent exists.
    throw std::invalid_argument("unknown config path '" + path + "'; " + kValidPaths);
  }
  if (!j.at(p).is_number())
    throw std::invalid_argument("config path '" + path + "' is not numeric; " +
                                kValidPaths);
  // Integral fields stay integral.
  if (j.at(p).is_number_integer())
    j[p] = static_cast<std::int64_t>(value);
  else
    j[p] = value;
  json_text = j.dump(2);
}

} // namespace epicast
