// Command-line front end: analyze / simulate / optimize / rates / sweep.
// Every command writes CSV plus a manifest.json that records the resolved
// config and seed needed to reproduce the CSV byte for byte.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "epicast/analytic.hpp"
#include "epicast/contact_sim.hpp"
#include "epicast/loadopt.hpp"
#include "epicast/mobility_sim.hpp"
#include "epicast/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace epicast;

namespace {

constexpr const char* kVersion = "epicast 0.1.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_manifest(const fs::path& outdir, const std::string& command,
                    const ScenarioConfig& cfg, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
  nlohmann::json m;
  m["command"] = command;
  m["config"] = nlohmann::json::parse(scenario_to_json(cfg));
  m["seed"] = seed;
  m["outputs"] = outputs;
  m["version"] = kVersion;
  m["wall_clock_utc"] = std::chrono::duration_cast<std::chrono::seconds>(
                            std::chrono::system_clock::now().time_since_epoch())
                            .count();
  write_file(outdir / "manifest.json", m.dump(2) + "\n");
}

ScenarioConfig load_checked(const std::string& path) {
  ScenarioConfig cfg = load_scenario(path);
  const auto report = validate_scenario(cfg);
  if (!report.ok())
    throw std::runtime_error("invalid config " + path + ":\n" + report.describe());
  return cfg;
}

loadopt::SourceAllocation resolve_sources(const ScenarioConfig& cfg) {
  std::vector<int> counts;
  for (const auto& t : cfg.types) counts.push_back(t.count);
  if (cfg.source_counts) {
    loadopt::SourceAllocation alloc;
    alloc.per_type_counts = *cfg.source_counts;
    alloc.ordering.resize(counts.size());
    std::iota(alloc.ordering.begin(), alloc.ordering.end(), 0);
    return alloc;
  }
  if (cfg.contact_rates) {
    const auto analysis = analytic::analyze(cfg);
    return loadopt::allocate_sources(analysis.extinction, counts,
                                     cfg.initial_packets);
  }
  // No rates to rank types by: fill in config order.
  return loadopt::allocate_sources(std::vector<double>(counts.size(), 0.0),
                                   counts, cfg.initial_packets);
}

std::string analyze_csv(const ScenarioConfig& cfg) {
  const auto analysis = analytic::analyze(cfg);
  const auto alloc = resolve_sources(cfg);
  std::vector<int> counts;
  for (const auto& t : cfg.types) counts.push_back(t.count);
  const double z_beta = analytic::fraction_multi_source(
      mean_offspring_matrix(cfg), counts, alloc.per_type_counts);

  std::ostringstream csv;
  csv << "metric,type,value\n";
  csv << "spectral_radius,," << fmt(analysis.spectral_radius) << "\n";
  csv << "supercritical,," << (analysis.supercritical ? 1 : 0) << "\n";
  for (size_t h = 0; h < analysis.extinction.size(); ++h)
    csv << "w," << cfg.types[h].id << "," << fmt(analysis.extinction[h]) << "\n";
  for (size_t h = 0; h < analysis.fractions.size(); ++h)
    csv << "z_hat," << cfg.types[h].id << "," << fmt(analysis.fractions[h]) << "\n";
  csv << "z_beta,," << fmt(z_beta) << "\n";

  std::cout << "R_q = " << fmt(analysis.spectral_radius)
            << (analysis.supercritical ? " (supercritical)" : " (subcritical)")
            << "\n";
  std::cout << "type   w          z_hat\n";
  for (size_t h = 0; h < analysis.extinction.size(); ++h)
    std::printf("%-6d %-10.6f %-10.6f\n", cfg.types[h].id, analysis.extinction[h],
                analysis.fractions[h]);
  std::cout << "z(beta allocation) = " << fmt(z_beta) << "\n";
  return csv.str();
}

std::string summary_csv(const std::string& scenario, const ScenarioConfig& cfg,
                        const BatchSummary& summary) {
  std::ostringstream csv;
  csv << "scenario,packet_id,source_type,spread_out_freq";
  for (const auto& t : cfg.types) csv << ",mean_fraction_type_" << t.id;
  csv << ",complement_mean,complement_std,replications,seed\n";
  for (const auto& p : summary.packets) {
    csv << scenario << "," << p.packet << "," << cfg.types[p.source_type].id << ","
        << fmt(p.spread_out_freq);
    for (double f : p.mean_fraction) csv << "," << fmt(f);
    csv << "," << fmt(summary.complement_mean) << "," << fmt(summary.complement_std)
        << "," << summary.replications << "," << summary.seed << "\n";
  }
  return csv.str();
}

std::string replications_csv(const ScenarioConfig& cfg,
                             const std::vector<SimOutcome>& outcomes) {
  std::ostringstream csv;
  csv << "replication,seed,packet_id,source_type,spread_out,total_recipients";
  for (const auto& t : cfg.types) csv << ",recipients_type_" << t.id;
  csv << ",complement_packets\n";
  for (const auto& o : outcomes) {
    for (size_t j = 0; j < o.packets.size(); ++j) {
      const auto& p = o.packets[j];
      csv << o.replication << "," << o.seed << "," << j << ","
          << cfg.types[p.source_type].id << "," << (p.spread_out ? 1 : 0) << ","
          << p.total_recipients;
      for (int r : p.recipients_per_type) csv << "," << r;
      csv << "," << o.complement_packets << "\n";
    }
  }
  return csv.str();
}

std::string loadcurve_csv(const loadopt::LoadCurve& curve) {
  const char* coding =
      curve.coding == loadopt::Coding::erasure_coded ? "erasure_coded" : "uncoded";
  std::ostringstream csv;
  csv << "beta,Y,total,coding\n";
  for (const auto& e : curve.entries)
    csv << e.beta << "," << fmt(e.complement) << "," << fmt(e.total) << ","
        << coding << "\n";
  return csv.str();
}

std::string rates_csv(const ScenarioConfig& cfg, const mobsim::RateEstimate& est) {
  std::ostringstream csv;
  csv << "type_h,type_k,rate_hz,samples,ci_low,ci_high\n";
  const int h = cfg.num_types();
  for (int i = 0; i < h; ++i)
    for (int k = i; k < h; ++k)
      csv << cfg.types[i].id << "," << cfg.types[k].id << ","
          << fmt(est.rates.rates_hz[i][k]) << "," << est.samples[i][k] << ","
          << fmt(est.ci_low[i][k]) << "," << fmt(est.ci_high[i][k]) << "\n";
  return csv.str();
}

struct SimulateArgs {
  std::string engine = "contact";
  int reps = 500;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double horizon = 0.0; // 0 = steady state
  bool shared_meetings = false;
};

BatchSummary run_simulation(const ScenarioConfig& cfg, const SimulateArgs& args,
                            std::vector<SimOutcome>* outcomes_out) {
  const std::uint64_t seed = args.seed_set ? args.seed : cfg.rng_seed;
  const auto alloc = resolve_sources(cfg);
  const std::optional<double> horizon =
      args.horizon > 0.0 ? std::optional<double>(args.horizon) : std::nullopt;
  BatchSummary summary;
  std::vector<SimOutcome> outcomes;
  if (args.engine == "contact") {
    outcomes = contactsim::run_batch(
        cfg, alloc, args.reps, seed, horizon,
        args.shared_meetings ? contactsim::MeetingMode::shared
                             : contactsim::MeetingMode::per_packet,
        &summary);
  } else if (args.engine == "spatial") {
    outcomes = mobsim::run_spatial_batch(cfg, alloc, args.reps, seed, horizon,
                                         &summary);
  } else {
    throw std::invalid_argument("unknown engine '" + args.engine +
                                "' (use contact or spatial)");
  }
  if (outcomes_out) *outcomes_out = std::move(outcomes);
  return summary;
}

int run(int argc, char** argv) {
  CLI::App app{"Cooperative content dissemination toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, outdir = ".";

  auto* analyze = app.add_subcommand("analyze", "Solve extinction/fraction system");
  analyze->add_option("-c,--config", config_path)->required();
  analyze->add_option("-o,--out", outdir);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo sharing phase");
  simulate->add_option("-c,--config", config_path)->required();
  simulate->add_option("-o,--out", outdir);
  simulate->add_option("--engine", sim.engine)->check(CLI::IsMember({"contact", "spatial"}));
  simulate->add_option("--reps", sim.reps)->check(CLI::PositiveNumber);
  auto* seed_opt = simulate->add_option("--seed", sim.seed);
  simulate->add_option("--horizon", sim.horizon);
  simulate->add_flag("--shared-meetings", sim.shared_meetings,
                     "all packets on one meeting process");

  std::string coding = "on";
  auto* optimize = app.add_subcommand("optimize", "Sweep beta, minimise beta+Y");
  optimize->add_option("-c,--config", config_path)->required();
  optimize->add_option("-o,--out", outdir);
  optimize->add_option("--coding", coding)->check(CLI::IsMember({"on", "off"}));

  double warmup = 0.0, duration = 0.0;
  auto* rates = app.add_subcommand("rates", "Estimate inter-meeting rates from mobility");
  rates->add_option("-c,--config", config_path)->required();
  rates->add_option("-o,--out", outdir);
  rates->add_option("--warmup", warmup);
  rates->add_option("--duration", duration)->required();

  std::string param;
  std::vector<double> values;
  std::string sweep_command = "analyze";
  auto* sweep = app.add_subcommand("sweep", "Re-run a command over a parameter grid");
  sweep->add_option("-c,--config", config_path)->required();
  sweep->add_option("-o,--out", outdir);
  sweep->add_option("--param", param)->required();
  sweep->add_option("--values", values)->required()->delimiter(',');
  sweep->add_option("--command", sweep_command)
      ->check(CLI::IsMember({"analyze", "optimize", "simulate"}));
  sweep->add_option("--engine", sim.engine)->check(CLI::IsMember({"contact", "spatial"}));
  sweep->add_option("--reps", sim.reps)->check(CLI::PositiveNumber);
  auto* sweep_seed_opt = sweep->add_option("--seed", sim.seed);
  sweep->add_option("--coding", coding)->check(CLI::IsMember({"on", "off"}));

  CLI11_PARSE(app, argc, argv);
  fs::create_directories(outdir);

  if (analyze->parsed()) {
    const auto cfg = load_checked(config_path);
    const std::string csv = analyze_csv(cfg);
    write_file(fs::path(outdir) / "analytic.csv", csv);
    write_manifest(outdir, "analyze", cfg, cfg.rng_seed, {"analytic.csv"});
  } else if (simulate->parsed()) {
    sim.seed_set = seed_opt->count() > 0;
    const auto cfg = load_checked(config_path);
    std::vector<SimOutcome> outcomes;
    const BatchSummary summary = run_simulation(cfg, sim, &outcomes);
    const std::string name = fs::path(config_path).stem().string();
    write_file(fs::path(outdir) / "summary.csv", summary_csv(name, cfg, summary));
    write_file(fs::path(outdir) / "replications.csv", replications_csv(cfg, outcomes));
    write_manifest(outdir, "simulate", cfg, summary.seed,
                   {"summary.csv", "replications.csv"});
    for (const auto& p : summary.packets)
      std::cout << "packet " << p.packet << " (type " << cfg.types[p.source_type].id
                << " source): spread_out_freq=" << fmt(p.spread_out_freq)
                << " mean_overall_fraction=" << fmt(p.mean_overall_fraction) << "\n";
    std::cout << "complement packets: mean=" << fmt(summary.complement_mean)
              << " std=" << fmt(summary.complement_std) << "\n";
  } else if (optimize->parsed()) {
    const auto cfg = load_checked(config_path);
    const auto curve = loadopt::optimize_beta(
        cfg, coding == "on" ? loadopt::Coding::erasure_coded
                            : loadopt::Coding::uncoded);
    write_file(fs::path(outdir) / "loadcurve.csv", loadcurve_csv(curve));
    write_manifest(outdir, "optimize", cfg, cfg.rng_seed, {"loadcurve.csv"});
    std::cout << "beta* = " << curve.best_beta
              << ", total* = " << fmt(curve.best_total) << "\n";
  } else if (rates->parsed()) {
    const auto cfg = load_checked(config_path);
    const auto est = mobsim::estimate_rates(cfg, warmup, duration);
    write_file(fs::path(outdir) / "rates.csv", rates_csv(cfg, est));
    write_manifest(outdir, "rates", cfg, cfg.rng_seed, {"rates.csv"});
    std::cout << rates_csv(cfg, est);
  } else if (sweep->parsed()) {
    sim.seed_set = sweep_seed_opt->count() > 0;
    if (values.empty()) throw std::invalid_argument("sweep: empty value list");
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string base_text = buf.str();

    std::ostringstream csv;
    bool header_done = false;
    ScenarioConfig last_cfg;
    for (double value : values) {
      std::string text = base_text;
      set_config_field(text, param, value);
      ScenarioConfig cfg = parse_scenario(text);
      const auto report = validate_scenario(cfg);
      if (!report.ok())
        throw std::runtime_error("sweep value " + fmt(value) +
                                 " yields invalid config:\n" + report.describe());
      last_cfg = cfg;
      std::string rows;
      if (sweep_command == "analyze") {
        rows = analyze_csv(cfg);
      } else if (sweep_command == "optimize") {
        rows = loadcurve_csv(loadopt::optimize_beta(
            cfg, coding == "on" ? loadopt::Coding::erasure_coded
                                : loadopt::Coding::uncoded));
      } else {
        const BatchSummary summary = run_simulation(cfg, sim, nullptr);
        rows = summary_csv(fs::path(config_path).stem().string(), cfg, summary);
      }
      std::istringstream lines(rows);
      std::string line;
      bool first = true;
      while (std::getline(lines, line)) {
        if (first) {
          if (!header_done) {
            csv << "param,value," << line << "\n";
            header_done = true;
          }
          first = false;
          continue;
        }
        csv << param << "," << fmt(value) << "," << line << "\n";
      }
    }
    write_file(fs::path(outdir) / "sweep.csv", csv.str());
    write_manifest(outdir, "sweep", last_cfg, sim.seed, {"sweep.csv"});
    std::cout << "sweep over " << param << ": " << values.size()
              << " values written\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
