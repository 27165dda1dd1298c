#include "epicast/mobility_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "epicast/epidemic_core.hpp"

namespace epicast::mobsim {
namespace {

double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double exp_sample(std::mt19937_64& rng, double mean) {
  return -std::log(uniform01(rng)) * mean;
}

double wrap(double x, double side) {
  x = std::fmod(x, side);
  if (x <= 0.0) x += side;
  return x;
}

double pick_time_step(const ScenarioConfig& cfg) {
  const double dt = cfg.time_step_s > 0.0 ? cfg.time_step_s : auto_time_step(cfg);
  const double vmax = cfg.max_speed();
  if (vmax > 0.0 && dt >= cfg.radio_range_m / (2.0 * vmax))
    throw std::runtime_error(
        "mobility: time step too large for radio range and max speed");
  return dt;
}

} // namespace

double torus_distance(double ax, double ay, double bx, double by, double side) {
  double dx = std::abs(ax - bx);
  double dy = std::abs(ay - by);
  if (dx > side / 2) dx = side - dx;
  if (dy > side / 2) dy = side - dy;
  return std::hypot(dx, dy);
}

double auto_time_step(const ScenarioConfig& cfg) {
  const double vmax = cfg.max_speed();
  if (vmax <= 0.0) return 0.1;
  return std::min(0.1, cfg.radio_range_m / (4.0 * vmax));
}

MobilityState init_state(const ScenarioConfig& cfg, std::mt19937_64& rng) {
  MobilityState state;
  state.side = cfg.side_length_m;
  state.type_of = build_type_of(cfg);
  state.nodes.resize(state.type_of.size());
  for (size_t i = 0; i < state.nodes.size(); ++i) {
    auto& k = state.nodes[i];
    k.x = uniform01(rng) * state.side;
    k.y = uniform01(rng) * state.side;
    k.heading = uniform01(rng) * 2.0 * std::numbers::pi;
    k.speed = cfg.types[state.type_of[i]].speed_mps;
    k.next_turn = exp_sample(rng, cfg.direction_hold_mean_s);
  }
  return state;
}

void step_mobility(MobilityState& state, double dt, double hold_mean_s,
                   std::mt19937_64& rng) {
  if (!(dt > 0.0)) throw std::domain_error("step_mobility: dt > 0 required");
  const double t_end = state.time + dt;
  for (auto& k : state.nodes) {
    if (k.speed == 0.0) continue;
    double t = state.time;
    while (k.next_turn < t_end) {
      const double leg = k.next_turn - t;
      k.x += k.speed * leg * std::cos(k.heading);
      k.y += k.speed * leg * std::sin(k.heading);
      t = k.next_turn;
      k.heading = uniform01(rng) * 2.0 * std::numbers::pi;
      k.next_turn = t + exp_sample(rng, hold_mean_s);
    }
    const double leg = t_end - t;
    k.x = wrap(k.x + k.speed * leg * std::cos(k.heading), state.side);
    k.y = wrap(k.y + k.speed * leg * std::sin(k.heading), state.side);
  }
  state.time = t_end;
}

MeetingDetector::MeetingDetector(double side, double radio_range, int num_nodes)
    : side_(side), range_(radio_range), n_(num_nodes) {
  cells_ = std::max(1, static_cast<int>(side / radio_range));
  cell_size_ = side / cells_;
  // With dt <= r0 / (2 v_max) a connected pair separates by at most 1.5 r0
  // per tick, so a 5x5 cell neighbourhood always revisits stale connections.
  if (cells_ < 5) cells_ = 1; // fall back to the all-pairs scan
  connected_.assign(static_cast<size_t>(n_) * n_, 0);
  cell_head_.assign(static_cast<size_t>(cells_) * cells_, -1);
  next_in_cell_.assign(n_, -1);
}

std::vector<MeetingEvent> MeetingDetector::update(const MobilityState& state) {
  std::vector<MeetingEvent> events;
  auto visit = [&](int u, int v) {
    if (u > v) std::swap(u, v);
    const auto& a = state.nodes[u];
    const auto& b = state.nodes[v];
    const bool now = torus_distance(a.x, a.y, b.x, b.y, side_) <= range_;
    char& was = connected_[static_cast<size_t>(u) * n_ + v];
    if (now && !was) events.push_back({state.time, u, v});
    was = now;
  };

  if (cells_ == 1) {
    for (int u = 0; u < n_; ++u)
      for (int v = u + 1; v < n_; ++v) visit(u, v);
  } else {
    std::fill(cell_head_.begin(), cell_head_.end(), -1);
    auto cell_of = [&](double c) {
      int i = static_cast<int>(c / cell_size_);
      return std::clamp(i, 0, cells_ - 1);
    };
    for (int i = 0; i < n_; ++i) {
      const int c = cell_of(state.nodes[i].x) * cells_ + cell_of(state.nodes[i].y);
      next_in_cell_[i] = cell_head_[c];
      cell_head_[c] = i;
    }
    for (int u = 0; u < n_; ++u) {
      const int cx = cell_of(state.nodes[u].x);
      const int cy = cell_of(state.nodes[u].y);
      for (int ox = -2; ox <= 2; ++ox) {
        for (int oy = -2; oy <= 2; ++oy) {
          const int c = ((cx + ox + cells_) % cells_) * cells_ +
                        (cy + oy + cells_) % cells_;
          for (int v = cell_head_[c]; v != -1; v = next_in_cell_[v])
            if (v > u) visit(u, v);
        }
      }
    }
  }
  std::sort(events.begin(), events.end(), [](const MeetingEvent& a, const MeetingEvent& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  return events;
}

RateEstimate estimate_rates(const ScenarioConfig& cfg, double warmup_s,
                            double duration_s) {
  const auto report = validate_scenario(cfg);
  if (!report.ok())
    throw std::runtime_error("estimate_rates: invalid scenario\n" + report.describe());
  const double dt = pick_time_step(cfg);
  const int h = cfg.num_types();

  std::mt19937_64 rng(cfg.rng_seed);
  MobilityState state = init_state(cfg, rng);
  const int n = static_cast<int>(state.nodes.size());
  MeetingDetector detector(state.side, cfg.radio_range_m, n);

  constexpr double kNever = -1.0;
  std::vector<double> last_meet(static_cast<size_t>(n) * n, kNever);
  std::vector<std::vector<long long>> counts(h, std::vector<long long>(h, 0));
  Matrix sums(h, std::vector<double>(h, 0.0));

  const double t_end = warmup_s + duration_s;
  // Contacts at t=0 start the pair clocks.
  for (const auto& e : detector.update(state))
    last_meet[static_cast<size_t>(e.u) * n + e.v] = 0.0;

  while (state.time < t_end) {
    step_mobility(state, dt, cfg.direction_hold_mean_s, rng);
    for (const auto& e : detector.update(state)) {
      const size_t pi = static_cast<size_t>(e.u) * n + e.v;
      if (state.time >= warmup_s && last_meet[pi] != kNever) {
        const int th = state.type_of[e.u];
        const int tk = state.type_of[e.v];
        const double sample = state.time - last_meet[pi];
        counts[th][tk] += 1;
        sums[th][tk] += sample;
        if (th != tk) {
          counts[tk][th] += 1;
          sums[tk][th] += sample;
        }
      }
      last_meet[pi] = state.time;
    }
  }

  RateEstimate est;
  est.rates.rates_hz.assign(h, std::vector<double>(h, 0.0));
  est.samples = counts;
  est.ci_low.assign(h, std::vector<double>(h, 0.0));
  est.ci_high.assign(h, std::vector<double>(h, 0.0));
  for (int i = 0; i < h; ++i) {
    for (int k = 0; k < h; ++k) {
      if (counts[i][k] > 0) {
        const double rate = counts[i][k] / sums[i][k];
        const double half = 1.959964 / std::sqrt(static_cast<double>(counts[i][k]));
        est.rates.rates_hz[i][k] = rate;
        est.ci_low[i][k] = std::max(0.0, rate * (1.0 - half));
        est.ci_high[i][k] = rate * (1.0 + half);
      }
    }
  }
  return est;
}

SimOutcome run_spatial_epidemic(const ScenarioConfig& cfg,
                                const loadopt::SourceAllocation& sources,
                                std::optional<double> horizon,
                                std::uint64_t seed, int replication) {
  const auto report = validate_scenario(cfg);
  if (!report.ok())
    throw std::runtime_error("run_spatial_epidemic: invalid scenario\n" +
                             report.describe());
  const double dt = pick_time_step(cfg);
  const double t_end = horizon.value_or(std::numeric_limits<double>::infinity());

  std::mt19937_64 rng(seed);
  MobilityState state = init_state(cfg, rng);
  const int n = static_cast<int>(state.nodes.size());
  MeetingDetector detector(state.side, cfg.radio_range_m, n);

  std::vector<double> tau(cfg.num_types());
  for (int i = 0; i < cfg.num_types(); ++i) tau[i] = cfg.types[i].active_period_s;
  const std::vector<int> src_nodes = source_nodes(cfg, sources);
  SirEngine engine(state.type_of, tau, static_cast<int>(src_nodes.size()));
  for (size_t j = 0; j < src_nodes.size(); ++j)
    engine.seed(static_cast<int>(j), src_nodes[j], 0.0);

  // Pairs already in range at t=0 count as meeting at t=0.
  for (const auto& e : detector.update(state)) engine.on_meeting(0.0, e.u, e.v);

  while (state.time < t_end && state.time < engine.latest_window_end()) {
    step_mobility(state, dt, cfg.direction_hold_mean_s, rng);
    for (const auto& e : detector.update(state))
      engine.on_meeting(state.time, e.u, e.v);
  }
  return collect_outcome(engine, cfg, src_nodes, seed, replication);
}

std::vector<SimOutcome> run_spatial_batch(const ScenarioConfig& cfg,
                                          const loadopt::SourceAllocation& sources,
                                          int replications,
                                          std::uint64_t master_seed,
                                          std::optional<double> horizon,
                                          BatchSummary* summary) {
  if (replications < 1)
    throw std::domain_error("run_spatial_batch: replications >= 1");
  std::vector<SimOutcome> outcomes(replications);
  parallel_for(replications, [&](int i) {
    outcomes[i] = run_spatial_epidemic(cfg, sources, horizon,
                                       derive_seed(master_seed, i), i);
  });
  if (summary) {
    std::vector<int> counts;
    for (const auto& t : cfg.types) counts.push_back(t.count);
    *summary = summarize(outcomes, counts, master_seed);
  }
  return outcomes;
}

} // namespace epicast::mobsim
