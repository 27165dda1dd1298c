#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "epicast/analytic.hpp"
#include "epicast/loadopt.hpp"
#include "epicast/scenario.hpp"

using namespace epicast;
using namespace epicast::loadopt;

namespace {

// Monte Carlo oracle for N * E[(M - B)+] with B a sum of independent
// Bernoulli(p_i) indicators.
double mc_complement(int n, int m, const std::vector<double>& ps,
                     std::mt19937_64& rng, int reps) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double acc = 0.0;
  for (int r = 0; r < reps; ++r) {
    int b = 0;
    for (double p : ps) b += u(rng) < p ? 1 : 0;
    acc += std::max(0, m - b);
  }
  return n * acc / reps;
}

// Single-type scenario whose mean offspring a = N * gamma is as requested.
ScenarioConfig single_type_config(int n, double a, int messages) {
  ScenarioConfig cfg;
  const double tau = 100.0;
  cfg.types = {{1, n, 1.0, tau}};
  cfg.side_length_m = 1000.0;
  cfg.radio_range_m = 10.0;
  cfg.message_count = messages;
  cfg.contact_rates = ContactMatrix{{{-std::log1p(-a / n) / tau}}};
  return cfg;
}

} // namespace

TEST_CASE("complement_load_coded boundary and hand-enumerated values") {
  CHECK(complement_load_coded(10, 1, 5, 0.0) == 10.0);
  CHECK(complement_load_coded(10, 1, 1, 1.0) == 0.0);
  // B ~ Binomial(2, 0.5): E[(2-B)+] = 2*0.25 + 1*0.5 = 1.
  CHECK(complement_load_coded(100, 2, 2, 0.5) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK_THROWS_AS(complement_load_coded(10, 1, 0, 0.5), std::domain_error);
  CHECK_THROWS_AS(complement_load_coded(10, 1, 5, -0.1), std::domain_error);
  CHECK_THROWS_AS(complement_load_coded(10, 1, 5, 1.5), std::domain_error);
}

TEST_CASE("complement_load_coded matches a Monte Carlo oracle") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::uniform_int_distribution<int> md(1, 8), bd(1, 40);
  for (int i = 0; i < 12; ++i) {
    const int m = md(rng), beta = bd(rng);
    const double z1 = u(rng);
    const double exact = complement_load_coded(1000, m, beta, z1);
    const double mc =
        mc_complement(1000, m, std::vector<double>(beta, z1), rng, 40000);
    // MC error scale: N * M / sqrt(reps) with generous headroom.
    CHECK(std::abs(exact - mc) < 1000.0 * m * 5.0 / std::sqrt(40000.0));
  }
}

TEST_CASE("complement_load_coded_mixed") {
  // Equal probabilities collapse to the binomial formula.
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double p = u(rng);
    const int m = 1 + i % 5, beta = 1 + i % 17;
    CHECK(complement_load_coded_mixed(960, m, std::vector<double>(beta, p)) ==
          doctest::Approx(complement_load_coded(960, m, beta, p)).epsilon(1e-11));
  }
  // Heterogeneous probabilities vs Monte Carlo.
  for (int i = 0; i < 8; ++i) {
    const int m = 1 + i;
    std::vector<double> ps(3 + i);
    for (double& p : ps) p = u(rng);
    const double exact = complement_load_coded_mixed(500, m, ps);
    const double mc = mc_complement(500, m, ps, rng, 40000);
    CHECK(std::abs(exact - mc) < 500.0 * m * 5.0 / std::sqrt(40000.0));
  }
  CHECK_THROWS_AS(complement_load_coded_mixed(10, 1, {}), std::domain_error);
  CHECK_THROWS_AS(complement_load_coded_mixed(10, 1, {1.2}), std::domain_error);
}

TEST_CASE("Y is nonincreasing in z1") {
  for (int m : {1, 3, 7})
    for (int beta : {1, 5, 20}) {
      double prev = complement_load_coded(100, m, beta, 0.0);
      for (int i = 1; i <= 50; ++i) {
        const double y = complement_load_coded(100, m, beta, i / 50.0);
        CHECK(y <= prev + 1e-9);
        prev = y;
      }
    }
}

TEST_CASE("allocate_sources fills ascending extinction with overflow") {
  auto a = allocate_sources({0.2, 0.9}, {5, 5}, 3);
  CHECK(a.per_type_counts == std::vector<int>{3, 0});
  CHECK(a.ordering == std::vector<int>{0, 1});

  a = allocate_sources({0.2, 0.9}, {5, 5}, 7);
  CHECK(a.per_type_counts == std::vector<int>{5, 2});

  // Ties break on type index, deterministically.
  a = allocate_sources({0.5, 0.5}, {3, 3}, 4);
  CHECK(a.per_type_counts == std::vector<int>{3, 1});
  CHECK(a.ordering == std::vector<int>{0, 1});

  CHECK_THROWS_AS(allocate_sources({0.5}, {3}, 4), std::domain_error);
  CHECK_THROWS_AS(allocate_sources({0.5, 0.5}, {3}, 1), std::domain_error);
}

TEST_CASE("allocate_sources minimizes the joint extinction product") {
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::uniform_int_distribution<int> hd(1, 3), nd(1, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const int h = hd(rng);
    std::vector<double> w(h);
    std::vector<int> counts(h);
    int capacity = 0;
    for (int t = 0; t < h; ++t) {
      w[t] = u(rng);
      counts[t] = nd(rng);
      capacity += counts[t];
    }
    std::uniform_int_distribution<int> bd(0, std::min(10, capacity));
    const int beta = bd(rng);
    const auto alloc = allocate_sources(w, counts, beta);

    auto product = [&](const std::vector<int>& b) {
      double p = 1.0;
      for (int t = 0; t < h; ++t) p *= std::pow(w[t], b[t]);
      return p;
    };
    // Exhaustive enumeration of all feasible integer allocations.
    double best = 2.0;
    std::vector<int> b(h, 0);
    while (true) {
      int sum = 0;
      bool feasible = true;
      for (int t = 0; t < h; ++t) {
        sum += b[t];
        feasible = feasible && b[t] <= counts[t];
      }
      if (feasible && sum == beta) best = std::min(best, product(b));
      int t = 0;
      for (; t < h; ++t) {
        if (++b[t] <= std::min(counts[t], beta)) break;
        b[t] = 0;
      }
      if (t == h) break;
    }
    CHECK(product(alloc.per_type_counts) <= best * (1.0 + 1e-12));
  }
}

TEST_CASE("uncoded_even_allocation") {
  CHECK(uncoded_even_allocation(3, 7) == std::vector<int>{3, 2, 2});
  CHECK(uncoded_even_allocation(2, 0) == std::vector<int>{0, 0});
  CHECK(uncoded_even_allocation(1, 5) == std::vector<int>{5});
  CHECK_THROWS_AS(uncoded_even_allocation(0, 5), std::domain_error);
  CHECK_THROWS_AS(uncoded_even_allocation(2, -1), std::domain_error);
}

TEST_CASE("complement_load_uncoded") {
  const ScenarioConfig cfg = single_type_config(960, 2.0, 2);
  const auto analysis = analytic::analyze(cfg);

  // Nothing pushed: every node misses every message.
  CHECK(complement_load_uncoded(cfg, analysis, {0, 0}) == 960.0 * 2);

  // One copy per message: Y = N * M * (1 - z(1)) with z(1) = (1-w)^2.
  const double z1 = analysis.fractions[0] * (1.0 - analysis.extinction[0]);
  CHECK(z1 == doctest::Approx(0.6349).epsilon(1e-3));
  CHECK(complement_load_uncoded(cfg, analysis, {1, 1}) ==
        doctest::Approx(960.0 * 2 * (1.0 - z1)).epsilon(1e-12));
  CHECK(complement_load_uncoded(cfg, analysis, {1, 1}) ==
        doctest::Approx(701.0).epsilon(2e-3));
}

TEST_CASE("uncoded equals coded for a single message") {
  const ScenarioConfig cfg = single_type_config(480, 2.5, 1);
  const auto analysis = analytic::analyze(cfg);
  const double z1 = analysis.fractions[0] * (1.0 - analysis.extinction[0]);
  for (int beta : {1, 2, 5, 17}) {
    const double uncoded = complement_load_uncoded(cfg, analysis, {beta});
    // With one message, "any 1 of beta" and "one copy of the single message"
    // coincide: Y = N * (1 - z(beta)) = N * (1 - zbar (1 - w^beta)).
    const double zbeta = analysis.fractions[0] *
                         (1.0 - std::pow(analysis.extinction[0], beta));
    CHECK(uncoded == doctest::Approx(480.0 * (1.0 - zbeta)).epsilon(1e-12));
  }
}

TEST_CASE("optimize_beta on a subcritical scenario pushes once") {
  const ScenarioConfig cfg = single_type_config(960, 0.5, 1);
  for (Coding c : {Coding::erasure_coded, Coding::uncoded}) {
    const auto curve = optimize_beta(cfg, c);
    CHECK(curve.best_beta == 1);
    CHECK(curve.best_total == doctest::Approx(961.0).epsilon(1e-12));
    CHECK(static_cast<int>(curve.entries.size()) == 960);
  }
}

TEST_CASE("optimize_beta when one packet reaches almost everyone") {
  // Enormous offspring mean: w ~ e^-500, z(1) ~ 1, so Y(1) ~ 0.
  const ScenarioConfig cfg = single_type_config(960, 500.0, 1);
  const auto curve = optimize_beta(cfg, Coding::erasure_coded);
  CHECK(curve.best_beta == 1);
  CHECK(curve.best_total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("optimize_beta curve structure at desk scale") {
  const ScenarioConfig cfg = single_type_config(960, 2.0, 10);
  const auto coded = optimize_beta(cfg, Coding::erasure_coded);
  const auto uncoded = optimize_beta(cfg, Coding::uncoded);
  const int n = 960, m = 10;

  for (const auto& curve : {coded, uncoded}) {
    REQUIRE(static_cast<int>(curve.entries.size()) == n);
    double best = curve.entries.front().total;
    for (int i = 0; i < n; ++i) {
      const auto& e = curve.entries[i];
      CHECK(e.beta == i + 1);
      CHECK(e.total == doctest::Approx(e.beta + e.complement).epsilon(1e-12));
      CHECK(e.complement >= -1e-9);
      CHECK(e.complement <= n * m + 1e-9);
      best = std::min(best, e.total);
      // Improvement per extra pushed packet cannot exceed the full deficit.
      if (i > 0)
        CHECK(curve.entries[i - 1].total - e.total <= n * m + 1e-9);
    }
    CHECK(curve.best_total == doctest::Approx(best).epsilon(1e-12));
    // Smallest-beta tie-break: nothing earlier attains the optimum.
    for (const auto& e : curve.entries) {
      if (e.beta >= curve.best_beta) break;
      CHECK(e.total > curve.best_total);
    }
  }

  // Coding never hurts once beta covers the message count.
  for (int i = m - 1; i < n; ++i)
    CHECK(coded.entries[i].complement <= uncoded.entries[i].complement + 1e-9);

  // Shape anchor: sharp initial descent, shallow eventual rise.
  CHECK(coded.entries[0].total > coded.best_total + 100.0);
  CHECK(coded.entries[n - 1].total > coded.best_total);
}

TEST_CASE("optimize_beta heterogeneous consistency with the mixed formula") {
  ScenarioConfig cfg;
  cfg.types = {{1, 60, 1.0, 80.0}, {2, 40, 0.0, 40.0}};
  cfg.side_length_m = 1000.0;
  cfg.radio_range_m = 10.0;
  cfg.message_count = 3;
  cfg.contact_rates = ContactMatrix{{{4e-4, 3e-4}, {3e-4, 2e-4}}};
  const auto analysis = analytic::analyze(cfg);
  REQUIRE(analysis.supercritical);

  double zbar = 0.0;
  for (size_t t = 0; t < cfg.types.size(); ++t)
    zbar += cfg.types[t].count * analysis.fractions[t];
  zbar /= cfg.total_nodes();

  const auto curve = optimize_beta(cfg, Coding::erasure_coded);
  for (int beta : {1, 5, 60, 61, 100}) {
    const auto alloc =
        allocate_sources(analysis.extinction, {60, 40}, beta);
    std::vector<double> ps;
    for (size_t t = 0; t < alloc.ordering.size(); ++t) {
      const int type = alloc.ordering[t];
      for (int i = 0; i < alloc.per_type_counts[type]; ++i)
        ps.push_back(zbar * (1.0 - analysis.extinction[type]));
    }
    const double expect =
        complement_load_coded_mixed(cfg.total_nodes(), cfg.message_count, ps);
    CHECK(curve.entries[beta - 1].complement ==
          doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("optimize_beta rejects invalid scenarios") {
  ScenarioConfig cfg = single_type_config(100, 2.0, 1);
  cfg.message_count = 0;
  CHECK_THROWS(optimize_beta(cfg, Coding::erasure_coded));
}
