#include <doctest.h>

#include <cmath>
#include <random>

#include "epicast/analytic.hpp"

using namespace epicast;
using namespace epicast::analytic;

namespace {

// Bisection oracle for w e^w = x on the principal branch.
double lambert_oracle(double x) {
  double lo = -1.0, hi = 800.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::exp(mid) < x ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Bisection oracle for the smallest root of w = exp(a (w - 1)) in [0, 1).
double extinction_oracle(double a) {
  double lo = 0.0, hi = 0.999999;
  auto f = [a](double w) { return w - std::exp(a * (w - 1.0)); };
  // Shrink hi until f(hi) > 0 so we bracket the smallest root.
  while (f(hi) <= 0.0) hi *= 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ext_residual(const Matrix& m, const std::vector<double>& w) {
  double r = 0.0;
  for (size_t h = 0; h < w.size(); ++h) {
    double s = 0.0;
    for (size_t k = 0; k < w.size(); ++k) s += m[h][k] * (w[k] - 1.0);
    r = std::max(r, std::abs(w[h] - std::exp(s)));
  }
  return r;
}

double frac_residual(const Matrix& m, const std::vector<double>& z) {
  double r = 0.0;
  for (size_t h = 0; h < z.size(); ++h) {
    double s = 0.0;
    for (size_t k = 0; k < z.size(); ++k) s += m[k][h] * z[k];
    r = std::max(r, std::abs(1.0 - z[h] - std::exp(-s)));
  }
  return r;
}

Matrix random_matrix(std::mt19937_64& rng, int h, double scale) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(h, std::vector<double>(h));
  for (auto& row : m)
    for (auto& e : row) e = scale * u(rng);
  return m;
}

} // namespace

TEST_CASE("lambert_w0 known points") {
  CHECK(lambert_w0(0.0) == 0.0);
  CHECK(lambert_w0(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(lambert_w0(1.0) == doctest::Approx(lambert_oracle(1.0)).epsilon(1e-13));
  CHECK(lambert_w0(1.0) == doctest::Approx(0.567143).epsilon(1e-6));
  CHECK_THROWS_AS(lambert_w0(-0.5), std::domain_error);
}

TEST_CASE("lambert_w0 residual contract") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    // Mix of near-branch-point, moderate and large arguments.
    double x;
    const int bucket = i % 3;
    if (bucket == 0) x = -std::exp(-1.0) + u(rng) * 1e-3;
    else if (bucket == 1) x = -std::exp(-1.0) + u(rng) * (1.0 + std::exp(-1.0));
    else x = std::exp(u(rng) * 20.0);
    const double w = lambert_w0(x);
    CHECK(w >= -1.0);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-12 * std::max(1.0, std::abs(x)));
  }
}

TEST_CASE("spectral_radius") {
  CHECK(spectral_radius({{2.0}}) == 2.0);
  CHECK(spectral_radius({{1.0, 0.0}, {0.0, 3.0}}) == doctest::Approx(3.0).epsilon(1e-12));
  // 2x2 oracle: largest root of the characteristic polynomial.
  CHECK(spectral_radius({{1.0, 2.0}, {2.0, 1.0}}) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(spectral_radius({{0.0, 2.0}, {0.5, 0.0}}) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(spectral_radius({{0.0, 0.0}, {0.0, 0.0}}) == 0.0);
  CHECK_THROWS_AS(spectral_radius({{1.0, std::nan("")}, {0.0, 1.0}}), std::domain_error);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    Matrix m = random_matrix(rng, 2, 3.0);
    const double tr = m[0][0] + m[1][1];
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const double oracle = 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
    CHECK(spectral_radius(m) == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("solve_extinction scalar and decoupled cases") {
  CHECK(solve_extinction({{0.5}}) == std::vector<double>{1.0});
  const double w2 = extinction_oracle(2.0);
  CHECK(solve_extinction({{2.0}})[0] == doctest::Approx(w2).epsilon(1e-11));
  CHECK(w2 == doctest::Approx(0.203188).epsilon(1e-5));

  const auto w = solve_extinction({{2.0, 0.0}, {0.0, 0.5}});
  CHECK(w[0] == doctest::Approx(w2).epsilon(1e-11));
  CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("extinction closed form matches solver") {
  CHECK(extinction_closed_form_h1(1.0) == 1.0);
  CHECK(extinction_closed_form_h1(0.5) == 1.0);
  CHECK(extinction_closed_form_h1(2.0) ==
        doctest::Approx(extinction_oracle(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(extinction_closed_form_h1(0.0), std::domain_error);
}

TEST_CASE("extinction_multi_source") {
  CHECK(extinction_multi_source({1.0, 1.0}, {3, 2}) == 1.0);
  CHECK(extinction_multi_source({0.2, 1.0}, {2, 0}) == doctest::Approx(0.04));
  const double w1 = extinction_oracle(2.0);
  CHECK(extinction_multi_source({w1, 0.5}, {1, 1}) == doctest::Approx(0.5 * w1));
  CHECK_THROWS_AS(extinction_multi_source({0.5}, {0}), std::domain_error);
  CHECK_THROWS_AS(extinction_multi_source({0.5}, {-1}), std::domain_error);
}

TEST_CASE("solve_fractions scalar and decoupled cases") {
  CHECK(solve_fractions({{0.5}}) == std::vector<double>{0.0});
  const double z2 = 1.0 - extinction_oracle(2.0); // H=1 duality
  CHECK(solve_fractions({{2.0}})[0] == doctest::Approx(z2).epsilon(1e-11));
  CHECK(z2 == doctest::Approx(0.796812).epsilon(1e-5));

  const auto z = solve_fractions({{2.0, 0.0}, {0.0, 0.5}});
  CHECK(z[0] == doctest::Approx(z2).epsilon(1e-11));
  CHECK(std::abs(z[1]) <= 1e-12);
}

TEST_CASE("fraction_multi_source and closed form") {
  const double w1 = extinction_oracle(2.0);
  const double expect1 = (1.0 - w1) * (1.0 - w1);
  CHECK(fraction_multi_source({{2.0}}, {100}, {1}) ==
        doctest::Approx(expect1).epsilon(1e-10));
  CHECK(expect1 == doctest::Approx(0.634905).epsilon(1e-5));
  CHECK(fraction_closed_form_h1(2.0, 1) == doctest::Approx(expect1).epsilon(1e-11));
  CHECK(fraction_closed_form_h1(2.0, 3) ==
        doctest::Approx((1.0 - w1) * (1.0 - w1 * w1 * w1)).epsilon(1e-11));
  CHECK(fraction_closed_form_h1(1.0, 5) == 0.0);
  // Subcritical: zero for any allocation.
  CHECK(fraction_multi_source({{0.5}}, {100}, {7}) == 0.0);
  // Many sources: extinction term vanishes.
  CHECK(fraction_closed_form_h1(2.0, 4000) == doctest::Approx(1.0 - w1).epsilon(1e-11));
}

TEST_CASE("duality z = 1 - w for every supercritical scalar case") {
  for (double a : {1.1, 1.5, 2.0, 3.0, 5.0, 10.0}) {
    const double w = solve_extinction({{a}})[0];
    const double z = solve_fractions({{a}})[0];
    CHECK(std::abs(z - (1.0 - w)) <= 1e-9);
  }
}

TEST_CASE("fixed point residuals at machine level") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> hd(1, 5);
  for (int i = 0; i < 100; ++i) {
    const Matrix m = random_matrix(rng, hd(rng), 2.0);
    CHECK(ext_residual(m, solve_extinction(m)) <= 1e-12);
    CHECK(frac_residual(m, solve_fractions(m)) <= 1e-12);
  }
}

TEST_CASE("monotonicity in the mean offspring matrix") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> hd(1, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 60; ++i) {
    const int h = hd(rng);
    Matrix m = random_matrix(rng, h, 2.5);
    Matrix bigger = m;
    for (auto& row : bigger)
      for (auto& e : row) e += 0.3 * u(rng);
    const auto w1 = solve_extinction(m);
    const auto w2 = solve_extinction(bigger);
    const auto z1 = solve_fractions(m);
    const auto z2 = solve_fractions(bigger);
    for (int k = 0; k < h; ++k) {
      CHECK(w2[k] <= w1[k] + 1e-10);
      CHECK(z2[k] >= z1[k] - 1e-10);
    }
  }
}

TEST_CASE("threshold consistency") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> hd(1, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Matrix m = random_matrix(rng, hd(rng), 1.0);
    const double target = 0.7 + 0.6 * u(rng); // straddles 1
    const double rho = analytic::spectral_radius(m);
    if (rho == 0.0) continue;
    for (auto& row : m)
      for (auto& e : row) e *= target / rho;
    const auto w = solve_extinction(m);
    bool all_ones = true;
    for (double v : w) all_ones = all_ones && v == 1.0;
    CHECK(all_ones == (analytic::spectral_radius(m) <= 1.0 + kCriticalEps));
  }
}

TEST_CASE("fraction_multi_source nondecreasing in each source count") {
  const Matrix m = {{1.6, 0.4}, {0.4, 0.9}};
  const std::vector<int> counts = {60, 40};
  double prev = 0.0;
  for (int b = 1; b <= 10; ++b) {
    const double z = fraction_multi_source(m, counts, {b, 0});
    CHECK(z >= prev - 1e-12);
    prev = z;
  }
  const double base = fraction_multi_source(m, counts, {2, 1});
  CHECK(fraction_multi_source(m, counts, {2, 2}) >= base - 1e-12);
}
