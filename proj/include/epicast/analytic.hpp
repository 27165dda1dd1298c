#pragma once

#include <stdexcept>
#include <vector>

#include "epicast/scenario.hpp"

namespace epicast::analytic {

// Fixed-point solvers stop when successive iterates differ by less than this
// (max norm), then polish with damped Newton.
inline constexpr double kFixedPointTol = 1e-13;
inline constexpr int kMaxFixedPointIters = 100000;

// Spectral radii within this band of 1 are treated as subcritical: at the
// critical point extinction is still certain.
inline constexpr double kCriticalEps = 1e-9;

struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, std::vector<double> iterate, double res)
      : std::runtime_error(what), last_iterate(std::move(iterate)), residual(res) {}
  std::vector<double> last_iterate;
  double residual;
};

// Principal branch of the Lambert W function, Halley iteration with a
// branch-point series seed near -1/e. Residual |w e^w - x| <= 1e-12 relative.
double lambert_w0(double x);

// Largest eigenvalue of a nonnegative square matrix (real by Perron-Frobenius),
// shifted power iteration.
double spectral_radius(const Matrix& m);

// Smallest fixed point in [0,1]^H of w_h = exp(sum_k m[h][k] (w_k - 1)).
// Returns all-ones when the spectral radius of m is <= 1 + kCriticalEps.
std::vector<double> solve_extinction(const Matrix& mean_offspring);

// H=1 closed form: w1 = -W0(-a e^-a) / a with a = N * gamma_11.
double extinction_closed_form_h1(double mean_offspring);

// Extinction probability with beta_h sources of each type: prod_h w_h^beta_h.
double extinction_multi_source(const std::vector<double>& w,
                               const std::vector<int>& sources);

// Componentwise-largest solution in [0,1]^H of
// 1 - z_h = exp(-sum_k m[k][h] z_k). Note the transposed weights: type-h nodes
// are reached by transmitters of every type k. All-zeros when subcritical.
std::vector<double> solve_fractions(const Matrix& mean_offspring);

// Expected overall fraction of recipients with beta_h sources per type:
// (sum_h N_h z_h / N) * (1 - prod_h w_h^beta_h).
double fraction_multi_source(const Matrix& mean_offspring,
                             const std::vector<int>& counts,
                             const std::vector<int>& sources);

// H=1 closed form for the overall fraction with beta sources.
double fraction_closed_form_h1(double mean_offspring, int beta);

struct AnalyticResult {
  double spectral_radius = 0.0;
  std::vector<double> extinction; // w_h
  std::vector<double> fractions;  // z_h, conditional on spread-out
  bool supercritical = false;
};

AnalyticResult analyze(const ScenarioConfig& cfg);
AnalyticResult analyze(const Matrix& mean_offspring);

} // namespace epicast::analytic
