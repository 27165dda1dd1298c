#include "epicast/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace epicast::analytic {
namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

void check_matrix(const Matrix& m) {
  const size_t h = m.size();
  if (h == 0) throw std::domain_error("empty matrix");
  for (const auto& row : m) {
    if (row.size() != h) throw std::domain_error("matrix must be square");
    for (double v : row)
      if (!std::isfinite(v) || v < 0)
        throw std::domain_error("matrix entries must be finite and >= 0");
  }
}

// Solve J dx = rhs in place, plain Gaussian elimination with partial
// pivoting. H is at most a handful.
std::vector<double> solve_linear(Matrix j, std::vector<double> rhs) {
  const int n = static_cast<int>(rhs.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(j[r][col]) > std::abs(j[piv][col])) piv = r;
    std::swap(j[col], j[piv]);
    std::swap(rhs[col], rhs[piv]);
    if (j[col][col] == 0.0) throw std::runtime_error("singular Jacobian");
    for (int r = col + 1; r < n; ++r) {
      const double f = j[r][col] / j[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) j[r][c] -= f * j[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < n; ++c) s -= j[r][c] * x[c];
    x[r] = s / j[r][r];
  }
  return x;
}

// Generic monotone fixed-point solve x = g(x) followed by damped Newton on
// F(x) = x - g(x). jac_g fills the Jacobian of g at x.
template <typename MapFn, typename JacFn>
std::vector<double> fixed_point_solve(std::vector<double> x, MapFn map,
                                      JacFn jac_g, const char* what) {
  const size_t h = x.size();
  std::vector<double> next(h);
  for (int it = 0; it < kMaxFixedPointIters; ++it) {
    map(x, next);
    const double d = max_abs_diff(x, next);
    x.swap(next);
    if (d < kFixedPointTol) break;
  }

  // Newton polish: drives the residual to machine level and rescues the
  // slow-converging near-critical cases.
  auto residual = [&](const std::vector<double>& v) {
    map(v, next);
    double r = 0.0;
    for (size_t i = 0; i < h; ++i) r = std::max(r, std::abs(v[i] - next[i]));
    return r;
  };
  double res = residual(x);
  for (int it = 0; it < 60 && res > 1e-15; ++it) {
    Matrix j(h, std::vector<double>(h, 0.0));
    jac_g(x, j);
    for (size_t i = 0; i < h; ++i) {
      for (size_t k = 0; k < h; ++k) j[i][k] = -j[i][k];
      j[i][i] += 1.0;
    }
    map(x, next);
    std::vector<double> f(h);
    for (size_t i = 0; i < h; ++i) f[i] = x[i] - next[i];
    std::vector<double> step;
    try {
      step = solve_linear(j, f);
    } catch (const std::runtime_error&) {
      break;
    }
    double damp = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half, damp *= 0.5) {
      std::vector<double> cand(h);
      bool in_box = true;
      for (size_t i = 0; i < h; ++i) {
        cand[i] = x[i] - damp * step[i];
        if (cand[i] < 0.0 || cand[i] > 1.0) { in_box = false; break; }
      }
      if (!in_box) continue;
      const double r2 = residual(cand);
      if (r2 < res) {
        x = std::move(cand);
        res = r2;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (res > 1e-12)
    throw ConvergenceError(std::string(what) + ": residual did not converge", x, res);
  return x;
}

} // namespace

double lambert_w0(double x) {
  if (std::isnan(x)) throw std::domain_error("lambert_w0: NaN input");
  const double branch = -std::exp(-1.0);
  if (x < branch) {
    if (x > branch - 1e-14) {
      x = branch;
    } else {
      throw std::domain_error("lambert_w0: x < -1/e");
    }
  }
  if (x == 0.0) return 0.0;

  double w;
  if (x < -0.25) {
    // Branch-point series in p = sqrt(2 (1 + e x)).
    const double p = std::sqrt(std::max(0.0, 2.0 * (1.0 + std::exp(1.0) * x)));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x < 2.0) {
    w = x / (1.0 + x);
  } else {
    const double l = std::log(x);
    w = l - std::log(l);
  }

  for (int it = 0; it < 100; ++it) {
    if (std::abs(w + 1.0) < 1e-13) break; // series seed is already exact here
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * (w + 1.0));
    const double dw = f / denom;
    w -= dw;
    if (std::abs(dw) <= 1e-14 * (1.0 + std::abs(w))) break;
  }
  return w;
}

double spectral_radius(const Matrix& m) {
  check_matrix(m);
  const size_t h = m.size();
  if (h == 1) return m[0][0];

  // Power iteration on m + I: the shift makes the dominant eigenvalue of the
  // nonnegative matrix strictly largest in magnitude, so the iteration cannot
  // cycle.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::vector<double> v(h, 1.0), av(h);
  double lambda = 0.0;
  for (int restart = 0; restart < 4; ++restart) {
    int stable = 0;
    for (long it = 0; it < 1000000; ++it) {
      double vmax = 0.0;
      for (double c : v) vmax = std::max(vmax, std::abs(c));
      if (vmax == 0.0) break;
      for (auto& c : v) c /= vmax;
      double num = 0.0, den = 0.0;
      for (size_t i = 0; i < h; ++i) {
        double s = v[i];
        for (size_t k = 0; k < h; ++k) s += m[i][k] * v[k];
        av[i] = s;
        num += v[i] * s;
        den += v[i] * v[i];
      }
      const double next = num / den;
      if (std::abs(next - lambda) <= 1e-13 * std::max(1.0, std::abs(next))) {
        if (++stable >= 3) return std::max(0.0, next - 1.0);
      } else {
        stable = 0;
      }
      lambda = next;
      v.swap(av);
    }
    // Restart from a fresh positive vector if the iteration stalled.
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (auto& c : v) c = u(rng);
  }
  return std::max(0.0, lambda - 1.0);
}

std::vector<double> solve_extinction(const Matrix& mean_offspring) {
  check_matrix(mean_offspring);
  const size_t h = mean_offspring.size();
  if (spectral_radius(mean_offspring) <= 1.0 + kCriticalEps)
    return std::vector<double>(h, 1.0); // extinction certain at or below threshold

  auto map = [&](const std::vector<double>& w, std::vector<double>& out) {
    for (size_t i = 0; i < h; ++i) {
      double s = 0.0;
      for (size_t k = 0; k < h; ++k) s += mean_offspring[i][k] * (w[k] - 1.0);
      out[i] = std::exp(s);
    }
  };
  auto jac = [&](const std::vector<double>& w, Matrix& j) {
    for (size_t i = 0; i < h; ++i) {
      double s = 0.0;
      for (size_t k = 0; k < h; ++k) s += mean_offspring[i][k] * (w[k] - 1.0);
      const double g = std::exp(s);
      for (size_t k = 0; k < h; ++k) j[i][k] = g * mean_offspring[i][k];
    }
  };
  // Starting from zero the iteration climbs monotonically to the smallest
  // fixed point, which is the extinction probability.
  return fixed_point_solve(std::vector<double>(h, 0.0), map, jac, "solve_extinction");
}

double extinction_closed_form_h1(double mean_offspring) {
  if (!(mean_offspring > 0.0))
    throw std::domain_error("extinction_closed_form_h1: mean offspring must be > 0");
  const double a = mean_offspring;
  if (a <= 1.0 + kCriticalEps) return 1.0;
  return -lambert_w0(-a * std::exp(-a)) / a;
}

double extinction_multi_source(const std::vector<double>& w,
                               const std::vector<int>& sources) {
  if (w.size() != sources.size())
    throw std::domain_error("extinction_multi_source: size mismatch");
  long total = 0;
  for (int b : sources) {
    if (b < 0) throw std::domain_error("extinction_multi_source: negative source count");
    total += b;
  }
  if (total < 1) throw std::domain_error("extinction_multi_source: no sources");
  double p = 1.0;
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0.0 || w[i] > 1.0)
      throw std::domain_error("extinction_multi_source: w outside [0,1]");
    if (sources[i] > 0) p *= std::pow(w[i], sources[i]);
  }
  return p;
}

std::vector<double> solve_fractions(const Matrix& mean_offspring) {
  check_matrix(mean_offspring);
  const size_t h = mean_offspring.size();
  if (spectral_radius(mean_offspring) <= 1.0 + kCriticalEps)
    return std::vector<double>(h, 0.0); // only the trivial solution exists

  // Weights are transposed: recipients of type h are reached by transmitters
  // of every type k with weight N_h-independent m[k][h].
  auto map = [&](const std::vector<double>& z, std::vector<double>& out) {
    for (size_t i = 0; i < h; ++i) {
      double s = 0.0;
      for (size_t k = 0; k < h; ++k) s += mean_offspring[k][i] * z[k];
      out[i] = -std::expm1(-s);
    }
  };
  auto jac = [&](const std::vector<double>& z, Matrix& j) {
    for (size_t i = 0; i < h; ++i) {
      double s = 0.0;
      for (size_t k = 0; k < h; ++k) s += mean_offspring[k][i] * z[k];
      const double g = std::exp(-s);
      for (size_t k = 0; k < h; ++k) j[i][k] = g * mean_offspring[k][i];
    }
  };
  // Starting from one the iteration descends monotonically to the largest
  // solution, avoiding the trivial all-zeros fixed point.
  return fixed_point_solve(std::vector<double>(h, 1.0), map, jac, "solve_fractions");
}

double fraction_multi_source(const Matrix& mean_offspring,
                             const std::vector<int>& counts,
                             const std::vector<int>& sources) {
  if (counts.size() != mean_offspring.size())
    throw std::domain_error("fraction_multi_source: counts size mismatch");
  const std::vector<double> w = solve_extinction(mean_offspring);
  const std::vector<double> z = solve_fractions(mean_offspring);
  double total = 0.0, weighted = 0.0;
  for (size_t i = 0; i < counts.size(); ++i) {
    total += counts[i];
    weighted += counts[i] * z[i];
  }
  return (weighted / total) * (1.0 - extinction_multi_source(w, sources));
}

double fraction_closed_form_h1(double mean_offspring, int beta) {
  if (!(mean_offspring > 0.0))
    throw std::domain_error("fraction_closed_form_h1: mean offspring must be > 0");
  if (beta < 1) throw std::domain_error("fraction_closed_form_h1: beta must be >= 1");
  const double a = mean_offspring;
  if (a <= 1.0 + kCriticalEps) return 0.0;
  const double w1 = -lambert_w0(-a * std::exp(-a)) / a;
  return (1.0 - w1) * (1.0 - std::pow(w1, beta));
}

AnalyticResult analyze(const Matrix& mean_offspring) {
  AnalyticResult r;
  r.spectral_radius = spectral_radius(mean_offspring);
  r.supercritical = r.spectral_radius > 1.0 + kCriticalEps;
  r.extinction = solve_extinction(mean_offspring);
  r.fractions = solve_fractions(mean_offspring);
  return r;
}

AnalyticResult analyze(const ScenarioConfig& cfg) {
  return analyze(mean_offspring_matrix(cfg));
}

} // namespace epicast::analytic
