#pragma once

// Test-only oracles and random game generators. Nothing here calls the
// solver paths it is used to check.

#include "sharedeq/efficiency.hpp"
#include "sharedeq/structure.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace sharedeq::testing {

/// Dense-grid minimizer of |z - y| over the capped simplex.
inline Allocation grid_nearest(const CappedSimplex& set, const Vector& y, int resolution) {
  Allocation best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& z : set.grid(resolution)) {
    const double dist = (z - y).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = z;
    }
  }
  return best;
}

/// Number of lattice points k in N^n with sum(k) <= r, by direct counting.
inline long count_lattice(int n, int r) {
  if (n == 0) return 1;
  long total = 0;
  for (int k = 0; k <= r; ++k) total += count_lattice(n - 1, r - k);
  return total;
}

/// Central-difference gradient of a scalar field.
template <class F>
Vector central_gradient(F&& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Vector up = x, down = x;
    up[k] += h;
    down[k] -= h;
    g[k] = (f(up) - f(down)) / (2.0 * h);
  }
  return g;
}

enum class Family { Linear, LogCompetitive, QuasiLinear, Exponential, ScaledAggregate, Slade };

inline const std::vector<Family>& all_families() {
  static const std::vector<Family> families{Family::Linear,      Family::LogCompetitive,
                                            Family::QuasiLinear, Family::Exponential,
                                            Family::ScaledAggregate, Family::Slade};
  return families;
}

inline std::string family_name(Family f) {
  switch (f) {
    case Family::Linear: return "linear";
    case Family::LogCompetitive: return "log_competitive";
    case Family::QuasiLinear: return "quasi_linear";
    case Family::Exponential: return "exponential";
    case Family::ScaledAggregate: return "scaled_aggregate";
    case Family::Slade: return "slade";
  }
  return "?";
}

/// Concave eta tuple from log and quadratic pieces. With a, b in [0.5, 2] and
/// q in [0, 0.02] the resulting game satisfies the assumption on C = 1.
inline EtaTuple random_log_quadratic_etas(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ab(0.5, 2.0), qd(0.0, 0.02);
  EtaTuple etas;
  for (int i = 0; i < n; ++i) {
    Vector a(n), b(n);
    for (int k = 0; k < n; ++k) {
      a[k] = ab(rng);
      b[k] = ab(rng);
    }
    etas.push_back(EtaFunction::log_quadratic(i, a, b, qd(rng)));
  }
  return etas;
}

/// Random instance of a built-in family satisfying the standing assumption.
inline Game random_game(Family family, std::uint64_t seed, int n = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_n(2, 3);
  if (n == 0) n = pick_n(rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  std::vector<UtilityFunction> utilities;
  double capacity = uniform(0.5, 1.5);
  switch (family) {
    case Family::Linear:
      for (int i = 0; i < n; ++i) {
        Vector d(n);
        for (int j = 0; j < n; ++j) d[j] = (i == j) ? uniform(0.2, 2.0) : uniform(-0.05, 0.3);
        utilities.push_back(UtilityFunction::linear(i, d));
      }
      break;
    case Family::LogCompetitive:
      for (int i = 0; i < n; ++i)
        utilities.push_back(UtilityFunction::perfectly_competitive(
            i, n, ScalarFunction::logarithmic(uniform(0.5, 2.0), uniform(0.5, 3.0))));
      break;
    case Family::QuasiLinear:
      for (int i = 0; i < n; ++i) {
        Vector o(n);
        for (int j = 0; j < n; ++j) o[j] = uniform(0.0, 0.01);
        utilities.push_back(UtilityFunction::quasi_linear(
            i, ScalarFunction::logarithmic(uniform(0.5, 2.0), uniform(0.5, 3.0)), o));
      }
      break;
    case Family::Exponential:
      for (int i = 0; i < n; ++i) {
        Vector d(n);
        for (int j = 0; j < n; ++j) d[j] = (i == j) ? uniform(0.2, 2.0) : uniform(0.0, 0.5);
        utilities.push_back(UtilityFunction::exponential(i, d));
      }
      break;
    case Family::ScaledAggregate: {
      const double a = uniform(1.5, 2.5), b = uniform(0.5, 1.0);
      capacity = uniform(0.2, 0.9) * a / (2.0 * b);  // keeps a - 2 b t > 0
      for (int i = 0; i < n; ++i)
        utilities.push_back(UtilityFunction::scaled_aggregate(i, n, ScalarFunction::affine(a, -b)));
      break;
    }
    case Family::Slade:
      capacity = 1.0;
      return slade_game(random_log_quadratic_etas(n, rng), capacity);
  }
  return Game(capacity, std::move(utilities));
}

/// The linear game of the worst-case VE construction with eps = 0.5, N = 3, C = 1.
inline Game wcve_game(double eps = 0.5, int n = 3, double capacity = 1.0) {
  return make_wcve_game(eps, n, capacity);
}

}  // namespace sharedeq::testing
