#pragma once

#include "sharedeq/types.hpp"

#include <cstdint>
#include <vector>

namespace sharedeq {

/// Maximizer and value of a linear objective over the capped simplex.
struct LinearOptimum {
  Allocation point;
  double value = 0.0;
};

/// The capped simplex {x in R^N : x >= 0, sum(x) <= C}.
class CappedSimplex {
 public:
  CappedSimplex(int dimension, double capacity);

  int dimension() const { return dimension_; }
  double capacity() const { return capacity_; }

  /// True when x has the right size, x >= -tol and sum(x) <= C + tol.
  bool contains(const Vector& x, double tol = kFeasibilityTolerance) const;

  /// Throws DomainError naming `what` when x is not in the set.
  void require_feasible(const Vector& x, const char* what = "allocation") const;

  /// Euclidean projection. Clips at zero when that already respects the
  /// capacity; otherwise projects onto the face sum(z) = C by the
  /// sorted-threshold rule.
  Allocation project(const Vector& y) const;

  /// argmax of w^T z over the set. Returns the origin when max(w) <= 0,
  /// otherwise C e_i for the lowest index attaining max(w).
  LinearOptimum maximize_linear(const Vector& w) const;

  /// `count` feasible points: N+1 standard exponential variates are
  /// normalized to sum one, the first N kept and scaled by r C with r
  /// uniform on [0, 1]. Deterministic for a given seed.
  std::vector<Allocation> sample(std::size_t count, std::uint64_t seed) const;

  /// All lattice points k C / resolution with coordinate sums <= C.
  /// Limited to dimension <= kMaxGridDimension.
  std::vector<Allocation> grid(int resolution) const;

  static constexpr int kMaxGridDimension = 5;

 private:
  int dimension_;
  double capacity_;
};

}  // namespace sharedeq
