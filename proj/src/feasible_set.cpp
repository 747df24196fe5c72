#include "sharedeq/feasible_set.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

namespace sharedeq {

CappedSimplex::CappedSimplex(int dimension, double capacity)
    : dimension_(dimension), capacity_(capacity) {
  if (dimension < 1) throw DomainError("CappedSimplex: dimension must be >= 1");
  if (!(capacity > 0.0) || !std::isfinite(capacity))
    throw DomainError("CappedSimplex: capacity must be positive and finite");
}

bool CappedSimplex::contains(const Vector& x, double tol) const {
  if (x.size() != dimension_) return false;
  if (!x.allFinite()) return false;
  if (x.minCoeff() < -tol) return false;
  return x.sum() <= capacity_ + tol;
}

void CappedSimplex::require_feasible(const Vector& x, const char* what) const {
  if (x.size() != dimension_)
    throw DomainError(std::string(what) + ": expected " + std::to_string(dimension_) +
                      " components, got " + std::to_string(x.size()));
  if (!contains(x))
    throw DomainError(std::string(what) + " is not in the capped simplex");
}

Allocation CappedSimplex::project(const Vector& y) const {
  if (y.size() != dimension_)
    throw DomainError("project: dimension mismatch");
  if (!y.allFinite()) throw DomainError("project: non-finite input");

  Allocation clipped = y.cwiseMax(0.0);
  if (clipped.sum() <= capacity_) return clipped;

  // Threshold t with sum(max(y - t, 0)) = C; scan sorted values from the top.
  std::vector<double> sorted(y.data(), y.data() + y.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double partial = 0.0;
  double threshold = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    partial += sorted[k];
    const double candidate = (partial - capacity_) / static_cast<double>(k + 1);
    if (k + 1 == sorted.size() || sorted[k + 1] <= candidate) {
      threshold = candidate;
      break;
    }
  }
  return (y.array() - threshold).cwiseMax(0.0).matrix();
}

LinearOptimum CappedSimplex::maximize_linear(const Vector& w) const {
  if (w.size() != dimension_)
    throw DomainError("maximize_linear: dimension mismatch");
  LinearOptimum result{Allocation::Zero(dimension_), 0.0};
  Eigen::Index best = 0;
  const double top = w.maxCoeff(&best);  // first index on ties
  if (top <= 0.0) return result;
  result.point[best] = capacity_;
  result.value = capacity_ * top;
  return result;
}

std::vector<Allocation> CappedSimplex::sample(std::size_t count, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Allocation> points;
  points.reserve(count);
  Vector draw(dimension_ + 1);
  for (std::size_t s = 0; s < count; ++s) {
    for (int k = 0; k <= dimension_; ++k) draw[k] = expo(rng);
    const double radius = unit(rng) * capacity_;
    Allocation x = draw.head(dimension_) * (radius / draw.sum());
    points.push_back(std::move(x));
  }
  return points;
}

std::vector<Allocation> CappedSimplex::grid(int resolution) const {
  if (resolution < 1) throw DomainError("grid: resolution must be >= 1");
  if (dimension_ > kMaxGridDimension)
    throw DomainError("grid: dimension " + std::to_string(dimension_) + " exceeds limit " +
                      std::to_string(kMaxGridDimension));
  const double spacing = capacity_ / resolution;
  std::vector<Allocation> points;
  std::vector<int> counts(dimension_, 0);
  // Odometer over compositions with total <= resolution.
  std::function<void(int, int)> fill = [&](int coord, int remaining) {
    if (coord == dimension_) {
      Allocation x(dimension_);
      for (int k = 0; k < dimension_; ++k) x[k] = counts[k] * spacing;
      points.push_back(std::move(x));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[coord] = c;
      fill(coord + 1, remaining - c);
    }
  };
  fill(0, resolution);
  return points;
}

}  // namespace sharedeq
