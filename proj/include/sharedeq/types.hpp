#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sharedeq {

using Vector = Eigen::VectorXd;

/// A point of the shared constraint set {x >= 0 : sum(x) <= C}.
using Allocation = Eigen::VectorXd;

inline constexpr double kFeasibilityTolerance = 1e-9;
inline constexpr double kKktTolerance = 1e-6;
/// Threshold above which a coordinate is treated as strictly positive when
/// multipliers are read off a solution.
inline constexpr double kActivityTolerance = 1e-7;

/// Input outside an operation's domain (infeasible point, bad parameter).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A utility or gradient oracle returned something unusable.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sharedeq
