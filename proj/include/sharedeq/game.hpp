#pragma once

#include "sharedeq/feasible_set.hpp"
#include "sharedeq/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sharedeq {

/// Scalar function of one real variable with its derivative.
struct ScalarFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  /// Short human-readable form, e.g. "1*t - 1*t^2".
  std::string label;

  /// a t - b t^2
  static ScalarFunction quadratic(double a, double b);
  /// a log(1 + b t)
  static ScalarFunction logarithmic(double a, double b);
  /// a + b t
  static ScalarFunction affine(double a, double b);
};

using FieldFn = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;

/// A function of the whole allocation together with its gradient oracle.
struct DifferentiableFunction {
  FieldFn value;
  GradientFn gradient;
};

/// Utility phi_i of one player. Immutable; cheap to copy.
class UtilityFunction {
 public:
  enum class Kind {
    Linear,                ///< d^T x
    PerfectlyCompetitive,  ///< u(x_i)
    QuasiLinear,           ///< u(x_i) - sum_{j != i} o_j x_j
    Exponential,           ///< 1 - exp(-d^T x)
    ScaledAggregate,       ///< x_i g(1^T x)
    SladeDerived,          ///< built from a tuple of functions of x^{-i}
    Custom,                ///< arbitrary evaluator + gradient oracle
  };

  static UtilityFunction linear(int player, Vector d);
  static UtilityFunction perfectly_competitive(int player, int n, ScalarFunction u);
  /// `offdiag[player]` is ignored.
  static UtilityFunction quasi_linear(int player, ScalarFunction u, Vector offdiag);
  static UtilityFunction exponential(int player, Vector d);
  static UtilityFunction scaled_aggregate(int player, int n, ScalarFunction g);
  static UtilityFunction custom(int player, int n, DifferentiableFunction f,
                                std::string label = "custom");
  /// Used by the Slade construction in structure.hpp.
  static UtilityFunction slade_derived(int player, int n, DifferentiableFunction f);

  Kind kind() const { return kind_; }
  int player() const { return player_; }
  int dimension() const { return dimension_; }
  const std::string& label() const { return label_; }

  double value(const Vector& x) const;
  /// Full gradient with respect to x. Throws EvaluationError on a malformed
  /// oracle result.
  Vector gradient(const Vector& x) const;
  /// d phi_i / d x_i.
  double own_partial(const Vector& x) const { return gradient(x)[player_]; }

  /// Coefficient vector of a Linear or Exponential utility.
  const std::optional<Vector>& coefficients() const { return coefficients_; }

  /// k * phi (kind becomes Custom).
  UtilityFunction scaled(double k) const;
  /// phi - price * x_i (kind becomes Custom).
  UtilityFunction with_unit_charge(double price) const;
  /// phi - cost (kind becomes Custom).
  UtilityFunction minus(const DifferentiableFunction& cost) const;

 private:
  UtilityFunction(Kind kind, int player, int dimension, DifferentiableFunction f,
                  std::string label, std::optional<Vector> coefficients = std::nullopt);

  Kind kind_;
  int player_;
  int dimension_;
  DifferentiableFunction f_;
  std::string label_;
  std::optional<Vector> coefficients_;
};

const char* to_string(UtilityFunction::Kind kind);

/// Maximize an aggregate objective over a capped simplex. For an ordinary
/// game the objective is sum_j phi_j, but payoff models may count shared
/// costs once (see tau_sys).
struct SocialProblem {
  CappedSimplex set;
  DifferentiableFunction objective;
};

/// Shared-constraint game: N players, capacity C, one utility per player.
class Game {
 public:
  /// Throws DomainError on capacity <= 0, a size mismatch, a utility owned
  /// by the wrong player, or Theta(0) < -kFeasibilityTolerance.
  Game(double capacity, std::vector<UtilityFunction> utilities);

  int n() const { return static_cast<int>(utilities_.size()); }
  double capacity() const { return set_.capacity(); }
  const CappedSimplex& feasible_set() const { return set_; }
  const std::vector<UtilityFunction>& utilities() const { return utilities_; }
  const UtilityFunction& utility(int i) const { return utilities_.at(i); }

  /// Theta(x) = sum_j phi_j(x); x must be feasible.
  double theta(const Allocation& x) const;
  Vector theta_gradient(const Allocation& x) const;
  /// Pseudo-gradient F(x) = -(d phi_1/d x_1, ..., d phi_N/d x_N).
  Vector pseudo_gradient(const Allocation& x) const;
  /// True if every utility is of kind Linear.
  bool is_linear() const;

  /// Maximize Theta over the feasible set.
  SocialProblem social_problem() const;

 private:
  CappedSimplex set_;
  std::vector<UtilityFunction> utilities_;
};

/// Convenience wrappers matching the operation names.
inline double evaluate_theta(const Game& game, const Allocation& x) { return game.theta(x); }
inline Vector evaluate_F(const Game& game, const Allocation& x) {
  return game.pseudo_gradient(x);
}

/// Result of the sampled standing-assumption spot check. Violation magnitudes are
/// reported as nonnegative numbers (0 means no violation seen).
struct Assumption1Report {
  int samples = 0;
  double min_own_partial = 0.0;          ///< min over samples, i of d phi_i / d x_i
  double min_theta_gradient = 0.0;       ///< min over samples, j of (grad Theta)_j
  double max_concavity_violation = 0.0;  ///< max of (Theta(a)+Theta(b))/2 - Theta(mid)
  double min_value_at_zero = 0.0;        ///< min_i phi_i(0)
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Samples feasible points and reports the worst violations of: strict
/// increase in own variable, nonnegative grad Theta, concavity of Theta
/// along random segments (midpoint test) and phi_i(0) >= 0.
Assumption1Report check_assumption1(const Game& game, int samples, std::uint64_t seed = 1);

/// Max relative error between analytic gradients of every phi_i and central
/// differences with step h. Requires x_i >= h and sum(x) + h <= C.
double gradient_fd_check(const Game& game, const Allocation& x, double h = 1e-6);

}  // namespace sharedeq
