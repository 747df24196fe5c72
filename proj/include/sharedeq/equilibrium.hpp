#pragma once

#include "sharedeq/game.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sharedeq {

enum class EquilibriumKind { GNE, VE, SOCIAL };

const char* to_string(EquilibriumKind kind);

/// A candidate solution together with the multipliers read off it and the
/// largest KKT violation. For GNE `multipliers` holds one entry per player;
/// for VE and SOCIAL it holds the single shared multiplier.
struct EquilibriumCertificate {
  Allocation x;
  Vector multipliers;
  EquilibriumKind kind = EquilibriumKind::VE;
  double residual = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;

  bool certified(double tol = kKktTolerance) const { return residual <= tol; }
  double lambda() const { return multipliers.size() ? multipliers[0] : 0.0; }
};

struct SolverConfig {
  int max_iterations = 200000;
  double step_size = 1.0;
  double backtracking = 0.5;
  double kkt_tolerance = kKktTolerance;
  /// 0 starts at the origin; any other value starts at a feasible point
  /// drawn with CappedSimplex::sample under that seed.
  std::uint64_t seed = 0;

  /// Throws DomainError if a field is out of range.
  void validate() const;
};

/// Thrown when a solver exhausts its iteration budget; carries the best
/// iterate seen.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, EquilibriumCertificate best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const EquilibriumCertificate& best() const { return best_; }

 private:
  EquilibriumCertificate best_;
};

/// Projected gradient ascent with Armijo backtracking on the social
/// objective. The shared multiplier is read off the solution.
EquilibriumCertificate solve_social(const SocialProblem& problem, const SolverConfig& config = {});
EquilibriumCertificate solve_social(const Game& game, const SolverConfig& config = {});

/// Variational equilibrium by the extragradient method
///   x_half = P(x - s F(x)),  x_next = P(x - s F(x_half)),
/// with s reduced until s |F(x) - F(x_half)| <= 0.9 |x - x_half|.
EquilibriumCertificate solve_ve(const Game& game, const SolverConfig& config = {});

/// Reads multipliers off x and measures the KKT violation of the requested
/// system. For GNE the capacity counts as binding when its slack is at most
/// `kkt_tolerance`. Residuals use the min-function |min(a, b)| for each
/// complementarity pair 0 <= a _|_ b >= 0.
EquilibriumCertificate certify(const Game& game, const Allocation& x, EquilibriumKind kind,
                               double kkt_tolerance = kKktTolerance);
/// SOCIAL certification against an arbitrary social problem.
EquilibriumCertificate certify_social(const SocialProblem& problem, const Allocation& x);

/// Closed-form description of a game with linear utilities phi_i = d_i^T x.
struct LinearAnalysis {
  Vector own_coefficients;  ///< c_i = d_i^i
  Vector theta_gradient;    ///< d = sum_i d_i
  double capacity = 0.0;
  /// GNE set is the face {x >= 0, 1^T x = C}.
  /// VE set is the part of that face supported on these players.
  std::vector<int> ve_support;
  double ve_multiplier = 0.0;  ///< max_i c_i
  double social_value = 0.0;   ///< C max_i d_i
  int worst_gne_player = 0;    ///< argmin_i d_i (lowest index)
  double worst_gne_efficiency = 0.0;
  double best_gne_efficiency = 1.0;
  double worst_ve_efficiency = 0.0;
  double best_ve_efficiency = 0.0;
};

/// Requires every utility Linear with c_i > 0 and grad Theta >= 0 with a
/// positive entry.
LinearAnalysis analyze_linear(const Game& game);

struct GridOptimum {
  Allocation point;
  double value = 0.0;
};

/// Exhaustive maximum of Theta over CappedSimplex::grid(resolution).
GridOptimum brute_force_social(const Game& game, int resolution);
GridOptimum brute_force_social(const SocialProblem& problem, int resolution);

/// min over grid points y of F(x)^T (y - x). x is a VE (up to the grid) iff
/// the result is >= -1e-6.
double brute_force_ve_check(const Game& game, const Allocation& x, int resolution);

}  // namespace sharedeq
