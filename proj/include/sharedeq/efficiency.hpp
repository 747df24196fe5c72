#pragma once

#include "sharedeq/equilibrium.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sharedeq {

/// Efficiency Theta(x) / Theta(x*) of one allocation against a social
/// optimum x*.
struct EfficiencyReport {
  double theta_at_x = 0.0;
  double theta_opt = 0.0;
  /// Unset when the denominator is degenerate.
  std::optional<double> ratio;
  /// Unset when grad Theta(x) has a negative component (bound not applicable).
  std::optional<double> lemma1_bound;
  bool denominator_degenerate = false;
};

/// Optimal social value. Linear games use the closed form C max_i (grad Theta)_i;
/// everything else runs solve_social.
double social_value(const Game& game, const SolverConfig& config = {});

/// Efficiency of x in `game`, benchmarked against the game's own aggregate.
EfficiencyReport efficiency(const Game& game, const Allocation& x, const SolverConfig& config = {});
/// Efficiency of x against an arbitrary social problem (e.g. the original
/// game after a reserve-price transform).
EfficiencyReport efficiency(const SocialProblem& benchmark, const Allocation& x,
                            const SolverConfig& config = {});

/// Linearization lower bound grad Theta(x)^T x / (C max_i grad_i Theta(x)).
/// Returns 1 when the denominator vanishes. Throws DomainError if
/// grad Theta(x) has a negative component.
double lemma1_bound(const Game& game, const Allocation& x);
double lemma1_bound(const SocialProblem& problem, const Allocation& x);

/// Worst-case GNE efficiency over the class with alpha 1 <= grad Theta <= beta 1.
double bounded_gradient_bound(double alpha, double beta);

/// min over (d, z) in D x capped simplex of exp(-d^T z). The minimum sits at
/// a vertex C e_i; when `resolution` > 0 a grid search cross-checks the
/// vertex value and a mismatch beyond 1e-12 throws.
double exp_family_alpha(const std::vector<Vector>& coefficients, const CappedSimplex& set,
                        int resolution = 0);

/// Constructive game families.
struct GameFamily {
  enum class Kind {
    WCVE,                ///< linear games with VE efficiency 2e/(e+1)
    WCGNE,               ///< linear games with worst GNE efficiency e
    ReservePriceLinear,  ///< perfectly competitive linear c, swept over the price
    BoundedGradientExp,  ///< exponential utilities d_i = s e_i, swept over s
  };

  Kind kind = Kind::WCVE;
  std::vector<double> parameters;
  int n = 4;
  double capacity = 1.0;
  /// Own coefficients c for ReservePriceLinear.
  Vector coefficients;
};

const char* to_string(GameFamily::Kind kind);

/// Worst-case constructions.
/// d_i = e e_i for i < N, d_N = e_1 + 2e e_N: c = (e,...,e,2e), grad Theta = (e+1, e,...,e, 2e).
Game make_wcve_game(double eps, int n, double capacity);
/// phi_i = c_i x_i with c = (1, e, ..., e).
Game make_wcgne_game(double eps, int n, double capacity);
/// phi_i = c_i x_i.
Game make_perfectly_competitive_linear(const Vector& c, double capacity);
/// Two players, phi_i = 1 - exp(-s x_i).
Game make_bounded_exp_game(double scale, double capacity);

/// Instantiates the family member for one parameter value.
Game instantiate(const GameFamily& family, double parameter);

struct SweepRow {
  double parameter = 0.0;
  std::optional<double> efficiency;
  double closed_form = 0.0;
  std::string error;
};

/// One row per parameter, ordered by parameter. A failing row records its
/// error and the sweep continues. Rows are evaluated concurrently.
std::vector<SweepRow> sweep_family(const GameFamily& family, const SolverConfig& config = {});

}  // namespace sharedeq
