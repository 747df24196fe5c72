#pragma once

#include "sharedeq/equilibrium.hpp"

#include <cstdint>
#include <vector>

namespace sharedeq {

/// eta_i: a function of x^{-i}. It receives the full allocation but must not
/// depend on coordinate `player`, and its gradient must vanish there.
struct EtaFunction {
  int player = 0;
  DifferentiableFunction f;

  /// sum_{j != player} u_j(x_j)
  static EtaFunction separable(int player, std::vector<ScalarFunction> terms);
  /// sum_{k != player} a_k log(1 + b_k x_k) - q (sum_{k != player} x_k)^2.
  /// Concave when a, b, q >= 0.
  static EtaFunction log_quadratic(int player, Vector a, Vector b, double q);
};

using EtaTuple = std::vector<EtaFunction>;

/// phi_i(x) = sum_j eta_j(x^{-j}) / (N-1) - eta_i(x^{-i}); the aggregate is
/// then sum_j eta_j / (N-1). Throws DomainError for N < 2.
std::vector<UtilityFunction> slade_construct(const EtaTuple& etas);
Game slade_game(const EtaTuple& etas, double capacity);

/// Largest |eta_i(x) - eta_i(x')| over samples where x' differs from x only
/// in coordinate i. Zero for a well-formed tuple.
double eta_independence_gap(const EtaTuple& etas, const CappedSimplex& set, int samples,
                            std::uint64_t seed = 1);

struct FprimeReport {
  int samples = 0;
  double max_gap = 0.0;  ///< max over samples, i of |grad_i Theta - grad_i phi_i|
  bool member = false;
};

/// Pointwise test of grad_i Theta = grad_i phi_i (threshold 1e-6).
FprimeReport is_in_Fprime(const Game& game, int samples, std::uint64_t seed = 1);

struct ScaledMembership {
  bool member = false;
  double scale = 0.0;     ///< least-squares k in F = -k grad Theta
  double residual = 0.0;  ///< max |grad_i phi_i - k grad_i Theta|
};

/// Tests F = -k grad Theta for one constant k > 0 across samples, with Theta
/// taken from `reference` (defaults to the game's own aggregate).
ScaledMembership scaled_membership(const Game& game, const SocialProblem& reference, int samples,
                                   std::uint64_t seed = 1);
ScaledMembership scaled_membership(const Game& game, int samples, std::uint64_t seed = 1);

/// Player objectives phi_i - price x_i. Efficiency is still measured against
/// the original game's aggregate.
Game reserve_price_transform(const Game& game, double price);

/// Lower bound on worst GNE efficiency under a reserve price for
/// perfectly competitive linear utilities: price / max c when price < max c,
/// otherwise 0.
double reserve_price_bound(const Vector& c, double price);

/// Closed-form GNE structure of a linear game under a reserve price.
struct ReservePriceAnalysis {
  std::vector<int> survivors;  ///< players with c_i >= price
  Allocation worst_gne;        ///< worst-efficiency GNE of the priced game
  double worst_efficiency = 0.0;
};

/// Linear game only. When some c_i > price the GNE set is the face 1^T x = C
/// restricted to survivors; otherwise the origin is a GNE.
ReservePriceAnalysis analyze_reserve_price(const Game& game, double price);

/// Players whose allocation in the certificate is at most the activity
/// tolerance.
std::vector<int> eliminated_players(const EquilibriumCertificate& certificate);

/// Payoff model: player i maximizes U_i(x) - tau(x); the social objective is
/// sum_j U_j(x) - tau(x) with tau counted once.
struct TauModel {
  std::vector<UtilityFunction> base;
  DifferentiableFunction tau;
};

/// Checks tau by the midpoint test on `samples` pairs; throws DomainError on
/// a violation.
void validate_tau_model(const TauModel& model, double capacity, int samples = 200);
Game tau_game(const TauModel& model, double capacity);
SocialProblem tau_sys(const TauModel& model, double capacity);

/// tau(x) = k (1^T x)^2
DifferentiableFunction quadratic_congestion(double k);

}  // namespace sharedeq
