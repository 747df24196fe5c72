#include "sharedeq/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <string>

namespace sharedeq {

EtaFunction EtaFunction::separable(int player, std::vector<ScalarFunction> terms) {
  const int n = static_cast<int>(terms.size());
  if (player < 0 || player >= n) throw DomainError("separable eta: player out of range");
  auto shared = std::make_shared<const std::vector<ScalarFunction>>(std::move(terms));
  DifferentiableFunction f{[player, shared](const Vector& x) {
                             double total = 0.0;
                             for (int j = 0; j < x.size(); ++j)
                               if (j != player) total += (*shared)[j].value(x[j]);
                             return total;
                           },
                           [player, shared](const Vector& x) {
                             Vector g = Vector::Zero(x.size());
                             for (int j = 0; j < x.size(); ++j)
                               if (j != player) g[j] = (*shared)[j].derivative(x[j]);
                             return g;
                           }};
  return {player, std::move(f)};
}

EtaFunction EtaFunction::log_quadratic(int player, Vector a, Vector b, double q) {
  if (a.size() != b.size()) throw DomainError("log_quadratic eta: a and b differ in length");
  if (player < 0 || player >= a.size()) throw DomainError("log_quadratic eta: player out of range");
  if ((b.array() <= -1.0).any()) throw DomainError("log_quadratic eta: need b > -1");
  DifferentiableFunction f{[player, a, b, q](const Vector& x) {
                             double total = 0.0, others = 0.0;
                             for (int k = 0; k < x.size(); ++k) {
                               if (k == player) continue;
                               total += a[k] * std::log1p(b[k] * x[k]);
                               others += x[k];
                             }
                             return total - q * others * others;
                           },
                           [player, a, b, q](const Vector& x) {
                             const double others = x.sum() - x[player];
                             Vector g(x.size());
                             for (int k = 0; k < x.size(); ++k)
                               g[k] = a[k] * b[k] / (1.0 + b[k] * x[k]) - 2.0 * q * others;
                             g[player] = 0.0;
                             return g;
                           }};
  return {player, std::move(f)};
}

std::vector<UtilityFunction> slade_construct(const EtaTuple& etas) {
  const int n = static_cast<int>(etas.size());
  if (n < 2) throw DomainError("slade_construct: needs at least two players");
  for (int i = 0; i < n; ++i)
    if (etas[i].player != i)
      throw DomainError("slade_construct: eta " + std::to_string(i) + " belongs to player " +
                        std::to_string(etas[i].player));
  auto shared = std::make_shared<const EtaTuple>(etas);
  const double inv = 1.0 / static_cast<double>(n - 1);
  std::vector<UtilityFunction> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    DifferentiableFunction f{[shared, i, inv](const Vector& x) {
                               double total = 0.0;
                               for (const auto& eta : *shared) total += eta.f.value(x);
                               return total * inv - (*shared)[i].f.value(x);
                             },
                             [shared, i, inv](const Vector& x) {
                               Vector g = Vector::Zero(x.size());
                               for (const auto& eta : *shared) g += eta.f.gradient(x);
                               return Vector(g * inv - (*shared)[i].f.gradient(x));
                             }};
    out.push_back(UtilityFunction::slade_derived(i, n, std::move(f)));
  }
  return out;
}

Game slade_game(const EtaTuple& etas, double capacity) {
  return Game(capacity, slade_construct(etas));
}

double eta_independence_gap(const EtaTuple& etas, const CappedSimplex& set, int samples,
                            std::uint64_t seed) {
  const auto points = set.sample(static_cast<std::size_t>(samples), seed);
  std::mt19937_64 rng(seed + 17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (const auto& x : points) {
    for (const auto& eta : etas) {
      Vector moved = x;
      const double room = set.capacity() - (x.sum() - x[eta.player]);
      moved[eta.player] = unit(rng) * room;
      worst = std::max(worst, std::abs(eta.f.value(moved) - eta.f.value(x)));
      worst = std::max(worst, std::abs(eta.f.gradient(x)[eta.player]));
    }
  }
  return worst;
}

FprimeReport is_in_Fprime(const Game& game, int samples, std::uint64_t seed) {
  FprimeReport report;
  report.samples = samples;
  for (const auto& x : game.feasible_set().sample(static_cast<std::size_t>(samples), seed)) {
    const Vector gap = game.theta_gradient(x) + game.pseudo_gradient(x);
    report.max_gap = std::max(report.max_gap, gap.cwiseAbs().maxCoeff());
  }
  report.member = report.max_gap <= kKktTolerance;
  return report;
}

ScaledMembership scaled_membership(const Game& game, const SocialProblem& reference, int samples,
                                   std::uint64_t seed) {
  if (reference.set.dimension() != game.n())
    throw DomainError("scaled_membership: reference problem has the wrong dimension");
  const auto points = game.feasible_set().sample(static_cast<std::size_t>(samples), seed);
  std::vector<Vector> own, agg;
  double cross = 0.0, norm = 0.0;
  for (const auto& x : points) {
    own.push_back(-game.pseudo_gradient(x));
    agg.push_back(reference.objective.gradient(x));
    cross += own.back().dot(agg.back());
    norm += agg.back().squaredNorm();
  }
  ScaledMembership out;
  if (norm <= 0.0) {
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }
  out.scale = cross / norm;
  for (std::size_t s = 0; s < own.size(); ++s)
    out.residual = std::max(out.residual, (own[s] - out.scale * agg[s]).cwiseAbs().maxCoeff());
  out.member = out.scale > 0.0 && out.residual <= kKktTolerance;
  return out;
}

ScaledMembership scaled_membership(const Game& game, int samples, std::uint64_t seed) {
  return scaled_membership(game, game.social_problem(), samples, seed);
}

Game reserve_price_transform(const Game& game, double price) {
  if (!(price >= 0.0) || !std::isfinite(price))
    throw DomainError("reserve_price_transform: price must be finite and nonnegative");
  std::vector<UtilityFunction> priced;
  priced.reserve(game.n());
  for (const auto& u : game.utilities()) priced.push_back(u.with_unit_charge(price));
  return Game(game.capacity(), std::move(priced));
}

double reserve_price_bound(const Vector& c, double price) {
  if (c.size() == 0 || !(c.minCoeff() > 0.0))
    throw DomainError("reserve_price_bound: coefficients must be positive");
  if (!(price >= 0.0)) throw DomainError("reserve_price_bound: price must be nonnegative");
  const double top = c.maxCoeff();
  return price < top ? price / top : 0.0;
}

ReservePriceAnalysis analyze_reserve_price(const Game& game, double price) {
  if (!(price >= 0.0)) throw DomainError("analyze_reserve_price: price must be nonnegative");
  const auto linear = analyze_linear(game);
  const Vector& c = linear.own_coefficients;
  const Vector& d = linear.theta_gradient;
  const double top = d.maxCoeff();

  ReservePriceAnalysis out;
  out.worst_gne = Allocation::Zero(game.n());
  for (int i = 0; i < game.n(); ++i)
    if (c[i] >= price) out.survivors.push_back(i);
  if (!(c.maxCoeff() > price)) return out;  // the origin is a GNE

  int worst = out.survivors.front();
  for (int i : out.survivors)
    if (d[i] < d[worst]) worst = i;
  out.worst_gne[worst] = game.capacity();
  out.worst_efficiency = d[worst] / top;
  return out;
}

std::vector<int> eliminated_players(const EquilibriumCertificate& certificate) {
  std::vector<int> out;
  for (int i = 0; i < certificate.x.size(); ++i)
    if (certificate.x[i] <= kActivityTolerance) out.push_back(i);
  return out;
}

void validate_tau_model(const TauModel& model, double capacity, int samples) {
  const int n = static_cast<int>(model.base.size());
  if (n < 1) throw DomainError("tau model: no base utilities");
  if (!model.tau.value || !model.tau.gradient) throw DomainError("tau model: missing cost");
  const CappedSimplex set(n, capacity);
  const auto a = set.sample(static_cast<std::size_t>(samples), 11);
  const auto b = set.sample(static_cast<std::size_t>(samples), 12);
  for (int s = 0; s < samples; ++s) {
    const double ta = model.tau.value(a[s]);
    const double tb = model.tau.value(b[s]);
    const double tm = model.tau.value(0.5 * (a[s] + b[s]));
    if (tm > 0.5 * (ta + tb) + 1e-9 * (1.0 + std::abs(ta) + std::abs(tb)))
      throw DomainError("tau model: cost fails the midpoint convexity test");
  }
}

Game tau_game(const TauModel& model, double capacity) {
  validate_tau_model(model, capacity);
  std::vector<UtilityFunction> utilities;
  for (const auto& u : model.base) utilities.push_back(u.minus(model.tau));
  return Game(capacity, std::move(utilities));
}

SocialProblem tau_sys(const TauModel& model, double capacity) {
  validate_tau_model(model, capacity);
  const int n = static_cast<int>(model.base.size());
  auto base = model.base;
  auto tau = model.tau;
  DifferentiableFunction objective{[base, tau](const Vector& x) {
                                     double total = -tau.value(x);
                                     for (const auto& u : base) total += u.value(x);
                                     return total;
                                   },
                                   [base, tau](const Vector& x) {
                                     Vector g = -tau.gradient(x);
                                     for (const auto& u : base) g += u.gradient(x);
                                     return g;
                                   }};
  return {CappedSimplex(n, capacity), std::move(objective)};
}

DifferentiableFunction quadratic_congestion(double k) {
  if (k < 0.0) throw DomainError("quadratic_congestion: coefficient must be nonnegative");
  return {[k](const Vector& x) {
            const double s = x.sum();
            return k * s * s;
          },
          [k](const Vector& x) { return Vector(Vector::Constant(x.size(), 2.0 * k * x.sum())); }};
}

}  // namespace sharedeq
