#include "sharedeq/efficiency.hpp"

#include "sharedeq/structure.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace sharedeq {
namespace {

constexpr double kDegenerateOptimum = 1e-12;

EfficiencyReport make_report(double theta_x, double theta_opt, std::optional<double> bound) {
  EfficiencyReport report;
  report.theta_at_x = theta_x;
  report.theta_opt = theta_opt;
  report.lemma1_bound = bound;
  report.denominator_degenerate = theta_opt <= kDegenerateOptimum;
  if (!report.denominator_degenerate) report.ratio = theta_x / theta_opt;
  return report;
}

// Concave Theta attains its minimum over the face 1^T x = C at a vertex, and
// every vertex of that face is a GNE when all own partials are positive.
double worst_face_vertex_efficiency(const Game& game, const SolverConfig& config) {
  const double opt = social_value(game, config);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < game.n(); ++i) {
    Allocation vertex = Allocation::Zero(game.n());
    vertex[i] = game.capacity();
    if (!certify(game, vertex, EquilibriumKind::GNE, config.kkt_tolerance)
             .certified(config.kkt_tolerance))
      throw EvaluationError("face vertex " + std::to_string(i) + " is not a GNE");
    worst = std::min(worst, game.theta(vertex) / opt);
  }
  return worst;
}

SweepRow evaluate_row(const GameFamily& family, double parameter, const SolverConfig& config) {
  SweepRow row;
  row.parameter = parameter;
  try {
    switch (family.kind) {
      case GameFamily::Kind::WCVE: {
        row.closed_form = 2.0 * parameter / (parameter + 1.0);
        const Game game = instantiate(family, parameter);
        const auto ve = solve_ve(game, config);
        row.efficiency = efficiency(game, ve.x, config).ratio;
        break;
      }
      case GameFamily::Kind::WCGNE: {
        row.closed_form = parameter;
        row.efficiency = analyze_linear(instantiate(family, parameter)).worst_gne_efficiency;
        break;
      }
      case GameFamily::Kind::ReservePriceLinear: {
        row.closed_form = reserve_price_bound(family.coefficients, parameter);
        const Game game = instantiate(family, parameter);
        const auto priced = reserve_price_transform(game, parameter);
        const auto analysis = analyze_reserve_price(game, parameter);
        if (!certify(priced, analysis.worst_gne, EquilibriumKind::GNE, config.kkt_tolerance)
                 .certified(config.kkt_tolerance))
          throw EvaluationError("worst GNE of the priced game failed certification");
        row.efficiency = efficiency(game, analysis.worst_gne, config).ratio.value_or(0.0);
        break;
      }
      case GameFamily::Kind::BoundedGradientExp: {
        const CappedSimplex set(2, family.capacity);
        const std::vector<Vector> scaled{Vector::Unit(2, 0) * parameter,
                                         Vector::Unit(2, 1) * parameter};
        const double alpha = parameter * exp_family_alpha(scaled, set);
        row.closed_form = bounded_gradient_bound(alpha, parameter);
        row.efficiency = worst_face_vertex_efficiency(instantiate(family, parameter), config);
        break;
      }
    }
  } catch (const std::exception& e) {
    row.efficiency.reset();
    row.error = e.what();
  }
  return row;
}

std::optional<double> try_lemma1_bound(const SocialProblem& problem, const Allocation& x) {
  if (problem.objective.gradient(x).minCoeff() < -kFeasibilityTolerance) return std::nullopt;
  return lemma1_bound(problem, x);
}

}  // namespace

double social_value(const Game& game, const SolverConfig& config) {
  if (game.is_linear()) {
    // Theta(x) = d^T x, so the optimum is C max(d, 0).
    const Vector d = game.theta_gradient(Allocation::Zero(game.n()));
    return game.feasible_set().maximize_linear(d).value;
  }
  const auto cert = solve_social(game, config);
  return game.theta(cert.x);
}

EfficiencyReport efficiency(const Game& game, const Allocation& x, const SolverConfig& config) {
  game.feasible_set().require_feasible(x);
  return make_report(game.theta(x), social_value(game, config),
                     try_lemma1_bound(game.social_problem(), x));
}

EfficiencyReport efficiency(const SocialProblem& benchmark, const Allocation& x,
                            const SolverConfig& config) {
  benchmark.set.require_feasible(x);
  const auto cert = solve_social(benchmark, config);
  return make_report(benchmark.objective.value(x), benchmark.objective.value(cert.x),
                     try_lemma1_bound(benchmark, x));
}

double lemma1_bound(const SocialProblem& problem, const Allocation& x) {
  problem.set.require_feasible(x);
  const Vector g = problem.objective.gradient(x);
  if (g.minCoeff() < -kFeasibilityTolerance)
    throw DomainError("lemma1_bound: gradient of the aggregate has a negative component");
  const double denominator = problem.set.maximize_linear(g).value;
  if (denominator <= 0.0) return 1.0;
  return g.dot(x) / denominator;
}

double lemma1_bound(const Game& game, const Allocation& x) {
  return lemma1_bound(game.social_problem(), x);
}

double bounded_gradient_bound(double alpha, double beta) {
  if (!(alpha > 0.0) || !(alpha <= beta))
    throw DomainError("bounded_gradient_bound: need 0 < alpha <= beta");
  return alpha / beta;
}

double exp_family_alpha(const std::vector<Vector>& coefficients, const CappedSimplex& set,
                        int resolution) {
  if (coefficients.empty()) throw DomainError("exp_family_alpha: empty coefficient set");
  double alpha = std::numeric_limits<double>::infinity();
  for (const auto& d : coefficients) {
    if (d.size() != set.dimension())
      throw DomainError("exp_family_alpha: coefficient vector has the wrong dimension");
    if (d.minCoeff() < 0.0) throw DomainError("exp_family_alpha: negative coefficient");
    // exp(-d^T z) is smallest where d^T z is largest: at C e_i or, for d = 0, anywhere.
    alpha = std::min(alpha, std::exp(-set.capacity() * d.maxCoeff()));
  }
  if (resolution > 0) {
    double grid_alpha = std::numeric_limits<double>::infinity();
    for (const auto& z : set.grid(resolution))
      for (const auto& d : coefficients) grid_alpha = std::min(grid_alpha, std::exp(-d.dot(z)));
    if (std::abs(grid_alpha - alpha) > 1e-12)
      throw EvaluationError("exp_family_alpha: grid cross-check disagrees with vertex value");
  }
  return alpha;
}

const char* to_string(GameFamily::Kind kind) {
  switch (kind) {
    case GameFamily::Kind::WCVE: return "wcve";
    case GameFamily::Kind::WCGNE: return "wcgne";
    case GameFamily::Kind::ReservePriceLinear: return "reserve";
    case GameFamily::Kind::BoundedGradientExp: return "bounded_exp";
  }
  return "unknown";
}

Game make_wcve_game(double eps, int n, double capacity) {
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("wcve family: epsilon must lie in (0, 1]");
  if (n < 2) throw DomainError("wcve family: needs at least two players");
  std::vector<UtilityFunction> utilities;
  for (int i = 0; i + 1 < n; ++i) utilities.push_back(UtilityFunction::linear(i, Vector::Unit(n, i) * eps));
  Vector last = Vector::Zero(n);
  last[0] = 1.0;
  last[n - 1] = 2.0 * eps;
  utilities.push_back(UtilityFunction::linear(n - 1, last));
  return Game(capacity, std::move(utilities));
}

Game make_perfectly_competitive_linear(const Vector& c, double capacity) {
  std::vector<UtilityFunction> utilities;
  const int n = static_cast<int>(c.size());
  for (int i = 0; i < n; ++i) utilities.push_back(UtilityFunction::linear(i, Vector::Unit(n, i) * c[i]));
  return Game(capacity, std::move(utilities));
}

Game make_wcgne_game(double eps, int n, double capacity) {
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("wcgne family: epsilon must lie in (0, 1]");
  if (n < 2) throw DomainError("wcgne family: needs at least two players");
  Vector c = Vector::Constant(n, eps);
  c[0] = 1.0;
  return make_perfectly_competitive_linear(c, capacity);
}

Game make_bounded_exp_game(double scale, double capacity) {
  if (!(scale > 0.0)) throw DomainError("bounded exp family: scale must be positive");
  return Game(capacity, {UtilityFunction::exponential(0, Vector::Unit(2, 0) * scale),
                         UtilityFunction::exponential(1, Vector::Unit(2, 1) * scale)});
}

Game instantiate(const GameFamily& family, double parameter) {
  switch (family.kind) {
    case GameFamily::Kind::WCVE: return make_wcve_game(parameter, family.n, family.capacity);
    case GameFamily::Kind::WCGNE: return make_wcgne_game(parameter, family.n, family.capacity);
    case GameFamily::Kind::ReservePriceLinear:
      return make_perfectly_competitive_linear(family.coefficients, family.capacity);
    case GameFamily::Kind::BoundedGradientExp:
      return make_bounded_exp_game(parameter, family.capacity);
  }
  throw DomainError("unknown game family");
}

std::vector<SweepRow> sweep_family(const GameFamily& family, const SolverConfig& config) {
  std::vector<double> parameters = family.parameters;
  std::sort(parameters.begin(), parameters.end());
  std::vector<std::future<SweepRow>> pending;
  pending.reserve(parameters.size());
  for (double p : parameters)
    pending.push_back(std::async(std::launch::async, evaluate_row, std::cref(family), p,
                                 std::cref(config)));
  std::vector<SweepRow> rows;
  rows.reserve(pending.size());
  for (auto& f : pending) rows.push_back(f.get());
  return rows;
}

}  // namespace sharedeq
