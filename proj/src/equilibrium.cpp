#include "sharedeq/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sharedeq {
namespace {

struct SharedKkt {
  double lambda = 0.0;
  double residual = 0.0;
};

double feasibility_violation(const Allocation& x, double capacity) {
  return std::max({0.0, -x.minCoeff(), x.sum() - capacity});
}

// Shared-multiplier system
//   0 <= x _|_ -g(x) + lambda 1 >= 0,  0 <= lambda _|_ C - 1^T x >= 0
// with lambda read off the coordinates where x is active.
SharedKkt shared_kkt(const Allocation& x, const Vector& g, double capacity) {
  SharedKkt out;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] > kActivityTolerance) out.lambda = std::max(out.lambda, g[i]);
  const double slack = capacity - x.sum();
  double r = feasibility_violation(x, capacity);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    r = std::max(r, std::abs(std::min(x[i], out.lambda - g[i])));
  r = std::max(r, std::abs(std::min(out.lambda, slack)));
  out.residual = r;
  return out;
}

Allocation starting_point(const CappedSimplex& set, const SolverConfig& config) {
  if (config.seed == 0) return Allocation::Zero(set.dimension());
  return set.sample(1, config.seed).front();
}

Vector own_partials(const Game& game, const Allocation& x) { return -game.pseudo_gradient(x); }

EquilibriumCertificate make_shared(const Allocation& x, const Vector& g, double capacity,
                                   EquilibriumKind kind, int iterations) {
  const auto kkt = shared_kkt(x, g, capacity);
  EquilibriumCertificate cert;
  cert.x = x;
  cert.multipliers = Vector::Constant(1, kkt.lambda);
  cert.kind = kind;
  cert.residual = kkt.residual;
  cert.iterations = iterations;
  return cert;
}

}  // namespace

const char* to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::GNE: return "gne";
    case EquilibriumKind::VE: return "ve";
    case EquilibriumKind::SOCIAL: return "social";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (max_iterations < 1) throw DomainError("solver: max_iterations must be positive");
  if (!(step_size > 0.0) || !std::isfinite(step_size))
    throw DomainError("solver: step_size must be positive");
  if (!(backtracking > 0.0 && backtracking < 1.0))
    throw DomainError("solver: backtracking factor must lie in (0, 1)");
  if (!(kkt_tolerance > 0.0)) throw DomainError("solver: kkt_tolerance must be positive");
}

EquilibriumCertificate solve_social(const SocialProblem& problem, const SolverConfig& config) {
  config.validate();
  constexpr double kArmijo = 1e-4;
  const auto& set = problem.set;
  const double capacity = set.capacity();
  const double max_step = config.step_size * 1e8;

  Allocation x = starting_point(set, config);
  double value = problem.objective.value(x);
  double step = config.step_size;
  EquilibriumCertificate best;
  best.residual = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter <= config.max_iterations; ++iter) {
    const Vector g = problem.objective.gradient(x);
    auto cert = make_shared(x, g, capacity, EquilibriumKind::SOCIAL, iter);
    if (cert.residual < best.residual) best = cert;
    if (cert.residual <= config.kkt_tolerance) return cert;
    if (iter == config.max_iterations) break;

    Allocation next;
    double next_value = value;
    bool accepted = false;
    while (step > 1e-20) {
      next = set.project(x + step * g);
      next_value = problem.objective.value(next);
      if (next_value >= value + kArmijo * g.dot(next - x)) {
        accepted = true;
        break;
      }
      step *= config.backtracking;
    }
    if (!accepted || next == x) {
      best.iterations = iter;
      throw ConvergenceError("solve_social: no ascent step available (residual " +
                                 std::to_string(best.residual) + ")",
                             best);
    }
    x = std::move(next);
    value = next_value;
    step = std::min(step / config.backtracking, max_step);
  }
  throw ConvergenceError("solve_social: iteration limit reached (best residual " +
                             std::to_string(best.residual) + ")",
                         best);
}

EquilibriumCertificate solve_social(const Game& game, const SolverConfig& config) {
  return solve_social(game.social_problem(), config);
}

EquilibriumCertificate solve_ve(const Game& game, const SolverConfig& config) {
  config.validate();
  constexpr double kContraction = 0.9;
  constexpr int kStallWindow = 50;
  const auto& set = game.feasible_set();
  const double capacity = set.capacity();
  const double max_step = config.step_size * 1e8;

  Allocation x = starting_point(set, config);
  double step = config.step_size;
  EquilibriumCertificate best;
  best.residual = std::numeric_limits<double>::infinity();
  std::vector<std::string> warnings;
  double previous_natural = std::numeric_limits<double>::infinity();
  int rising = 0;

  for (int iter = 0; iter <= config.max_iterations; ++iter) {
    const Vector fx = game.pseudo_gradient(x);
    auto cert = make_shared(x, -fx, capacity, EquilibriumKind::VE, iter);
    cert.warnings = warnings;
    if (cert.residual < best.residual) best = cert;
    if (cert.residual <= config.kkt_tolerance) return cert;
    if (iter == config.max_iterations) break;

    const double natural = (x - set.project(x - fx)).norm();
    rising = natural > previous_natural ? rising + 1 : 0;
    previous_natural = natural;
    if (rising == kStallWindow)
      warnings.push_back("natural residual rose for " + std::to_string(kStallWindow) +
                         " consecutive iterations; F may not be monotone");

    Allocation half;
    Vector fh;
    while (true) {
      half = set.project(x - step * fx);
      fh = game.pseudo_gradient(half);
      if (step * (fh - fx).norm() <= kContraction * (half - x).norm()) break;
      step *= config.backtracking;
      if (step < 1e-20) {
        best.iterations = iter;
        best.warnings = warnings;
        throw ConvergenceError("solve_ve: step size underflow", best);
      }
    }
    x = set.project(x - step * fh);
    step = std::min(step / config.backtracking, max_step);
  }
  best.warnings = warnings;
  throw ConvergenceError("solve_ve: iteration limit reached (best residual " +
                             std::to_string(best.residual) + ")",
                         best);
}

EquilibriumCertificate certify(const Game& game, const Allocation& x, EquilibriumKind kind,
                               double kkt_tolerance) {
  const auto& set = game.feasible_set();
  set.require_feasible(x, "certify: point");
  const double capacity = set.capacity();
  switch (kind) {
    case EquilibriumKind::SOCIAL:
      return certify_social(game.social_problem(), x);
    case EquilibriumKind::VE:
      return make_shared(x, own_partials(game, x), capacity, EquilibriumKind::VE, 0);
    case EquilibriumKind::GNE: break;
  }

  // Per-player system 0 <= x_i _|_ -g_i + lambda_i >= 0, 0 <= lambda_i _|_ C - 1^T x >= 0.
  const Vector g = own_partials(game, x);
  const double slack = capacity - x.sum();
  Vector lambdas = Vector::Zero(game.n());
  if (slack <= kkt_tolerance) lambdas = g.cwiseMax(0.0);
  double r = feasibility_violation(x, capacity);
  for (int i = 0; i < game.n(); ++i) {
    r = std::max(r, std::abs(std::min(x[i], lambdas[i] - g[i])));
    r = std::max(r, std::abs(std::min(lambdas[i], slack)));
  }
  EquilibriumCertificate cert;
  cert.x = x;
  cert.multipliers = std::move(lambdas);
  cert.kind = EquilibriumKind::GNE;
  cert.residual = r;
  return cert;
}

EquilibriumCertificate certify_social(const SocialProblem& problem, const Allocation& x) {
  problem.set.require_feasible(x, "certify: point");
  return make_shared(x, problem.objective.gradient(x), problem.set.capacity(),
                     EquilibriumKind::SOCIAL, 0);
}

LinearAnalysis analyze_linear(const Game& game) {
  const int n = game.n();
  LinearAnalysis out;
  out.capacity = game.capacity();
  out.own_coefficients.resize(n);
  out.theta_gradient = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    const auto& u = game.utility(i);
    if (u.kind() != UtilityFunction::Kind::Linear)
      throw DomainError("analyze_linear: utility " + std::to_string(i) + " is " +
                        to_string(u.kind()) + ", not linear");
    const Vector& d = *u.coefficients();
    out.own_coefficients[i] = d[i];
    if (!(d[i] > 0.0))
      throw DomainError("analyze_linear: own coefficient of player " + std::to_string(i) +
                        " is not positive");
    out.theta_gradient += d;
  }
  const Vector& d = out.theta_gradient;
  if (d.minCoeff() < -kFeasibilityTolerance)
    throw DomainError("analyze_linear: gradient of the aggregate has a negative component");
  const double top = d.maxCoeff();
  if (!(top > 0.0)) throw DomainError("analyze_linear: gradient of the aggregate is zero");

  const double c_max = out.own_coefficients.maxCoeff();
  out.ve_multiplier = c_max;
  out.worst_ve_efficiency = std::numeric_limits<double>::infinity();
  out.best_ve_efficiency = 0.0;
  for (int i = 0; i < n; ++i) {
    if (out.own_coefficients[i] < c_max * (1.0 - 1e-12)) continue;
    out.ve_support.push_back(i);
    out.worst_ve_efficiency = std::min(out.worst_ve_efficiency, d[i] / top);
    out.best_ve_efficiency = std::max(out.best_ve_efficiency, d[i] / top);
  }
  Eigen::Index worst = 0;
  out.worst_gne_efficiency = d.minCoeff(&worst) / top;
  out.worst_gne_player = static_cast<int>(worst);
  out.best_gne_efficiency = 1.0;
  out.social_value = out.capacity * top;
  return out;
}

GridOptimum brute_force_social(const SocialProblem& problem, int resolution) {
  const auto points = problem.set.grid(resolution);
  GridOptimum best{points.front(), problem.objective.value(points.front())};
  for (const auto& z : points) {
    const double v = problem.objective.value(z);
    if (v > best.value) best = {z, v};
  }
  return best;
}

GridOptimum brute_force_social(const Game& game, int resolution) {
  return brute_force_social(game.social_problem(), resolution);
}

double brute_force_ve_check(const Game& game, const Allocation& x, int resolution) {
  const auto& set = game.feasible_set();
  set.require_feasible(x);
  const auto points = set.grid(resolution);
  const Vector f = game.pseudo_gradient(x);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& y : points) worst = std::min(worst, f.dot(y - x));
  return worst;
}

}  // namespace sharedeq
