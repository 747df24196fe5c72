#include "sharedeq/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <utility>

namespace sharedeq {
namespace {

std::string fmt_num(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

std::string vec_label(const Vector& v) {
  std::ostringstream out;
  out.precision(6);
  out << '(';
  for (Eigen::Index k = 0; k < v.size(); ++k) out << (k ? "," : "") << v[k];
  out << ')';
  return out.str();
}

void check_player(int player, int n) {
  if (player < 0 || player >= n)
    throw DomainError("utility player index " + std::to_string(player) + " out of range [0," +
                      std::to_string(n) + ")");
}

}  // namespace

ScalarFunction ScalarFunction::quadratic(double a, double b) {
  return {[a, b](double t) { return a * t - b * t * t; },
          [a, b](double t) { return a - 2.0 * b * t; },
          fmt_num(a) + "*t - " + fmt_num(b) + "*t^2"};
}

ScalarFunction ScalarFunction::logarithmic(double a, double b) {
  if (b <= -1.0) throw DomainError("logarithmic: need b > -1 so that 1 + b t > 0 on [0, 1]");
  return {[a, b](double t) { return a * std::log1p(b * t); },
          [a, b](double t) { return a * b / (1.0 + b * t); },
          fmt_num(a) + "*log(1 + " + fmt_num(b) + "*t)"};
}

ScalarFunction ScalarFunction::affine(double a, double b) {
  return {[a, b](double t) { return a + b * t; }, [b](double) { return b; },
          fmt_num(a) + " + " + fmt_num(b) + "*t"};
}

UtilityFunction::UtilityFunction(Kind kind, int player, int dimension, DifferentiableFunction f,
                                 std::string label, std::optional<Vector> coefficients)
    : kind_(kind),
      player_(player),
      dimension_(dimension),
      f_(std::move(f)),
      label_(std::move(label)),
      coefficients_(std::move(coefficients)) {
  check_player(player_, dimension_);
  if (!f_.value || !f_.gradient) throw DomainError("utility needs an evaluator and a gradient");
}

UtilityFunction UtilityFunction::linear(int player, Vector d) {
  if (!d.allFinite()) throw DomainError("linear utility: non-finite coefficient");
  const int n = static_cast<int>(d.size());
  DifferentiableFunction f{[d](const Vector& x) { return d.dot(x); },
                           [d](const Vector&) { return Vector(d); }};
  std::string label = "linear d=" + vec_label(d);
  return {Kind::Linear, player, n, std::move(f), std::move(label), std::move(d)};
}

UtilityFunction UtilityFunction::perfectly_competitive(int player, int n, ScalarFunction u) {
  DifferentiableFunction f{[player, u](const Vector& x) { return u.value(x[player]); },
                           [player, u](const Vector& x) {
                             Vector g = Vector::Zero(x.size());
                             g[player] = u.derivative(x[player]);
                             return g;
                           }};
  return {Kind::PerfectlyCompetitive, player, n, std::move(f), "u(x_i), u=" + u.label};
}

UtilityFunction UtilityFunction::quasi_linear(int player, ScalarFunction u, Vector offdiag) {
  const int n = static_cast<int>(offdiag.size());
  check_player(player, n);
  Vector o = offdiag;
  o[player] = 0.0;
  DifferentiableFunction f{[player, u, o](const Vector& x) { return u.value(x[player]) - o.dot(x); },
                           [player, u, o](const Vector& x) {
                             Vector g = -o;
                             g[player] = u.derivative(x[player]);
                             return g;
                           }};
  return {Kind::QuasiLinear, player, n, std::move(f),
          "u(x_i) - o^T x^{-i}, u=" + u.label + ", o=" + vec_label(o)};
}

UtilityFunction UtilityFunction::exponential(int player, Vector d) {
  if (!d.allFinite() || (d.size() > 0 && d.minCoeff() < 0.0))
    throw DomainError("exponential utility: coefficients must be finite and nonnegative");
  const int n = static_cast<int>(d.size());
  DifferentiableFunction f{[d](const Vector& x) { return -std::expm1(-d.dot(x)); },
                           [d](const Vector& x) { return Vector(d * std::exp(-d.dot(x))); }};
  std::string label = "1 - exp(-d^T x), d=" + vec_label(d);
  return {Kind::Exponential, player, n, std::move(f), std::move(label), std::move(d)};
}

UtilityFunction UtilityFunction::scaled_aggregate(int player, int n, ScalarFunction g) {
  DifferentiableFunction f{[player, g](const Vector& x) { return x[player] * g.value(x.sum()); },
                           [player, g](const Vector& x) {
                             const double total = x.sum();
                             Vector grad = Vector::Constant(x.size(), x[player] * g.derivative(total));
                             grad[player] += g.value(total);
                             return grad;
                           }};
  return {Kind::ScaledAggregate, player, n, std::move(f), "x_i g(1^T x), g=" + g.label};
}

UtilityFunction UtilityFunction::custom(int player, int n, DifferentiableFunction f,
                                        std::string label) {
  return {Kind::Custom, player, n, std::move(f), std::move(label)};
}

UtilityFunction UtilityFunction::slade_derived(int player, int n, DifferentiableFunction f) {
  return {Kind::SladeDerived, player, n, std::move(f), "slade"};
}

double UtilityFunction::value(const Vector& x) const {
  const double v = f_.value(x);
  if (!std::isfinite(v))
    throw EvaluationError("utility of player " + std::to_string(player_) + " is not finite");
  return v;
}

Vector UtilityFunction::gradient(const Vector& x) const {
  Vector g = f_.gradient(x);
  if (g.size() != dimension_)
    throw EvaluationError("gradient oracle of player " + std::to_string(player_) +
                          " returned " + std::to_string(g.size()) + " components");
  if (!g.allFinite())
    throw EvaluationError("gradient oracle of player " + std::to_string(player_) +
                          " returned a non-finite value");
  return g;
}

UtilityFunction UtilityFunction::scaled(double k) const {
  auto base = f_;
  DifferentiableFunction f{[base, k](const Vector& x) { return k * base.value(x); },
                           [base, k](const Vector& x) { return Vector(k * base.gradient(x)); }};
  return {Kind::Custom, player_, dimension_, std::move(f), fmt_num(k) + " * [" + label_ + "]"};
}

UtilityFunction UtilityFunction::with_unit_charge(double price) const {
  auto base = f_;
  const int i = player_;
  DifferentiableFunction f{[base, price, i](const Vector& x) { return base.value(x) - price * x[i]; },
                           [base, price, i](const Vector& x) {
                             Vector g = base.gradient(x);
                             g[i] -= price;
                             return g;
                           }};
  return {Kind::Custom, player_, dimension_, std::move(f),
          "[" + label_ + "] - " + fmt_num(price) + "*x_i"};
}

UtilityFunction UtilityFunction::minus(const DifferentiableFunction& cost) const {
  auto base = f_;
  DifferentiableFunction f{[base, cost](const Vector& x) { return base.value(x) - cost.value(x); },
                           [base, cost](const Vector& x) {
                             return Vector(base.gradient(x) - cost.gradient(x));
                           }};
  return {Kind::Custom, player_, dimension_, std::move(f), "[" + label_ + "] - cost"};
}

const char* to_string(UtilityFunction::Kind kind) {
  switch (kind) {
    case UtilityFunction::Kind::Linear: return "linear";
    case UtilityFunction::Kind::PerfectlyCompetitive: return "perfectly_competitive";
    case UtilityFunction::Kind::QuasiLinear: return "quasi_linear";
    case UtilityFunction::Kind::Exponential: return "exponential";
    case UtilityFunction::Kind::ScaledAggregate: return "scaled_aggregate";
    case UtilityFunction::Kind::SladeDerived: return "slade_derived";
    case UtilityFunction::Kind::Custom: return "custom";
  }
  return "unknown";
}

Game::Game(double capacity, std::vector<UtilityFunction> utilities)
    : set_(utilities.empty() ? 0 : static_cast<int>(utilities.size()), capacity),
      utilities_(std::move(utilities)) {
  const int count = n();
  for (int i = 0; i < count; ++i) {
    if (utilities_[i].player() != i)
      throw DomainError("utilities[" + std::to_string(i) + "] belongs to player " +
                        std::to_string(utilities_[i].player()));
    if (utilities_[i].dimension() != count)
      throw DomainError("utilities[" + std::to_string(i) + "] has dimension " +
                        std::to_string(utilities_[i].dimension()) + ", game has " +
                        std::to_string(count) + " players");
  }
  if (theta(Allocation::Zero(count)) < -kFeasibilityTolerance)
    throw DomainError("aggregate utility at the zero allocation is negative");
}

double Game::theta(const Allocation& x) const {
  set_.require_feasible(x);
  double total = 0.0;
  for (const auto& u : utilities_) total += u.value(x);
  return total;
}

Vector Game::theta_gradient(const Allocation& x) const {
  set_.require_feasible(x);
  Vector g = Vector::Zero(n());
  for (const auto& u : utilities_) g += u.gradient(x);
  return g;
}

Vector Game::pseudo_gradient(const Allocation& x) const {
  set_.require_feasible(x);
  Vector f(n());
  for (int i = 0; i < n(); ++i) f[i] = -utilities_[i].own_partial(x);
  return f;
}

bool Game::is_linear() const {
  return std::all_of(utilities_.begin(), utilities_.end(),
                     [](const auto& u) { return u.kind() == UtilityFunction::Kind::Linear; });
}

SocialProblem Game::social_problem() const {
  auto utilities = utilities_;
  const int count = n();
  DifferentiableFunction objective{
      [utilities](const Vector& x) {
        double total = 0.0;
        for (const auto& u : utilities) total += u.value(x);
        return total;
      },
      [utilities, count](const Vector& x) {
        Vector g = Vector::Zero(count);
        for (const auto& u : utilities) g += u.gradient(x);
        return g;
      }};
  return {set_, std::move(objective)};
}

Assumption1Report check_assumption1(const Game& game, int samples, std::uint64_t seed) {
  if (samples < 1) throw DomainError("check_assumption1: samples must be >= 1");
  const auto& set = game.feasible_set();
  const int n = game.n();
  Assumption1Report report;
  report.samples = samples;

  const Allocation zero = Allocation::Zero(n);
  report.min_value_at_zero = game.utility(0).value(zero);
  for (int i = 0; i < n; ++i)
    report.min_value_at_zero = std::min(report.min_value_at_zero, game.utility(i).value(zero));

  const auto points = set.sample(static_cast<std::size_t>(samples), seed);
  const auto partners = set.sample(static_cast<std::size_t>(samples), seed ^ 0x9e3779b97f4a7c15ULL);
  report.min_own_partial = std::numeric_limits<double>::infinity();
  report.min_theta_gradient = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const auto& x = points[s];
    for (int i = 0; i < n; ++i)
      report.min_own_partial = std::min(report.min_own_partial, game.utility(i).own_partial(x));
    report.min_theta_gradient = std::min(report.min_theta_gradient, game.theta_gradient(x).minCoeff());

    const auto& y = partners[s];
    const double ta = game.theta(x);
    const double tb = game.theta(y);
    const double tm = game.theta(0.5 * (x + y));
    const double gap = 0.5 * (ta + tb) - tm;
    const double scale = 1.0 + std::abs(ta) + std::abs(tb);
    if (gap > 1e-9 * scale)
      report.max_concavity_violation = std::max(report.max_concavity_violation, gap);
  }

  if (report.min_own_partial <= 0.0)
    report.violations.push_back("own partial derivative not strictly positive (min " +
                                fmt_num(report.min_own_partial) + ")");
  if (report.min_theta_gradient < -kFeasibilityTolerance)
    report.violations.push_back("gradient of the aggregate has a negative component (min " +
                                fmt_num(report.min_theta_gradient) + ")");
  if (report.max_concavity_violation > 0.0)
    report.violations.push_back("aggregate fails the midpoint concavity test (gap " +
                                fmt_num(report.max_concavity_violation) + ")");
  if (report.min_value_at_zero < -kFeasibilityTolerance)
    report.violations.push_back("utility at the zero allocation is negative (min " +
                                fmt_num(report.min_value_at_zero) + ")");
  return report;
}

double gradient_fd_check(const Game& game, const Allocation& x, double h) {
  const auto& set = game.feasible_set();
  set.require_feasible(x);
  if (!(h > 0.0)) throw DomainError("gradient_fd_check: step must be positive");
  if (x.minCoeff() < h || x.sum() + h > set.capacity())
    throw DomainError("gradient_fd_check: point is not inside the feasible set by margin h");

  double worst = 0.0;
  const int n = game.n();
  for (const auto& u : game.utilities()) {
    const Vector analytic = u.gradient(x);
    for (int k = 0; k < n; ++k) {
      Vector up = x, down = x;
      up[k] += h;
      down[k] -= h;
      const double fd = (u.value(up) - u.value(down)) / (2.0 * h);
      const double err = std::abs(analytic[k] - fd) / std::max(1.0, std::abs(analytic[k]));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace sharedeq
