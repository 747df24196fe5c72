#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace sharedeq;
using namespace sharedeq::testing;

namespace {
Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

/// Per-instance bound on how far the lattice maximum can sit below the true
/// one: the nearest lattice point is within C/r of x* per coordinate and the
/// gradient is bounded on the set.
double grid_gap_bound(const Game& game, int resolution) {
  double lipschitz = 0.0;
  for (const auto& z : game.feasible_set().sample(200, 99))
    lipschitz = std::max(lipschitz, game.theta_gradient(z).cwiseAbs().maxCoeff());
  lipschitz = std::max(lipschitz, game.theta_gradient(Allocation::Zero(game.n())).cwiseAbs().maxCoeff());
  return 1.5 * lipschitz * game.n() * game.capacity() / resolution;
}
}  // namespace

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.backtracking = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.step_size = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("solve_social") {
  SUBCASE("linear game goes to the best vertex") {
    const Game game = wcve_game(0.3, 4, 1.0);
    const auto cert = solve_social(game);
    CHECK(cert.certified());
    CHECK((cert.x - Vector::Unit(4, 0)).norm() < 1e-6);
    CHECK(cert.lambda() == doctest::Approx(1.3));
  }
  SUBCASE("identically zero aggregate returns the origin with lambda 0") {
    DifferentiableFunction zero{[](const Vector&) { return 0.0; },
                                [](const Vector& x) { return Vector(Vector::Zero(x.size())); }};
    const Game game(1.0, {UtilityFunction::custom(0, 2, zero), UtilityFunction::custom(1, 2, zero)});
    const auto cert = solve_social(game);
    CHECK(cert.x == Vector::Zero(2));
    CHECK(cert.lambda() == 0.0);
    CHECK(cert.residual == 0.0);
  }
  SUBCASE("interior optimum leaves the capacity slack") {
    std::vector<UtilityFunction> u;
    for (int i = 0; i < 2; ++i)
      u.push_back(UtilityFunction::perfectly_competitive(i, 2, ScalarFunction::quadratic(1, 1)));
    const Game game(2.0, std::move(u));
    const auto cert = solve_social(game);
    CHECK(cert.certified());
    CHECK(cert.x[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(cert.lambda() == doctest::Approx(0.0));
  }
  SUBCASE("iteration limit reports the best iterate") {
    SolverConfig cfg;
    cfg.max_iterations = 1;
    cfg.step_size = 1e-6;
    const Game game = random_game(Family::LogCompetitive, 2);
    try {
      solve_social(game, cfg);
      FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
      CHECK(e.best().x.size() == game.n());
      CHECK(game.feasible_set().contains(e.best().x));
    }
  }
}

TEST_CASE("solve_ve") {
  SUBCASE("worst-case VE game lands on the last vertex") {
    for (double eps : {0.1, 0.5, 0.9}) {
      const Game game = wcve_game(eps, 4, 1.0);
      const auto cert = solve_ve(game);
      CHECK(cert.certified());
      CHECK((cert.x - Vector::Unit(4, 3)).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(cert.lambda() == doctest::Approx(2 * eps));
    }
  }
  SUBCASE("solutions from different seeds are certified") {
    const Game game = random_game(Family::Exponential, 12, 3);
    for (std::uint64_t seed : {0u, 1u, 2u, 3u}) {
      SolverConfig cfg;
      cfg.seed = seed;
      const auto cert = solve_ve(game, cfg);
      CHECK(cert.certified());
      CHECK(certify(game, cert.x, EquilibriumKind::VE).certified());
      CHECK(certify(game, cert.x, EquilibriumKind::GNE).certified());
    }
  }
  SUBCASE("scaling every utility by k keeps the VE and scales lambda") {
    const Game game = random_game(Family::LogCompetitive, 4, 3);
    std::vector<UtilityFunction> scaled;
    for (const auto& u : game.utilities()) scaled.push_back(u.scaled(3.0));
    const Game big(game.capacity(), std::move(scaled));
    const auto a = solve_ve(game);
    const auto b = solve_ve(big);
    CHECK((a.x - b.x).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(b.lambda() == doctest::Approx(3.0 * a.lambda()).epsilon(1e-5));
  }
}

TEST_CASE("certify") {
  SUBCASE("worst-case GNE construction: C e_N is a GNE with Lambda = c") {
    const Game game = make_wcgne_game(0.25, 4, 1.0);
    const auto cert = certify(game, Vector::Unit(4, 3), EquilibriumKind::GNE);
    CHECK(cert.certified());
    CHECK(cert.multipliers == vec({1, 0.25, 0.25, 0.25}));
    // not a VE: the shared multiplier cannot match player 0
    CHECK_FALSE(certify(game, Vector::Unit(4, 3), EquilibriumKind::VE).certified());
  }
  SUBCASE("interior point of a linear game is not a GNE") {
    const Game game = wcve_game();
    const auto cert = certify(game, vec({0.1, 0.1, 0.1}), EquilibriumKind::GNE);
    CHECK_FALSE(cert.certified());
    CHECK(cert.residual == doctest::Approx(1.0));  // |min(x_i, -c_i)| with c_3 = 2 eps
  }
  SUBCASE("every point of the capacity face is a GNE of a linear game") {
    const Game game = random_game(Family::Linear, 31, 3);
    for (const auto& z : game.feasible_set().sample(30, 2)) {
      const Allocation face = z * (game.capacity() / z.sum());
      CHECK(certify(game, face, EquilibriumKind::GNE).certified());
    }
  }
  SUBCASE("infeasible point") {
    CHECK_THROWS_AS(certify(wcve_game(), vec({0.6, 0.6, 0}), EquilibriumKind::GNE), DomainError);
  }
  SUBCASE("a certified VE is a GNE") {
    for (auto family : all_families()) {
      const Game game = random_game(family, 44);
      const auto ve = solve_ve(game);
      INFO(family_name(family));
      CHECK(ve.certified());
      CHECK(certify(game, ve.x, EquilibriumKind::GNE).certified());
    }
  }
}

TEST_CASE("analyze_linear") {
  SUBCASE("worst-case VE construction") {
    const double eps = 0.4;
    const auto a = analyze_linear(wcve_game(eps, 4, 2.0));
    CHECK(a.ve_support == std::vector<int>{3});
    CHECK(a.ve_multiplier == doctest::Approx(2 * eps));
    CHECK(a.social_value == doctest::Approx(2.0 * (eps + 1)));
    CHECK(a.worst_ve_efficiency == doctest::Approx(2 * eps / (eps + 1)));
    CHECK(a.worst_gne_efficiency == doctest::Approx(eps / (eps + 1)));
    CHECK(a.worst_gne_player == 1);
  }
  SUBCASE("worst-case GNE construction") {
    const auto a = analyze_linear(make_wcgne_game(0.3, 4, 1.0));
    CHECK(a.worst_gne_efficiency == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(a.worst_ve_efficiency == 1.0);
    CHECK(a.ve_support == std::vector<int>{0});
  }
  SUBCASE("agrees with brute force") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Game game = random_game(Family::Linear, seed, 3);
      const auto a = analyze_linear(game);
      CHECK(a.social_value == doctest::Approx(brute_force_social(game, 20).value).epsilon(1e-12));
    }
  }
  SUBCASE("rejects non-linear or degenerate games") {
    CHECK_THROWS_AS(analyze_linear(random_game(Family::Exponential, 1)), DomainError);
    const Game zero_own(1.0, {UtilityFunction::linear(0, vec({0, 1})), UtilityFunction::linear(1, vec({0, 1}))});
    CHECK_THROWS_AS(analyze_linear(zero_own), DomainError);
  }
}

TEST_CASE("oracle equivalence on the lattice") {
  constexpr int kResolution = 60;
  for (auto family : all_families()) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const Game game = random_game(family, seed);
      INFO(family_name(family), " seed ", seed);
      const auto social = solve_social(game);
      const auto grid = brute_force_social(game, kResolution);
      CHECK(social.certified());
      CHECK(game.theta(social.x) >= grid.value - 1e-9);
      CHECK(game.theta(social.x) - grid.value <= grid_gap_bound(game, kResolution));
      const auto ve = solve_ve(game);
      CHECK(brute_force_ve_check(game, ve.x, kResolution) >= -1e-6);
    }
  }
}
