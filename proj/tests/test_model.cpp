#include "catch_amalgamated.hpp"

#include "fixtures.hpp"

using namespace eitnoise;
using Catch::Approx;

TEST_CASE("symmetric scenario with C=167 validates and admits closed forms") {
  const auto p = fixtures::fig2();
  REQUIRE(p.cooperativity());
  CHECK(*p.cooperativity() == Approx(167.0).epsilon(1e-12));
  const auto r = validate_params(p);
  CHECK(r.valid());
  CHECK(r.closed_forms_applicable);
}

TEST_CASE("negative cavity rate is rejected") {
  auto p = fixtures::fig2();
  p.kappa_1 = -0.1;
  const auto r = validate_params(p);
  CHECK_FALSE(r.valid());
  CHECK_THROWS_AS(require_valid(p), InvalidParameters);
}

TEST_CASE("unequal radiative rates are valid but not closed-form") {
  auto p = fixtures::fig2();
  p.gamma_rad_2 = 2.0;
  const auto r = validate_params(p);
  CHECK(r.valid());
  CHECK_FALSE(r.closed_forms_applicable);
  CHECK_FALSE(p.cooperativity());
}

TEST_CASE("other parameter invariants") {
  auto p = fixtures::fig2();
  SECTION("atom number below one") {
    p.n_atoms = 0.5;
    CHECK_FALSE(validate_params(p).valid());
  }
  SECTION("negative squeeze radius") {
    p.squeeze_2.r = -1.0;
    CHECK_FALSE(validate_params(p).valid());
  }
  SECTION("negative cross decay") {
    p.gamma_cross = -0.1;
    CHECK_FALSE(validate_params(p).valid());
  }
  SECTION("nonzero cross decay disables closed forms only") {
    p.gamma_cross = 0.5;
    CHECK(validate_params(p).valid());
    CHECK_FALSE(validate_params(p).closed_forms_applicable);
  }
  SECTION("squeezed pump disables closed forms") {
    p.squeeze_1.r = 0.5;
    CHECK_FALSE(validate_params(p).closed_forms_applicable);
  }
}

TEST_CASE("squeeze phase is normalized into [0, 2 pi)") {
  CHECK(SqueezeSpec::make(1.0, -kPi / 2).theta == Approx(3 * kPi / 2));
  CHECK(SqueezeSpec::make(1.0, 2 * kPi).theta == Approx(0.0));
  CHECK(SqueezeSpec::make(1.0, 5 * kPi).theta == Approx(kPi));
}

TEST_CASE("conjugation pairing") {
  CHECK(conjugate(Var::Alpha2Conj) == Var::Alpha2);
  CHECK(conjugate(Var::Sigma02) == Var::Sigma20);
  CHECK(conjugate(Var::Sigma12) == Var::Sigma21);
  CHECK(conjugate(Var::W1) == Var::W1);
  CHECK(conjugate(Var::W2) == Var::W2);
  for (Var v : kOrdering) CHECK(conjugate(conjugate(v)) == v);
  const Matrix12 P = conjugation_permutation();
  CHECK((P * P - Matrix12::Identity()).norm() == 0.0);
}

TEST_CASE("equal Rabi frequencies, one atom: dark state values") {
  SystemParams p;
  p.n_atoms = 1;
  p.alpha_1 = p.alpha_2 = 5.0;
  const auto s = solve_steady_state(p);
  CHECK(s.population_0() == Approx(0.0).margin(1e-15));
  CHECK(s.population_1() == Approx(0.5));
  CHECK(s.population_2() == Approx(0.5));
  CHECK(s.sigma12().real() == Approx(-0.5));
  CHECK(s.sigma12().imag() == Approx(0.0).margin(1e-15));
  CHECK(std::abs(s.sigma10()) == 0.0);
  CHECK(std::abs(s.sigma20()) == 0.0);
  CHECK(steady_state_residual(p, s) <= 1e-12);
}

TEST_CASE("vanishing probe Rabi frequency: all atoms in level 2") {
  SystemParams p;
  p.n_atoms = 1;
  p.alpha_1 = 5.0;
  p.alpha_2 = 0.0;
  const auto s = solve_steady_state(p);
  CHECK(s.population_2() == Approx(1.0));
  CHECK(s.population_1() == Approx(0.0).margin(1e-15));
  CHECK(s.population_0() == Approx(0.0).margin(1e-15));
  CHECK(std::abs(s.sigma12()) == 0.0);
  CHECK(steady_state_residual(p, s) <= 1e-12);
}

TEST_CASE("both Rabi frequencies zero is degenerate") {
  SystemParams p;
  p.n_atoms = 10;
  CHECK_THROWS_AS(solve_steady_state(p), DegenerateSteadyState);
}

TEST_CASE("residual is positive away from the stationary point") {
  SystemParams p;
  p.n_atoms = 1;
  p.alpha_1 = p.alpha_2 = 5.0;
  const auto perturbed = make_state(p, 0.0, 0.6, 0.5, 0.0, 0.0, -0.5);
  CHECK(steady_state_residual(p, perturbed) > 1e-3);
  const auto excited = make_state(p, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
  CHECK(steady_state_residual(p, excited) > 1e-3);
}

TEST_CASE("symmetric dark state matches the populations formula for any N and Rabi pair") {
  for (double n : {1.0, 100.0, 2505.0, 1e6}) {
    for (auto [o1, o2] : {std::pair{1.0, 1.0}, std::pair{1.0, 2.0}, std::pair{3.0, 0.5}}) {
      const auto p = symmetric_scenario(167, 0.15, o1, o2, 3.0, n);
      const auto s = solve_steady_state(p);
      const double sum = o1 * o1 + o2 * o2;
      CHECK(s.population_0() == Approx(0.0).margin(1e-12 * n));
      CHECK(s.population_1() == Approx(n * o2 * o2 / sum));
      CHECK(s.population_2() == Approx(n * o1 * o1 / sum));
      CHECK(s.sigma12().real() == Approx(-n * o1 * o2 / sum));
      CHECK(s.population_0() + s.population_1() + s.population_2() == Approx(n).epsilon(1e-12));
      CHECK(steady_state_residual(p, s) < 1e-15 * std::max(n, 1e5));  // roundoff on populations of size N
      // intracavity means stay at the configured values
      CHECK(s.alpha_1() == p.alpha_1);
      CHECK(s.alpha_2() == p.alpha_2);
    }
  }
}

TEST_CASE("Newton iteration recovers the dark state from a perturbed guess") {
  const auto p = fixtures::fig2();
  const auto dark = dark_state(p);
  Vector12 guess = dark.values();
  guess(idx(Var::Sigma10)) += Complex(0.3, -0.2);
  guess(idx(Var::Sigma01)) = std::conj(guess(idx(Var::Sigma10)));
  guess(idx(Var::W1)) += 5.0;
  guess(idx(Var::Alpha1)) += 0.01;
  guess(idx(Var::Alpha1Conj)) += 0.01;
  SteadyStateOptions opts;
  opts.initial_guess = guess;
  const auto s = solve_steady_state(p, opts);
  CHECK(s.iterations > 0);
  CHECK(steady_state_residual(p, s) <= 1e-12 * p.n_atoms);
  CHECK(s.conjugate_mismatch() < 1e-12);
  CHECK(s.population_0() + s.population_1() + s.population_2() == Approx(p.n_atoms).epsilon(1e-12));
}

TEST_CASE("asymmetric scenario goes through Newton and stays dark") {
  auto p = fixtures::fig2();
  p.gamma_rad_2 = 2.0;
  p.g_2 = 0.12;
  const auto s = solve_steady_state(p);
  CHECK(steady_state_residual(p, s) < 1e-10);
  CHECK(s.population_0() == Approx(0.0).margin(1e-9));
  const auto dark = dark_state(p);
  CHECK((s.values() - dark.values()).norm() < 1e-9 * p.n_atoms);
}

TEST_CASE("Newton reports non-convergence when the iteration budget is exhausted") {
  auto p = fixtures::fig2();
  p.gamma_rad_2 = 2.0;
  Vector12 guess = dark_state(p).values();
  guess(idx(Var::W1)) += 100.0;
  SteadyStateOptions opts;
  opts.initial_guess = guess;
  opts.max_iterations = 0;
  CHECK_THROWS_AS(solve_steady_state(p, opts), NoConvergence);
}
