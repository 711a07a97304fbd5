#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "robinfb/solver1d.hpp"

using namespace robinfb;

TEST_SUITE("solver1d") {

TEST_CASE("disjoint energy is exactly 4") {
  CHECK(disjoint_energy() == 4.0);
}

TEST_CASE("wedge quadrature reproduces the one-phase energy 2") {
  // |u'|^2 + |{u>0}| for u = (-x-eps)_+ over [-1-eps, -eps]
  for (const double eps : {0.0, 0.3, 2.0}) {
    const double val = oracles::quad_midpoint(
        [&](double) { return 1.0 + 1.0; }, -1.0 - eps, -eps, 2000);
    CHECK(val == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("bridged closed form values") {
  CHECK(bridged_energy(2.0, 0.0, 0.5) == 3.0);
  CHECK(bridged_energy(7.5, 0.0, 0.0) == 4.0);  // ell=0, eps=0 degenerates to 4
  CHECK(bridged_energy(1.0, 1.0, 0.5) == doctest::Approx(4.5).epsilon(1e-15));
}

TEST_CASE("optimal trace against golden-section minimization") {
  for (const double beta : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    for (const double eps : {0.0, 0.1, 0.5, 1.0, 3.0}) {
      const double ell = optimal_ell(beta, eps);
      const double ell_oracle = oracles::golden_min_quadratic(
          [&](double l) { return bridged_energy(beta, eps, l); }, 0.0, 1.0);
      CHECK(std::abs(ell - ell_oracle) <= 1e-12);
    }
  }
  CHECK(optimal_ell(2.0, 0.0) == 0.5);
  CHECK(optimal_ell(1.0, 1.0) == 0.5);
}

TEST_CASE("optimal bridged energy equals the expanded expression") {
  for (const double beta : {0.3, 1.0, 2.0, 5.0})
    for (const double eps : {0.0, 0.2, 1.5}) {
      const double a = bridged_energy_optimal(beta, eps);
      const double b = bridged_energy_optimal_expanded(beta, eps);
      CHECK(std::abs(a - b) <= 1e-12);
    }
}

TEST_CASE("stationarity at the optimal trace") {
  const double s = 1e-5;
  for (const double beta : {0.5, 1.0, 3.0})
    for (const double eps : {0.0, 0.4, 2.0}) {
      const double l = optimal_ell(beta, eps);
      const double d =
          (bridged_energy(beta, eps, l + s) - bridged_energy(beta, eps, l - s)) /
          (2.0 * s);
      CHECK(std::abs(d) <= 1e-10);
    }
}

TEST_CASE("interface gradient identities at the optimum") {
  for (const double beta : {0.5, 1.0, 2.0, 6.0})
    for (const double eps : {0.0, 0.3, 1.0}) {
      const double l = optimal_ell(beta, eps);
      const double slope = (1.0 - l) / (1.0 + eps);
      // |u1'| + |u2'| = beta * ell, and each wedge has the same slope
      CHECK(std::abs(2.0 * slope - beta * l) <= 1e-12);
    }
  // the disjoint wedges have unit slope, the one-phase condition at lambda=1
  CHECK(std::abs(1.0 - std::sqrt(1.0)) == 0.0);
}

TEST_CASE("crossover threshold for beta=1 matches the hand-derived cubic") {
  const double eps0 = interface_threshold(1.0);
  const double root =
      oracles::bisect(oracles::beta1_crossover_cubic, 0.0, 1.0, 1e-13);
  CHECK(std::abs(eps0 - root) <= 1e-10);
  CHECK(eps0 == doctest::Approx(0.7320508).epsilon(1e-6));
  // bisection on the bridged energy itself agrees with the cubic's root
  CHECK(std::abs(bridged_energy_optimal(1.0, eps0) - 4.0) <= 1e-11);
}

TEST_CASE("threshold scan is finite and positive") {
  double prev = 0.0;
  for (const double beta : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double e0 = interface_threshold(beta);
    CHECK(e0 > 0.0);
    CHECK(std::isfinite(e0));
    if (prev > 0.0) CHECK(e0 < prev);  // harder to bridge at larger beta
    prev = e0;
  }
  // the no-Robin limit: eps0 tends to 1 as beta goes to 0
  CHECK(interface_threshold(1e-4) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("numeric 1D minimizer") {
  SUBCASE("bridged regime") {
    const Solve1DResult r = solve_1d_numeric(1.0, 0.2, 4096);
    CHECK(r.winner == Winner1D::Bridged);
    CHECK(std::abs(r.ell_hat - optimal_ell(1.0, 0.2)) <= 1e-3);
    CHECK(r.ell_hat == doctest::Approx(0.625).epsilon(2e-3));
  }
  SUBCASE("disjoint regime") {
    const Solve1DResult r = solve_1d_numeric(1.0, 2.0, 4096);
    CHECK(r.winner == Winner1D::Disjoint);
    CHECK(std::abs(r.energy - 4.0) <= 1e-6);
  }
  SUBCASE("paper anchor at beta=2, eps=0") {
    const Solve1DResult r = solve_1d_numeric(2.0, 0.0, 4096);
    CHECK(r.winner == Winner1D::Bridged);
    CHECK(std::abs(r.energy - 3.0) <= 1e-3);
  }
  SUBCASE("crossover consistency") {
    const double eps0 = interface_threshold(1.0);
    CHECK(solve_1d_numeric(1.0, eps0 - 0.1, 1024).winner == Winner1D::Bridged);
    CHECK(solve_1d_numeric(1.0, eps0 + 0.05, 1024).winner ==
          Winner1D::Disjoint);
  }
  SUBCASE("rejects tiny grids") {
    CHECK_THROWS_AS(solve_1d_numeric(1.0, 0.1, 32), InputError);
  }
}

}  // TEST_SUITE
