#include "doctest.h"

#include <cmath>
#include <numbers>

#include "robinfb/diagnostics.hpp"
#include "robinfb/energy.hpp"
#include "robinfb/solver2d.hpp"
#include "test_util.hpp"

using namespace robinfb;
using testutil::blank_state;
using testutil::half_plane_state;

namespace {

// half plane with the kink exactly on cell centers of column n/2
State axis_half_plane(int n, double lambda) {
  const double h = 1.0 / n;
  State st = blank_state(n, n, h, -0.5 - 0.5 * h, -0.5);
  const double root = std::sqrt(lambda);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = st.grid.cx(i);
      if (x >= 0.0) {
        st.lab(i, j) = Label::Omega1;
        st.at(i, j) = root * x;
      }
    }
  return st;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("free-boundary residual vanishes on an exact planar wedge") {
  for (const double lambda : {1.0, 2.25}) {
    const State st = axis_half_plane(64, lambda);
    const auto res = free_boundary_residual(st, lambda);
    REQUIRE(!res.empty());
    for (const auto& r : res) CHECK(r.residual <= 1e-12);
  }
}

TEST_CASE("gradient estimator is second order") {
  // half-plane plus a quadratic bump; the one-sided stencils are exact for
  // quadratics up to the kink, so halving h quarters the residual
  auto field = [](int n) {
    State st = axis_half_plane(n, 1.0);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (st.lab(i, j) == Label::Omega1) {
          const double x = st.grid.cx(i), y = st.grid.cy(j);
          st.at(i, j) += 0.25 * x * x + 0.1 * x * y;
        }
    return st;
  };
  auto worst = [&](int n) {
    const State st = field(n);
    double w = 0.0;
    // compare against the analytic gradient of x + 0.25x^2 + 0.1xy
    for (const auto& r : free_boundary_residual(st, 1.0)) {
      const double x = st.grid.cx(r.i), y = st.grid.cy(r.j);
      const double gx = 1.0 + 0.5 * x + 0.1 * y;
      const double gy = 0.1 * x;
      w = std::max(w, std::abs(r.grad_mag - std::hypot(gx, gy)));
    }
    return w;
  };
  const double e1 = worst(64);
  const double e2 = worst(128);
  CHECK(e2 <= e1 / 3.0);  // close to the factor-4 asymptotic rate
}

TEST_CASE("robin residual on a constructed two-slope interface") {
  // u = ell + s1*(-x) for x<0 (phase 1), ell + s2*x for x>0 (phase 2),
  // so |grad u1| + |grad u2| = s1 + s2 at the interface; choose beta so the
  // residual vanishes: beta = (s1+s2)/ell
  const int n = 64;
  const double h = 1.0 / n;
  State st = blank_state(n, n, h, -0.5 - 0.5 * h, -0.5);
  const double ell = 0.5, s1 = 0.4, s2 = 0.6;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = st.grid.cx(i);
      if (x < 0.0) {
        st.lab(i, j) = Label::Omega1;
        st.at(i, j) = ell - s1 * x;
      } else {
        st.lab(i, j) = Label::Omega2;
        st.at(i, j) = ell + s2 * x;
      }
    }
  const double beta = (s1 + s2) / ell;
  const auto res = robin_residual(st, beta);
  REQUIRE(!res.empty());
  double worst = 0.0;
  for (const auto& r : res) {
    CHECK(!r.degenerate);
    worst = std::max(worst, r.residual);
  }
  // interface trace is offset from ell by half-cell sampling: O(h)
  CHECK(worst <= beta * s2 * h);
  SUBCASE("degenerate flag when the trace vanishes") {
    State z = st;
    for (auto& v : z.u) v = 0.0;
    const auto rz = robin_residual(z, beta);
    REQUIRE(!rz.empty());
    for (const auto& r : rz) CHECK(r.degenerate);
  }
  SUBCASE("empty interface gives an empty list") {
    State e = blank_state(16, 16, 0.1);
    CHECK(robin_residual(e, 1.0).empty());
  }
}

TEST_CASE("weiss energy of exact half-planes") {
  const double lambda = 1.3;
  const double theta = weiss_theta(lambda);
  for (const double deg : {0.0, 30.0, 45.0, 113.0}) {
    const double a = deg * std::numbers::pi / 180.0;
    State st = half_plane_state(256, lambda, std::cos(a), std::sin(a), 0.0);
    const double w = weiss_energy(st, 0.0, 0.0, 0.3, lambda);
    CHECK(w == doctest::Approx(theta).epsilon(0.01));
  }
  SUBCASE("zero field gives zero") {
    State st = blank_state(64, 64, 1.0 / 64);
    CHECK(weiss_energy(st, 0.5, 0.5, 0.25, 1.0) == 0.0);
  }
  SUBCASE("scale invariance over a ladder") {
    State st = half_plane_state(512, 1.0, std::cos(0.3), std::sin(0.3), 0.0);
    const double w0 = weiss_energy(st, 0.0, 0.0, 0.4, 1.0);
    for (const double r : {0.2, 0.1, 0.05}) {
      const double w = weiss_energy(st, 0.0, 0.0, r, 1.0);
      CHECK(w == doctest::Approx(w0).epsilon(0.012));
    }
  }
  SUBCASE("ball leaving the box is a range error") {
    State st = half_plane_state(64, 1.0, 1.0, 0.0, 0.0);
    CHECK_THROWS_AS(weiss_energy(st, 0.4, 0.0, 0.5, 1.0), RangeError);
  }
}

TEST_CASE("weiss decay fit") {
  SUBCASE("flat for the exact half-plane") {
    State st = half_plane_state(512, 1.0, 1.0, 0.0, 0.0);
    const std::vector<double> ladder = {0.3, 0.15, 0.075};
    const WeissFit fit = weiss_decay_fit(st, 0.0, 0.0, ladder, 1.0);
    CHECK(fit.flat);
  }
  SUBCASE("needs three radii") {
    State st = half_plane_state(128, 1.0, 1.0, 0.0, 0.0);
    const std::vector<double> two = {0.2, 0.1};
    CHECK_THROWS_AS(weiss_decay_fit(st, 0.0, 0.0, two, 1.0), InputError);
  }
  SUBCASE("synthetic r^1.5 perturbation is recovered") {
    // u = (1 + a |x|^1.5) * half-plane: W(u_r) - Theta ~ C r^1.5
    const int n = 768;
    const double a = 0.35;
    State st = half_plane_state(n, 1.0, std::cos(0.2), std::sin(0.2), 0.0);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (st.lab(i, j) == Label::Omega1) {
          const double rr =
              std::hypot(st.grid.cx(i), st.grid.cy(j));
          st.at(i, j) *= 1.0 + a * std::pow(rr, 1.5);
        }
    const std::vector<double> ladder = {0.4, 0.28, 0.2, 0.14, 0.1};
    const WeissFit fit = weiss_decay_fit(st, 0.0, 0.0, ladder, 1.0);
    CHECK(!fit.flat);
    CHECK(fit.gamma == doctest::Approx(1.5).epsilon(0.2 / 1.5));
  }
}

TEST_CASE("blow-up fit on exact half-planes") {
  const double lambda = 1.0;
  for (const double deg : {0.0, 37.0, 90.0, 200.0}) {
    const double a = deg * std::numbers::pi / 180.0;
    State st = half_plane_state(256, lambda, std::cos(a), std::sin(a), 0.0);
    const BlowupSample bs = blow_up_error(st, 0.0, 0.0, 0.25, lambda);
    const double dot = bs.nu_x * std::cos(a) + bs.nu_y * std::sin(a);
    CHECK(dot == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(bs.linf <= 2.5 * st.grid.h / 0.25);  // interpolation floor O(h/r)
  }
  SUBCASE("error shrinks as r grows over the ladder") {
    State st = half_plane_state(256, 1.0, std::cos(0.5), std::sin(0.5), 0.0);
    const double e32 = blow_up_error(st, 0.0, 0.0, 32.0 / 256, 1.0).linf;
    const double e16 = blow_up_error(st, 0.0, 0.0, 16.0 / 256, 1.0).linf;
    const double e8 = blow_up_error(st, 0.0, 0.0, 8.0 / 256, 1.0).linf;
    CHECK(e32 <= e16);
    CHECK(e16 <= e8);
  }
}

TEST_CASE("density and growth on the exact half-plane") {
  const double lambda = 1.69;
  const int n = 256;
  const State st = axis_half_plane(n, lambda);
  const std::vector<double> ladder = {4, 8, 16, 32};
  const auto samples = density_and_growth(st, lambda, ladder, 16);
  REQUIRE(!samples.empty());
  for (const auto& s : samples) {
    const double hr = st.grid.h / s.r;
    CHECK(s.density == doctest::Approx(0.5).epsilon(3.0 * hr));
    // kink on cell centers and integer-cell radii: sup u / r is exact
    CHECK(s.sup_over_r == std::sqrt(lambda));
  }
}

TEST_CASE("holder seminorm") {
  SUBCASE("constant field gives zero") {
    State st = blank_state(64, 64, 1.0 / 64);
    for (auto& v : st.u) v = 0.42;
    CHECK(holder_seminorm(st, 0.1, 1.0 / 3.0) == 0.0);
  }
  SUBCASE("half-plane value matches a direct pair scan") {
    const State st = axis_half_plane(128, 1.0);
    const double v = holder_seminorm(st, 0.1, 1.0 / 3.0, 99, 20000);
    CHECK(v > 0.0);
    // |u(a)-u(b)| <= |xa-xb| so the ratio is bounded by dist^(2/3)
    const double cap = std::max(0.1 * 0.1 / 256.0, 3.0 * st.grid.h);
    CHECK(v <= std::pow(cap, 2.0 / 3.0) * 1.0001);
  }
  SUBCASE("refinement stability within a factor two") {
    const double v1 = holder_seminorm(axis_half_plane(128, 1.0), 0.1,
                                      1.0 / 3.0, 7, 40000);
    const double v2 = holder_seminorm(axis_half_plane(256, 1.0), 0.1,
                                      1.0 / 3.0, 7, 40000);
    CHECK(v1 <= 2.0 * v2);
    CHECK(v2 <= 2.0 * v1);
  }
}

TEST_CASE("non-collapsing check") {
  ProblemSpec sp;
  sp.box = {0.0, 0.0, 2.0, 2.0};
  sp.resolution = 64;
  sp.shapes_e1 = {Disk{1.0, 1.0, 0.2}};
  sp.one_phase_mode = true;
  const State fresh = rasterize(sp);
  SUBCASE("fresh state fails the check") {
    CHECK(non_collapsing_check(fresh, 2.0 * fresh.grid.h) == 0.0);
  }
  SUBCASE("positive after a positive collar is added") {
    State st = fresh;
    const Grid& g = st.grid;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double rr = std::hypot(g.cx(i) - 1.0, g.cy(j) - 1.0);
        if (st.lab(i, j) == Label::None && rr < 0.5) {
          st.lab(i, j) = Label::Omega1;
          st.at(i, j) = 0.3;
        }
      }
    CHECK(non_collapsing_check(st, 2.0 * g.h) > 0.0);
    SUBCASE("zero once the neighborhood outruns the collar") {
      CHECK(non_collapsing_check(st, 0.6) == 0.0);
    }
  }
}

TEST_CASE("contact angles on synthetic label fields") {
  const int n = 64;
  SUBCASE("vertical interface meeting a horizontal free boundary") {
    State st = blank_state(n, n, 1.0 / n);
    for (int j = 8; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        st.lab(i, j) = i < n / 2 ? Label::Omega1 : Label::Omega2;
        st.at(i, j) = 0.5;
      }
    const auto angles = contact_angle(st);
    REQUIRE(!angles.empty());
    for (const auto& a : angles) CHECK(a.angle_deg == doctest::Approx(90.0));
  }
  SUBCASE("45-degree interface meeting a horizontal free boundary") {
    State st = blank_state(n, n, 1.0 / n);
    for (int j = 8; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        st.lab(i, j) = i - 20 < (j - 8) ? Label::Omega1 : Label::Omega2;
        st.at(i, j) = 0.5;
      }
    const auto angles = contact_angle(st);
    REQUIRE(!angles.empty());
    bool found45 = false;
    for (const auto& a : angles)
      if (std::abs(a.angle_deg - 45.0) <= 6.0) found45 = true;
    CHECK(found45);
  }
}

TEST_CASE("interface local minimality") {
  const int n = 48;
  State st = blank_state(n, n, 1.0 / n);
  // straight interface with constant trace: any swap lengthens it
  for (int j = 8; j < 40; ++j)
    for (int i = 8; i < 40; ++i) {
      st.lab(i, j) = i < 24 ? Label::Omega1 : Label::Omega2;
      st.at(i, j) = 0.5;
    }
  SUBCASE("straight interface is locally minimal") {
    const double worst =
        interface_local_minimality_check(st, 1.0, 1e-4, 8, 100, 11);
    CHECK(worst >= -1e-9);
  }
  SUBCASE("a perturbed cell is recovered") {
    State bad = st;
    bad.lab(23, 20) = Label::Omega2;  // dent the interface
    const double worst =
        interface_local_minimality_check(bad, 1.0, 1e-4, 8, 400, 11);
    CHECK(worst < 0.0);
  }
  SUBCASE("windows away from the interface report nothing negative") {
    State far = blank_state(n, n, 1.0 / n);
    for (int j = 2; j < 6; ++j)
      for (int i = 2; i < 6; ++i) {
        far.lab(i, j) = Label::Omega1;
        far.at(i, j) = 0.4;
      }
    CHECK(interface_local_minimality_check(far, 1.0, 1e-4, 8, 50, 3) >= 0.0);
  }
}

TEST_CASE("diagnostics leave the state untouched") {
  const State st = axis_half_plane(96, 1.0);
  const std::uint64_t h0 = state_hash(st);
  DiagnosticsOptions opts;
  opts.conformal = false;  // no interface in this state
  const DiagnosticsReport rep = run_diagnostics(st, 1.0, 1.0, 1e-4, opts);
  CHECK(state_hash(st) == h0);
  CHECK(rep.fb_residual_median() <= 1e-12);
}

}  // TEST_SUITE
