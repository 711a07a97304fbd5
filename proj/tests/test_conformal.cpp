#include "doctest.h"

#include <cmath>

#include "robinfb/conformal.hpp"
#include "robinfb/solver2d.hpp"
#include "test_util.hpp"

using namespace robinfb;
using testutil::blank_state;

namespace {

// u = sqrt(lambda) * y_+ with a vertical two-phase interface at x = 0:
// u is harmonic where positive, the free boundary is the horizontal axis,
// and the interface meets it orthogonally.
State orthogonal_cross(int n, double lambda) {
  const double h = 2.0 / n;
  // centers at half-integers in units of h; kink between rows
  State st = blank_state(n, n, h, -1.0, -1.0);
  const double root = std::sqrt(lambda);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double y = st.grid.cy(j);
      if (y > 0.0) {
        st.lab(i, j) = st.grid.cx(i) < 0.0 ? Label::Omega1 : Label::Omega2;
        st.at(i, j) = root * y;
      }
    }
  return st;
}

}  // namespace

TEST_SUITE("conformal") {

TEST_CASE("harmonic input is reproduced and conjugacy is exact") {
  const int n = 128;
  const State st = orthogonal_cross(n, 1.0);
  const ConformalResult cr = conformal_flatten(st, 0.0, 0.4, 0.35);
  const Grid& g = st.grid;

  SUBCASE("h equals u on the solved cells") {
    double worst = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c)
      if (cr.h_solved[c]) worst = std::max(worst, std::abs(cr.h_field[c] - st.u[c]));
    CHECK(worst <= 1e-9);
  }
  SUBCASE("plaquette loops vanish for linear fields") {
    CHECK(cr.loop_residual_max <= 1e-10);
    CHECK(cr.harmonic_defect_max <= 1e-10);
  }
  SUBCASE("w is the harmonic conjugate of a linear field") {
    // for h = y the conjugate is w = -x + const: check increments along x
    const int cj = static_cast<int>((0.4 - g.origin_y) / g.h);
    const int ci = n / 2;
    auto cidx = [&](int a, int b) {
      return static_cast<std::size_t>(b) * (g.nx + 1) + a;
    };
    REQUIRE(cr.w_valid[cidx(ci, cj)]);
    REQUIRE(cr.w_valid[cidx(ci + 3, cj)]);
    const double dw = cr.w_corners[cidx(ci + 3, cj)] - cr.w_corners[cidx(ci, cj)];
    CHECK(dw == doctest::Approx(-3.0 * g.h).epsilon(1e-9));
  }
  SUBCASE("weighted-length identity holds to O(h)") {
    CHECK(cr.identity_residual <= 3.0 * g.h);
    CHECK_FALSE(cr.conditioning_warning);
    REQUIRE(!cr.mapped_polylines.empty());
  }
}

TEST_CASE("identity on a tilted harmonic field") {
  // u = (cos a x + sin a y - c)_+ rotated half-plane, interface tilted too
  const int n = 192;
  const double h = 2.0 / n;
  State st = blank_state(n, n, h, -1.0, -1.0);
  const double a = 0.35;
  const double nx = -std::sin(a), ny = std::cos(a);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = st.grid.cx(i), y = st.grid.cy(j);
      const double s = x * nx + y * ny;
      if (s > 0.0) {
        const double t = x * ny - y * nx;
        st.lab(i, j) = t < 0.0 ? Label::Omega1 : Label::Omega2;
        st.at(i, j) = s;
      }
    }
  const ConformalResult cr = conformal_flatten(st, 0.3 * nx, 0.3 * ny, 0.3);
  CHECK(cr.identity_residual <= 4.0 * h);
}

TEST_CASE("topology guards") {
  SUBCASE("no positive cells") {
    State st = blank_state(64, 64, 1.0 / 64);
    CHECK_THROWS_AS(conformal_flatten(st, 0.5, 0.5, 0.2), TopologyError);
  }
  SUBCASE("hole in the positivity region") {
    State st = blank_state(64, 64, 1.0 / 64);
    for (int j = 10; j < 40; ++j)
      for (int i = 10; i < 40; ++i) {
        st.lab(i, j) = Label::Omega1;
        st.at(i, j) = 0.5;
      }
    // punch a hole strictly inside
    for (int j = 22; j < 26; ++j)
      for (int i = 22; i < 26; ++i) {
        st.lab(i, j) = Label::None;
        st.at(i, j) = 0.0;
      }
    const double cx = st.grid.cx(24), cy = st.grid.cy(24);
    CHECK_THROWS_AS(conformal_flatten(st, cx, cy, 0.25), TopologyError);
  }
  SUBCASE("ball without free boundary") {
    State st = blank_state(64, 64, 1.0 / 64);
    for (std::size_t c = 0; c < st.grid.size(); ++c) {
      st.labels[c] = Label::Omega1;
      st.u[c] = 0.5;
    }
    CHECK_THROWS_AS(conformal_flatten(st, 0.5, 0.5, 0.2), TopologyError);
  }
  SUBCASE("ball outside the box") {
    State st = blank_state(64, 64, 1.0 / 64);
    CHECK_THROWS_AS(conformal_flatten(st, 0.05, 0.5, 0.2), RangeError);
  }
}

}  // TEST_SUITE
