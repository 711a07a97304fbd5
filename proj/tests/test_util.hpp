#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "robinfb/core.hpp"
#include "robinfb/solver2d.hpp"

namespace testutil {

using namespace robinfb;

inline State blank_state(int nx, int ny, double h, double ox = 0.0,
                         double oy = 0.0) {
  State st;
  st.grid.nx = nx;
  st.grid.ny = ny;
  st.grid.h = h;
  st.grid.origin_x = ox;
  st.grid.origin_y = oy;
  st.u.assign(st.grid.size(), 0.0);
  st.labels.assign(st.grid.size(), Label::None);
  return st;
}

// u = sqrt(lambda) ((x,y).nu - c)_+ with the positive side labeled Omega1.
inline State half_plane_state(int n, double lambda, double nux, double nuy,
                              double c, double h = 0.0) {
  if (h == 0.0) h = 1.0 / n;
  State st = blank_state(n, n, h, -0.5 * n * h, -0.5 * n * h);
  const double root = std::sqrt(lambda);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double s = st.grid.cx(i) * nux + st.grid.cy(j) * nuy - c;
      if (s > 0.0) {
        st.lab(i, j) = Label::Omega1;
        st.at(i, j) = root * s;
      }
    }
  return st;
}

// 1D profile replicated across rows: labels phase1 for x<xsplit, phase2
// beyond, None where u vanishes identically outside [xa, xb].
inline State strip_state(int nx, int ny, double h, double ox,
                         const std::function<double(double)>& profile,
                         double xsplit, double xa, double xb) {
  State st = blank_state(nx, ny, h, ox, 0.0);
  for (int i = 0; i < nx; ++i) {
    const double x = st.grid.cx(i);
    const double v = profile(x);
    Label l = Label::None;
    if (x >= xa && x <= xb) l = x < xsplit ? Label::Omega1 : Label::Omega2;
    for (int j = 0; j < ny; ++j) {
      st.lab(i, j) = l;
      st.at(i, j) = l == Label::None ? 0.0 : v;
    }
  }
  return st;
}

inline State random_label_state(int n, std::uint64_t seed) {
  State st = blank_state(n, n, 1.0 / n);
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < st.grid.size(); ++c) {
    const int k = static_cast<int>(rng() % 5);
    st.labels[c] = static_cast<Label>(k);
    st.u[c] = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
  return st;
}

}  // namespace testutil
