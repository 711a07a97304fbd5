#include "robinfb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "robinfb/conformal.hpp"
#include "robinfb/energy.hpp"
#include "robinfb/solver2d.hpp"

namespace robinfb {

namespace {

constexpr int kDx[4] = {1, -1, 0, 0};
constexpr int kDy[4] = {0, 0, 1, -1};

bool group_of(Label l, int phase) {
  return phase == 1 ? in_group1(l) : in_group2(l);
}

// Other-phase cell within Chebyshev distance 2: one-sided stencils drop to
// first order there (u is not C^1 across the interface).
bool near_contact(const State& st, int i, int j, int phase) {
  const Grid& g = st.grid;
  for (int dj = -2; dj <= 2; ++dj)
    for (int di = -2; di <= 2; ++di) {
      const int ni = i + di, nj = j + dj;
      if (!g.in_bounds(ni, nj)) continue;
      if (group_of(st.lab(ni, nj), 3 - phase)) return true;
    }
  return false;
}

// Derivative along one axis at a cell center, using only cells of the given
// phase group: centered when possible, otherwise one-sided into the phase
// (3-point second order, 2-point near contact points or short stencils).
double axis_deriv(const State& st, int i, int j, int axis, int phase,
                  bool contact) {
  const Grid& g = st.grid;
  const double h = g.h;
  const int di = axis == 0 ? 1 : 0;
  const int dj = axis == 0 ? 0 : 1;
  auto usable = [&](int s) {
    const int ni = i + s * di, nj = j + s * dj;
    return g.in_bounds(ni, nj) && group_of(st.lab(ni, nj), phase);
  };
  auto val = [&](int s) { return st.at(i + s * di, j + s * dj); };
  const double u0 = st.at(i, j);
  if (usable(1) && usable(-1)) return (val(1) - val(-1)) / (2.0 * h);
  if (usable(-1)) {
    if (usable(-2) && !contact)
      return (3.0 * u0 - 4.0 * val(-1) + val(-2)) / (2.0 * h);
    return (u0 - val(-1)) / h;
  }
  if (usable(1)) {
    if (usable(2) && !contact)
      return (-3.0 * u0 + 4.0 * val(1) - val(2)) / (2.0 * h);
    return (val(1) - u0) / h;
  }
  return 0.0;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double bilinear_u(const State& st, double x, double y) {
  const Grid& g = st.grid;
  double gx = (x - g.origin_x) / g.h - 0.5;
  double gy = (y - g.origin_y) / g.h - 0.5;
  int i0 = static_cast<int>(std::floor(gx));
  int j0 = static_cast<int>(std::floor(gy));
  double fx = gx - i0;
  double fy = gy - j0;
  if (i0 < 0) { i0 = 0; fx = 0.0; }
  if (j0 < 0) { j0 = 0; fy = 0.0; }
  if (i0 > g.nx - 2) { i0 = g.nx - 2; fx = 1.0; }
  if (j0 > g.ny - 2) { j0 = g.ny - 2; fy = 1.0; }
  const double v00 = st.at(i0, j0), v10 = st.at(i0 + 1, j0);
  const double v01 = st.at(i0, j0 + 1), v11 = st.at(i0 + 1, j0 + 1);
  return (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 +
         (1 - fx) * fy * v01 + fx * fy * v11;
}

void require_ball_in_box(const State& st, double x0, double y0, double r) {
  const Grid& g = st.grid;
  if (x0 - r < g.origin_x || y0 - r < g.origin_y ||
      x0 + r > g.origin_x + g.nx * g.h || y0 + r > g.origin_y + g.ny * g.h)
    throw RangeError("ball exits the box");
}

constexpr int kRefGrid = 64;
constexpr int kCircleSamples = 256;

}  // namespace

std::vector<std::array<int, 2>> free_boundary_cells(const State& st) {
  const Grid& g = st.grid;
  std::vector<std::array<int, 2>> out;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!is_labeled(st.lab(i, j))) continue;
      for (int d = 0; d < 4; ++d) {
        const int ni = i + kDx[d], nj = j + kDy[d];
        if (g.in_bounds(ni, nj) && st.lab(ni, nj) == Label::None) {
          out.push_back({i, j});
          break;
        }
      }
    }
  return out;
}

std::vector<FbResidual> free_boundary_residual(const State& st,
                                               double lambda) {
  const double root = std::sqrt(lambda);
  std::vector<FbResidual> out;
  for (const auto& [i, j] : free_boundary_cells(st)) {
    const int phase = in_group1(st.lab(i, j)) ? 1 : 2;
    if (near_contact(st, i, j, phase)) continue;  // interface-contact cell
    const double gx = axis_deriv(st, i, j, 0, phase, false);
    const double gy = axis_deriv(st, i, j, 1, phase, false);
    const double mag = std::hypot(gx, gy);
    out.push_back({i, j, mag, std::abs(mag - root)});
  }
  return out;
}

std::vector<RobinResidual> robin_residual(const State& st, double beta) {
  const Grid& g = st.grid;
  const double h = g.h;
  std::vector<RobinResidual> out;

  // normal derivative at the face, one-sided into the phase occupying the
  // cells at signed offsets s, 2s, 3s from the far side of the face
  auto normal_at_face = [&](int i, int j, int di, int dj, int phase,
                            double trace) {
    auto usable = [&](int s) {
      const int ni = i + (s - 1) * di, nj = j + (s - 1) * dj;
      return g.in_bounds(ni, nj) && group_of(st.lab(ni, nj), phase);
    };
    auto val = [&](int s) { return st.at(i + (s - 1) * di, j + (s - 1) * dj); };
    // cells at distance h/2, 3h/2, 5h/2 from the face
    if (usable(1) && usable(2) && usable(3) &&
        !near_contact(st, i, j, 3 - phase))
      return (-2.0 * val(1) + 3.0 * val(2) - val(3)) / h;
    if (usable(1) && usable(2)) return (val(2) - val(1)) / h;
    return (val(1) - trace) / (0.5 * h);
  };

  auto emit = [&](int ia, int ja, int axis) {
    const int ib = ia + (axis == 0 ? 1 : 0);
    const int jb = ja + (axis == 0 ? 0 : 1);
    const Label la = st.lab(ia, ja), lb = st.lab(ib, jb);
    const bool a1 = in_group1(la) && in_group2(lb);
    const bool a2 = in_group2(la) && in_group1(lb);
    if (!a1 && !a2) return;
    const double tr = 0.5 * (st.at(ia, ja) + st.at(ib, jb));
    const int phase_a = a1 ? 1 : 2;
    const int di = axis == 0 ? 1 : 0;
    const int dj = axis == 0 ? 0 : 1;
    // into phase of cell a: direction -axis; into phase of b: +axis
    const double na = normal_at_face(ia, ja, -di, -dj, phase_a, tr);
    const double nb = normal_at_face(ib, jb, di, dj, 3 - phase_a, tr);
    const int taxis = 1 - axis;
    const double ta = axis_deriv(st, ia, ja, taxis, phase_a,
                                 near_contact(st, ia, ja, 3 - phase_a));
    const double tb = axis_deriv(st, ib, jb, taxis, 3 - phase_a,
                                 near_contact(st, ib, jb, phase_a));
    const double g1 = std::hypot(na, ta);
    const double g2 = std::hypot(nb, tb);
    RobinResidual rr;
    rr.i = ia;
    rr.j = ja;
    rr.axis = axis;
    rr.grad1 = g1;
    rr.grad2 = g2;
    rr.trace = tr;
    rr.residual = std::abs(g1 + g2 - beta * tr);
    rr.degenerate = tr < 1e-12;
    if (rr.degenerate) rr.residual = g1 + g2;
    out.push_back(rr);
  };

  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (i + 1 < g.nx) emit(i, j, 0);
      if (j + 1 < g.ny) emit(i, j, 1);
    }
  return out;
}

double weiss_energy(const State& st, double x0, double y0, double r,
                    double lambda) {
  require_ball_in_box(st, x0, y0, r);
  constexpr int m = kRefGrid;
  const double delta = 2.0 / m;
  // positivity by nearest cell value: the interpolant bleeds a positive
  // band of width ~h past the set boundary, which biases the area term
  const Grid& g = st.grid;
  auto positive_at = [&](double xx, double yy) {
    int ci = static_cast<int>(std::floor((x0 + r * xx - g.origin_x) / g.h));
    int cj = static_cast<int>(std::floor((y0 + r * yy - g.origin_y) / g.h));
    ci = std::clamp(ci, 0, g.nx - 1);
    cj = std::clamp(cj, 0, g.ny - 1);
    return st.at(ci, cj) > kUFloor;
  };
  // node samples of the rescaled field over [-1,1]^2
  std::vector<double> un((m + 1) * (m + 1));
  for (int b = 0; b <= m; ++b) {
    const double xy = -1.0 + b * delta;
    for (int a = 0; a <= m; ++a) {
      const double xx = -1.0 + a * delta;
      un[b * (m + 1) + a] = bilinear_u(st, x0 + r * xx, y0 + r * xy) / r;
    }
  }
  auto corner_in = [&](int a, int b) {
    const double x = -1.0 + a * delta;
    const double y = -1.0 + b * delta;
    return x * x + y * y <= 1.0;
  };
  double dir = 0.0, pos = 0.0;
  for (int b = 0; b < m; ++b) {
    for (int a = 0; a < m; ++a) {
      // weight rim cells by the fraction of corners inside the ball; plain
      // center-in-ball counting carries an O(delta) area bias
      const int inc = corner_in(a, b) + corner_in(a + 1, b) +
                      corner_in(a, b + 1) + corner_in(a + 1, b + 1);
      if (inc == 0) continue;
      const double w = 0.25 * inc;
      const double v00 = un[b * (m + 1) + a];
      const double v10 = un[b * (m + 1) + a + 1];
      const double v01 = un[(b + 1) * (m + 1) + a];
      const double v11 = un[(b + 1) * (m + 1) + a + 1];
      // exact Dirichlet energy of the bilinear patch: the x-gradient is
      // linear in y and the y-gradient linear in x
      const double gx0 = (v10 - v00) / delta, gx1 = (v11 - v01) / delta;
      const double gy0 = (v01 - v00) / delta, gy1 = (v11 - v10) / delta;
      dir += w * delta * delta *
             ((gx0 * gx0 + gx0 * gx1 + gx1 * gx1) +
              (gy0 * gy0 + gy0 * gy1 + gy1 * gy1)) /
             3.0;
      const double xl = -1.0 + a * delta, yl = -1.0 + b * delta;
      const bool p00 = positive_at(xl, yl);
      const bool p10 = positive_at(xl + delta, yl);
      const bool p01 = positive_at(xl, yl + delta);
      const bool p11 = positive_at(xl + delta, yl + delta);
      if (p00 && p10 && p01 && p11) {
        pos += w * delta * delta;
      } else if (p00 || p10 || p01 || p11) {
        // positive fraction of the cell by subsampling
        int cnt = 0;
        for (int sy = 0; sy < 4; ++sy)
          for (int sx = 0; sx < 4; ++sx) {
            if (positive_at(xl + (sx + 0.5) / 4.0 * delta,
                            yl + (sy + 0.5) / 4.0 * delta))
              ++cnt;
          }
        pos += w * delta * delta * cnt / 16.0;
      }
    }
  }
  double bdry = 0.0;
  for (int k = 0; k < kCircleSamples; ++k) {
    const double th = 2.0 * std::numbers::pi * k / kCircleSamples;
    const double v =
        bilinear_u(st, x0 + r * std::cos(th), y0 + r * std::sin(th)) / r;
    bdry += v * v;
  }
  bdry *= 2.0 * std::numbers::pi / kCircleSamples;
  return dir + lambda * pos - bdry;
}

WeissFit weiss_decay_fit(const State& st, double x0, double y0,
                         std::span<const double> r_ladder, double lambda) {
  if (r_ladder.size() < 3)
    throw InputError("r_ladder", "need at least 3 ladder radii");
  const double theta = weiss_theta(lambda);
  std::vector<double> ws, rs;
  for (const double r : r_ladder) {
    ws.push_back(weiss_energy(st, x0, y0, r, lambda));
    rs.push_back(r);
  }
  WeissFit fit;
  double mmax = 0.0;
  for (const double w : ws) mmax = std::max(mmax, w - theta);
  fit.flat = mmax <= 0.02 * theta;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(ws.size());
  for (int k = 0; k < n; ++k) {
    const double lx = std::log(rs[k]);
    const double ly = std::log(std::max(ws[k] - theta, 1e-12));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  fit.gamma = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  const double intercept = (sy - fit.gamma * sx) / n;
  fit.c0 = std::exp(intercept);
  fit.max_violation = -1e300;
  for (int k = 0; k < n; ++k)
    fit.max_violation = std::max(
        fit.max_violation, ws[k] - theta - fit.c0 * std::pow(rs[k], fit.gamma));
  return fit;
}

BlowupSample blow_up_error(const State& st, double x0, double y0, double r,
                           double lambda) {
  require_ball_in_box(st, x0, y0, r);
  const double root = std::sqrt(lambda);
  constexpr int m = kRefGrid;
  const double delta = 2.0 / m;
  std::vector<std::array<double, 3>> samples;  // x, y, u_r
  samples.reserve(m * m);
  for (int b = 0; b < m; ++b) {
    for (int a = 0; a < m; ++a) {
      const double cx = -1.0 + (a + 0.5) * delta;
      const double cy = -1.0 + (b + 0.5) * delta;
      if (cx * cx + cy * cy > 1.0) continue;
      samples.push_back(
          {cx, cy, bilinear_u(st, x0 + r * cx, y0 + r * cy) / r});
    }
  }
  auto sse = [&](double th) {
    const double nx = std::cos(th), ny = std::sin(th);
    double s = 0.0;
    for (const auto& p : samples) {
      const double hp = root * std::max(0.0, p[0] * nx + p[1] * ny);
      const double d = p[2] - hp;
      s += d * d;
    }
    return s;
  };
  int best = 0;
  double best_val = sse(0.0);
  constexpr int nscan = 720;
  for (int k = 1; k < nscan; ++k) {
    const double v = sse(2.0 * std::numbers::pi * k / nscan);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  double lo = 2.0 * std::numbers::pi * (best - 1) / nscan;
  double hi = 2.0 * std::numbers::pi * (best + 1) / nscan;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = sse(x1), f2 = sse(x2);
  while (hi - lo > 1e-7) {
    if (f1 <= f2) {
      hi = x2; x2 = x1; f2 = f1; x1 = hi - gr * (hi - lo); f1 = sse(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2; x2 = lo + gr * (hi - lo); f2 = sse(x2);
    }
  }
  const double th = 0.5 * (lo + hi);
  BlowupSample bs;
  bs.x0 = x0;
  bs.y0 = y0;
  bs.r = r;
  bs.nu_x = std::cos(th);
  bs.nu_y = std::sin(th);
  double linf = 0.0;
  for (const auto& p : samples) {
    const double hp = root * std::max(0.0, p[0] * bs.nu_x + p[1] * bs.nu_y);
    linf = std::max(linf, std::abs(p[2] - hp));
  }
  bs.linf = linf;
  return bs;
}

namespace {

std::vector<std::array<int, 2>> subsample_fb(const State& st, int max_points) {
  std::vector<std::array<int, 2>> fb = free_boundary_cells(st);
  if (static_cast<int>(fb.size()) <= max_points) return fb;
  std::vector<std::array<int, 2>> out;
  const double stride = static_cast<double>(fb.size()) / max_points;
  for (int k = 0; k < max_points; ++k)
    out.push_back(fb[static_cast<std::size_t>(k * stride)]);
  return out;
}

}  // namespace

std::vector<DensityGrowthSample> density_and_growth(
    const State& st, double lambda, std::span<const double> r_ladder,
    int max_points) {
  (void)lambda;
  const Grid& g = st.grid;
  std::vector<DensityGrowthSample> out;
  for (const auto& [i0, j0] : subsample_fb(st, max_points)) {
    for (const double rk : r_ladder) {
      const int k = static_cast<int>(std::lround(rk));
      if (i0 - k < 0 || j0 - k < 0 || i0 + k >= g.nx || j0 + k >= g.ny)
        continue;
      long zero = 0, total = 0;
      double sup = 0.0;
      for (int dj = -k; dj <= k; ++dj)
        for (int di = -k; di <= k; ++di) {
          if (di * di + dj * dj > k * k) continue;
          ++total;
          const double v = st.at(i0 + di, j0 + dj);
          if (v <= kUFloor) ++zero;
          sup = std::max(sup, v);
        }
      DensityGrowthSample s;
      s.x0 = g.cx(i0);
      s.y0 = g.cy(j0);
      s.r = k * g.h;
      s.density = static_cast<double>(zero) / static_cast<double>(total);
      s.sup_over_r = sup / (k * g.h);
      out.push_back(s);
    }
  }
  return out;
}

double holder_seminorm(const State& st, double delta, double exponent,
                       std::uint64_t seed, int npairs) {
  if (exponent <= 0.0 || exponent > 1.0)
    throw InputError("exponent", "exponent must be in (0,1]");
  const Grid& g = st.grid;
  std::vector<bool> emask(g.size(), false);
  for (std::size_t c = 0; c < g.size(); ++c) emask[c] = is_e(st.labels[c]);
  const std::vector<double> d2 = edt_squared(g, emask);
  std::vector<std::uint32_t> cells;
  const double wx = g.nx * g.h, wy = g.ny * g.h;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (is_e(st.lab(i, j))) continue;
      const double de = std::sqrt(d2[g.idx(i, j)]) * g.h;
      const double bx = std::min(g.cx(i) - g.origin_x, g.origin_x + wx - g.cx(i));
      const double by = std::min(g.cy(j) - g.origin_y, g.origin_y + wy - g.cy(j));
      if (de > delta && std::min(bx, by) > delta)
        cells.push_back(static_cast<std::uint32_t>(g.idx(i, j)));
    }
  if (cells.empty()) return 0.0;
  // The paper-scale cap delta^2/256 degenerates below the grid size; keep
  // at least a few cells of separation available.
  const double cap = std::max(delta * delta / 256.0, 3.0 * g.h);
  const int kmax = static_cast<int>(std::ceil(cap / g.h));
  std::mt19937_64 rng(seed);
  double best = 0.0;
  long accepted = 0;
  long attempts = 0;
  const long max_attempts = 30L * npairs;
  while (accepted < npairs && attempts < max_attempts) {
    ++attempts;
    const std::uint32_t a = cells[rng() % cells.size()];
    const int ai = static_cast<int>(a % g.nx);
    const int aj = static_cast<int>(a / g.nx);
    const int di = static_cast<int>(rng() % (2 * kmax + 1)) - kmax;
    const int dj = static_cast<int>(rng() % (2 * kmax + 1)) - kmax;
    if (di == 0 && dj == 0) continue;
    const int bi = ai + di, bj = aj + dj;
    if (!g.in_bounds(bi, bj)) continue;
    const double dist = g.h * std::sqrt(double(di) * di + double(dj) * dj);
    if (dist > cap) continue;
    if (is_e(st.lab(bi, bj))) continue;
    const double de = std::sqrt(d2[g.idx(bi, bj)]) * g.h;
    const double bx =
        std::min(g.cx(bi) - g.origin_x, g.origin_x + wx - g.cx(bi));
    const double by =
        std::min(g.cy(bj) - g.origin_y, g.origin_y + wy - g.cy(bj));
    if (!(de > delta && std::min(bx, by) > delta)) continue;
    ++accepted;
    const double ratio =
        std::abs(st.at(ai, aj) - st.at(bi, bj)) / std::pow(dist, exponent);
    best = std::max(best, ratio);
  }
  return best;
}

double non_collapsing_check(const State& st, double delta) {
  const Grid& g = st.grid;
  std::vector<bool> emask(g.size(), false);
  bool any = false;
  for (std::size_t c = 0; c < g.size(); ++c) {
    emask[c] = is_e(st.labels[c]);
    any = any || emask[c];
  }
  if (!any) return 0.0;
  const std::vector<double> d2 = edt_squared(g, emask);
  double mn = -1.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (emask[c]) continue;
    if (std::sqrt(d2[c]) * g.h <= delta)
      mn = (mn < 0.0) ? st.u[c] : std::min(mn, st.u[c]);
  }
  return std::max(mn, 0.0);
}

std::vector<ContactAngleSample> contact_angle(const State& st) {
  std::vector<ContactAngleSample> out;
  const std::vector<Chain> iface = extract_interface_chains(st);
  const std::vector<Chain> fb = extract_free_boundary_chains(st);
  if (fb.empty()) return out;

  auto fit_window = [](const std::vector<std::array<double, 2>>& pts,
                       std::size_t lo, std::size_t hi) {
    std::vector<std::array<double, 2>> w(pts.begin() + lo, pts.begin() + hi);
    return principal_direction(w);
  };

  for (const Chain& c : iface) {
    if (c.closed || c.pts.size() < 4) continue;
    for (int endside = 0; endside < 2; ++endside) {
      const bool contact = endside == 0 ? c.start_contact : c.end_contact;
      if (!contact) continue;
      const std::array<double, 2> tip =
          endside == 0 ? c.pts.front() : c.pts.back();
      // tangent of the interface over its 6 vertices nearest the tip
      // (face midpoints only; the tip itself is a lattice corner)
      std::array<double, 2> di;
      const std::size_t n = c.pts.size();
      const std::size_t w = std::min<std::size_t>(6, n - 2);
      if (endside == 0)
        di = fit_window(c.pts, 1, 1 + w);
      else
        di = fit_window(c.pts, n - 1 - w, n - 1);
      // nearest free-boundary vertex and a 6-vertex window around it
      const Chain* bc = nullptr;
      std::size_t bk = 0;
      double bd = 1e300;
      for (const Chain& f : fb) {
        for (std::size_t k = 0; k < f.pts.size(); ++k) {
          const double dx = f.pts[k][0] - tip[0];
          const double dy = f.pts[k][1] - tip[1];
          const double d = dx * dx + dy * dy;
          if (d < bd) {
            bd = d;
            bc = &f;
            bk = k;
          }
        }
      }
      if (!bc || bc->pts.size() < 2) continue;
      const std::size_t m = bc->pts.size();
      std::size_t lo = bk >= 3 ? bk - 3 : 0;
      std::size_t hi = std::min(m, lo + 6);
      lo = hi >= 6 ? hi - 6 : 0;
      const std::array<double, 2> df = fit_window(bc->pts, lo, hi);
      const double dot = std::abs(di[0] * df[0] + di[1] * df[1]);
      const double ang =
          std::acos(std::clamp(dot, 0.0, 1.0)) * 180.0 / std::numbers::pi;
      out.push_back({tip[0], tip[1], ang});
    }
  }
  return out;
}

namespace {

// beta * interface + eps * perimeter contribution of all faces touching a
// set of cells, with label overrides; u held fixed.
double patch_ip_energy(const State& st, const std::vector<std::array<int, 2>>& cells,
                       const std::vector<Label>& override_labels, double beta,
                       double eps) {
  const Grid& g = st.grid;
  auto lab_of = [&](int i, int j) -> Label {
    for (std::size_t k = 0; k < cells.size(); ++k)
      if (cells[k][0] == i && cells[k][1] == j) return override_labels[k];
    return st.lab(i, j);
  };
  auto in_patch = [&](int i, int j) {
    for (const auto& c : cells)
      if (c[0] == i && c[1] == j) return true;
    return false;
  };
  double e = 0.0;
  for (const auto& [i, j] : cells) {
    const Label lc = lab_of(i, j);
    for (int d = 0; d < 4; ++d) {
      const int ni = i + kDx[d], nj = j + kDy[d];
      const bool inb = g.in_bounds(ni, nj);
      // count each patch-internal face once (from the +x/+y side owner)
      if (inb && in_patch(ni, nj) && d % 2 == 1) continue;
      const Label ln = inb ? lab_of(ni, nj) : Label::None;
      const bool g1c = in_group1(lc), g2c = in_group2(lc);
      const bool g1n = inb && in_group1(ln), g2n = inb && in_group2(ln);
      if ((g1c && g2n) || (g2c && g1n)) {
        const double tr = 0.5 * (st.at(i, j) + (inb ? st.at(ni, nj) : 0.0));
        e += beta * tr * tr * g.h;
      }
      if (g1c != g1n) e += eps * g.h;
      if (g2c != g2n) e += eps * g.h;
    }
  }
  return e;
}

}  // namespace

double interface_local_minimality_check(const State& st, double beta,
                                        double eps_final, int window,
                                        int nwindows, std::uint64_t seed) {
  const Grid& g = st.grid;
  if (window < 2 || window > std::min(g.nx, g.ny)) window = 8;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int wdx = 0; wdx < nwindows; ++wdx) {
    const int x0 = static_cast<int>(rng() % (g.nx - window + 1));
    const int y0 = static_cast<int>(rng() % (g.ny - window + 1));
    // single-cell phase swaps
    for (int j = y0; j < y0 + window; ++j)
      for (int i = x0; i < x0 + window; ++i) {
        const Label cur = st.lab(i, j);
        if (!is_omega(cur)) continue;
        const Label to = cur == Label::Omega1 ? Label::Omega2 : Label::Omega1;
        const std::vector<std::array<int, 2>> one = {{i, j}};
        const double before = patch_ip_energy(st, one, {cur}, beta, eps_final);
        const double after = patch_ip_energy(st, one, {to}, beta, eps_final);
        worst = std::min(worst, after - before);
      }
    // 2x2 block relabelings
    for (int j = y0; j + 1 < y0 + window; ++j)
      for (int i = x0; i + 1 < x0 + window; ++i) {
        const std::vector<std::array<int, 2>> blk = {
            {i, j}, {i + 1, j}, {i, j + 1}, {i + 1, j + 1}};
        std::vector<Label> cur(4);
        bool ok = true;
        for (int k = 0; k < 4; ++k) {
          cur[k] = st.lab(blk[k][0], blk[k][1]);
          if (!is_omega(cur[k])) ok = false;
        }
        if (!ok) continue;
        const double before = patch_ip_energy(st, blk, cur, beta, eps_final);
        for (const Label to : {Label::Omega1, Label::Omega2}) {
          const std::vector<Label> uni(4, to);
          if (uni == cur) continue;
          const double after = patch_ip_energy(st, blk, uni, beta, eps_final);
          worst = std::min(worst, after - before);
        }
      }
  }
  return worst;
}

double DiagnosticsReport::fb_residual_median() const {
  std::vector<double> v;
  for (const auto& r : fb_residuals) v.push_back(r.residual);
  return median_of(std::move(v));
}

double DiagnosticsReport::robin_residual_median() const {
  std::vector<double> v;
  for (const auto& r : robin_residuals)
    if (!r.degenerate) v.push_back(r.residual);
  return median_of(std::move(v));
}

DiagnosticsReport run_diagnostics(const State& st, double beta, double lambda,
                                  double eps_final,
                                  const DiagnosticsOptions& opts) {
  DiagnosticsReport rep;
  const Grid& g = st.grid;
  const double h = g.h;
  if (opts.fb) rep.fb_residuals = free_boundary_residual(st, lambda);
  if (opts.robin) rep.robin_residuals = robin_residual(st, beta);

  std::vector<double> ladder;
  for (const double rk : opts.r_ladder_h) ladder.push_back(rk * h);

  if (opts.weiss || opts.blowup) {
    for (const auto& [i0, j0] : subsample_fb(st, opts.max_points)) {
      const double x0 = g.cx(i0), y0 = g.cy(j0);
      for (const double r : ladder) {
        bool inside = x0 - r >= g.origin_x && y0 - r >= g.origin_y &&
                      x0 + r <= g.origin_x + g.nx * h &&
                      y0 + r <= g.origin_y + g.ny * h;
        if (!inside) continue;
        if (opts.weiss)
          rep.weiss.push_back({x0, y0, r, weiss_energy(st, x0, y0, r, lambda)});
        if (opts.blowup)
          rep.blowup_errors.push_back(blow_up_error(st, x0, y0, r, lambda));
      }
    }
  }
  if (opts.weiss && rep.weiss.size() >= 3) {
    // pooled decay fit over all sampled points
    const double theta = weiss_theta(lambda);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double mmax = 0.0;
    const int n = static_cast<int>(rep.weiss.size());
    for (const auto& wsm : rep.weiss) {
      const double lx = std::log(wsm.r);
      const double ly = std::log(std::max(wsm.w - theta, 1e-12));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      mmax = std::max(mmax, wsm.w - theta);
    }
    const double den = n * sxx - sx * sx;
    rep.weiss_fit.gamma = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
    rep.weiss_fit.c0 = std::exp((sy - rep.weiss_fit.gamma * sx) / n);
    rep.weiss_fit.flat = mmax <= 0.02 * theta;
    rep.weiss_fit.max_violation = -1e300;
    for (const auto& wsm : rep.weiss)
      rep.weiss_fit.max_violation =
          std::max(rep.weiss_fit.max_violation,
                   wsm.w - theta - rep.weiss_fit.c0 *
                                       std::pow(wsm.r, rep.weiss_fit.gamma));
  }
  if (opts.density_growth) {
    const std::vector<double> dens_ladder = {4, 8, 16, 32};
    rep.density_growth =
        density_and_growth(st, lambda, dens_ladder, opts.max_points);
  }
  if (opts.holder) {
    const double delta = opts.delta > 0.0 ? opts.delta : 16.0 * h;
    rep.holder_seminorm_value =
        holder_seminorm(st, delta, opts.holder_exponent, opts.seed);
  }
  if (opts.non_collapsing) {
    const double delta = opts.delta > 0.0 ? opts.delta : 2.0 * h;
    rep.noncollapse_min = non_collapsing_check(st, delta);
  }
  if (opts.contact) rep.contact_angles = contact_angle(st);
  if (opts.minimality)
    rep.minimality_worst = interface_local_minimality_check(
        st, beta, eps_final, opts.minimality_window, opts.minimality_windows,
        opts.seed);
  if (opts.conformal) {
    double cx = opts.ball_cx, cy = opts.ball_cy, br = opts.ball_r;
    if (br <= 0.0) {
      br = 16.0 * h;
      if (!rep.contact_angles.empty()) {
        cx = rep.contact_angles.front().x;
        cy = rep.contact_angles.front().y;
      } else {
        const auto fbc = free_boundary_cells(st);
        if (!fbc.empty()) {
          cx = g.cx(fbc[fbc.size() / 2][0]);
          cy = g.cy(fbc[fbc.size() / 2][1]);
        } else {
          cx = g.origin_x + 0.5 * g.nx * h;
          cy = g.origin_y + 0.5 * g.ny * h;
        }
      }
    }
    try {
      const ConformalResult cr = conformal_flatten(st, cx, cy, br);
      rep.flatten.ran = true;
      rep.flatten.loop_residual_max = cr.loop_residual_max;
      rep.flatten.harmonic_defect_max = cr.harmonic_defect_max;
      rep.flatten.identity_residual = cr.identity_residual;
      rep.flatten.conditioning_warning = cr.conditioning_warning;
    } catch (const TopologyError&) {
      rep.flatten.ran = false;
    } catch (const RangeError&) {
      rep.flatten.ran = false;
    }
  }
  return rep;
}

std::string DiagnosticsReport::to_json() const {
  nlohmann::json j;
  j["fb_residuals"] = nlohmann::json::array();
  for (const auto& r : fb_residuals)
    j["fb_residuals"].push_back(
        {{"i", r.i}, {"j", r.j}, {"grad", r.grad_mag}, {"residual", r.residual}});
  j["fb_residual_median"] = fb_residual_median();
  j["robin_residuals"] = nlohmann::json::array();
  for (const auto& r : robin_residuals)
    j["robin_residuals"].push_back({{"i", r.i},
                                    {"j", r.j},
                                    {"axis", r.axis},
                                    {"grad1", r.grad1},
                                    {"grad2", r.grad2},
                                    {"trace", r.trace},
                                    {"residual", r.residual},
                                    {"degenerate", r.degenerate}});
  j["robin_residual_median"] = robin_residual_median();
  j["weiss"] = nlohmann::json::array();
  for (const auto& w : weiss)
    j["weiss"].push_back(
        {{"x0", w.x0}, {"y0", w.y0}, {"r", w.r}, {"W", w.w}});
  j["weiss_fit"] = {{"C0", weiss_fit.c0},
                    {"gamma", weiss_fit.gamma},
                    {"max_violation", weiss_fit.max_violation},
                    {"flat", weiss_fit.flat}};
  j["blowup_errors"] = nlohmann::json::array();
  for (const auto& b : blowup_errors)
    j["blowup_errors"].push_back({{"x0", b.x0},
                                  {"y0", b.y0},
                                  {"r", b.r},
                                  {"nu", {b.nu_x, b.nu_y}},
                                  {"linf", b.linf}});
  j["density_growth"] = nlohmann::json::array();
  for (const auto& d : density_growth)
    j["density_growth"].push_back({{"x0", d.x0},
                                   {"y0", d.y0},
                                   {"r", d.r},
                                   {"density", d.density},
                                   {"sup_over_r", d.sup_over_r}});
  j["holder_seminorm"] = holder_seminorm_value;
  j["noncollapse_min"] = noncollapse_min;
  j["contact_angles"] = nlohmann::json::array();
  for (const auto& c : contact_angles)
    j["contact_angles"].push_back(
        {{"x", c.x}, {"y", c.y}, {"angle_deg", c.angle_deg}});
  j["minimality_worst"] = minimality_worst;
  j["flatten"] = {{"ran", flatten.ran},
                  {"loop_residual_max", flatten.loop_residual_max},
                  {"harmonic_defect_max", flatten.harmonic_defect_max},
                  {"identity_residual", flatten.identity_residual},
                  {"conditioning_warning", flatten.conditioning_warning}};
  return j.dump(2);
}

}  // namespace robinfb
