#include "robinfb/conformal.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <deque>

#include "robinfb/solver2d.hpp"

namespace robinfb {

namespace {

constexpr int kDx[4] = {1, -1, 0, 0};
constexpr int kDy[4] = {0, 0, 1, -1};

struct BallRegion {
  std::vector<std::uint8_t> in_ball;    // per cell
  std::vector<std::uint8_t> unknown;    // positive labeled cells in ball
};

BallRegion classify(const State& st, double cx, double cy, double r) {
  const Grid& g = st.grid;
  BallRegion br;
  br.in_ball.assign(g.size(), 0);
  br.unknown.assign(g.size(), 0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double dx = g.cx(i) - cx, dy = g.cy(j) - cy;
      if (dx * dx + dy * dy <= r * r) {
        const std::size_t c = g.idx(i, j);
        br.in_ball[c] = 1;
        if (is_omega(st.labels[c]) && st.u[c] > kUFloor) br.unknown[c] = 1;
      }
    }
  return br;
}

void check_topology(const State& st, const BallRegion& br) {
  const Grid& g = st.grid;
  // (a) the positive region is 4-connected
  std::size_t first = g.size();
  long n_unknown = 0;
  for (std::size_t c = 0; c < g.size(); ++c)
    if (br.unknown[c]) {
      if (first == g.size()) first = c;
      ++n_unknown;
    }
  if (n_unknown == 0)
    throw TopologyError("ball contains no positive cells");
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::deque<std::size_t> q{first};
  seen[first] = 1;
  long reached = 0;
  while (!q.empty()) {
    const std::size_t c = q.front();
    q.pop_front();
    ++reached;
    const int i = static_cast<int>(c % g.nx), j = static_cast<int>(c / g.nx);
    for (int d = 0; d < 4; ++d) {
      const int ni = i + kDx[d], nj = j + kDy[d];
      if (!g.in_bounds(ni, nj)) continue;
      const std::size_t nb = g.idx(ni, nj);
      if (br.unknown[nb] && !seen[nb]) {
        seen[nb] = 1;
        q.push_back(nb);
      }
    }
  }
  if (reached != n_unknown)
    throw TopologyError("positivity region in ball is disconnected");
  // (b) no holes: every non-positive ball cell must drain to the ball rim
  std::vector<std::uint8_t> drained(g.size(), 0);
  std::deque<std::size_t> q2;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (!br.in_ball[c] || br.unknown[c]) continue;
    const int i = static_cast<int>(c % g.nx), j = static_cast<int>(c / g.nx);
    for (int d = 0; d < 4; ++d) {
      const int ni = i + kDx[d], nj = j + kDy[d];
      if (!g.in_bounds(ni, nj) || !br.in_ball[g.idx(ni, nj)]) {
        drained[c] = 1;
        q2.push_back(c);
        break;
      }
    }
  }
  while (!q2.empty()) {
    const std::size_t c = q2.front();
    q2.pop_front();
    const int i = static_cast<int>(c % g.nx), j = static_cast<int>(c / g.nx);
    for (int d = 0; d < 4; ++d) {
      const int ni = i + kDx[d], nj = j + kDy[d];
      if (!g.in_bounds(ni, nj)) continue;
      const std::size_t nb = g.idx(ni, nj);
      if (br.in_ball[nb] && !br.unknown[nb] && !drained[nb]) {
        drained[nb] = 1;
        q2.push_back(nb);
      }
    }
  }
  bool fb_face = false;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (br.in_ball[c] && !br.unknown[c] && !drained[c])
      throw TopologyError("positivity region in ball is not simply connected");
    if (br.unknown[c]) {
      const int i = static_cast<int>(c % g.nx), j = static_cast<int>(c / g.nx);
      for (int d = 0; d < 4 && !fb_face; ++d) {
        const int ni = i + kDx[d], nj = j + kDy[d];
        if (g.in_bounds(ni, nj) && br.in_ball[g.idx(ni, nj)] &&
            st.u[g.idx(ni, nj)] <= kUFloor)
          fb_face = true;
      }
    }
  }
  if (!fb_face)
    throw TopologyError("free boundary does not intersect the ball");
}

double bilinear_cells(const Grid& g, const std::vector<double>& f, double x,
                      double y) {
  double gx = (x - g.origin_x) / g.h - 0.5;
  double gy = (y - g.origin_y) / g.h - 0.5;
  int i0 = static_cast<int>(std::floor(gx));
  int j0 = static_cast<int>(std::floor(gy));
  double fx = gx - i0, fy = gy - j0;
  if (i0 < 0) { i0 = 0; fx = 0.0; }
  if (j0 < 0) { j0 = 0; fy = 0.0; }
  if (i0 > g.nx - 2) { i0 = g.nx - 2; fx = 1.0; }
  if (j0 > g.ny - 2) { j0 = g.ny - 2; fy = 1.0; }
  const double v00 = f[g.idx(i0, j0)], v10 = f[g.idx(i0 + 1, j0)];
  const double v01 = f[g.idx(i0, j0 + 1)], v11 = f[g.idx(i0 + 1, j0 + 1)];
  return (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 +
         (1 - fx) * fy * v01 + fx * fy * v11;
}

std::array<double, 2> bilinear_grad(const Grid& g, const std::vector<double>& f,
                                    double x, double y) {
  double gx = (x - g.origin_x) / g.h - 0.5;
  double gy = (y - g.origin_y) / g.h - 0.5;
  int i0 = static_cast<int>(std::floor(gx));
  int j0 = static_cast<int>(std::floor(gy));
  double fx = gx - i0, fy = gy - j0;
  if (i0 < 0) { i0 = 0; fx = 0.0; }
  if (j0 < 0) { j0 = 0; fy = 0.0; }
  if (i0 > g.nx - 2) { i0 = g.nx - 2; fx = 1.0; }
  if (j0 > g.ny - 2) { j0 = g.ny - 2; fy = 1.0; }
  const double v00 = f[g.idx(i0, j0)], v10 = f[g.idx(i0 + 1, j0)];
  const double v01 = f[g.idx(i0, j0 + 1)], v11 = f[g.idx(i0 + 1, j0 + 1)];
  const double dx = ((v10 - v00) * (1 - fy) + (v11 - v01) * fy) / g.h;
  const double dy = ((v01 - v00) * (1 - fx) + (v11 - v10) * fx) / g.h;
  return {dx, dy};
}

}  // namespace

ConformalResult conformal_flatten(const State& st, double cx, double cy,
                                  double radius, double tol) {
  const Grid& g = st.grid;
  if (cx - radius < g.origin_x || cy - radius < g.origin_y ||
      cx + radius > g.origin_x + g.nx * g.h ||
      cy + radius > g.origin_y + g.ny * g.h)
    throw RangeError("ball exits the box");
  const BallRegion br = classify(st, cx, cy, radius);
  check_topology(st, br);

  ConformalResult out;
  // boundary data: u on labeled cells, 0 elsewhere
  out.h_field.resize(g.size());
  for (std::size_t c = 0; c < g.size(); ++c)
    out.h_field[c] = is_labeled(st.labels[c]) ? st.u[c] : 0.0;
  out.h_solved.assign(g.size(), 0);

  // five-point Dirichlet solve on the positive ball cells
  std::vector<int> eqidx(g.size(), -1);
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < g.size(); ++c)
    if (br.unknown[c]) {
      eqidx[c] = static_cast<int>(cells.size());
      cells.push_back(c);
    }
  const int n = static_cast<int>(cells.size());
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd x0(n);
  for (int row = 0; row < n; ++row) {
    const std::size_t c = cells[row];
    const int i = static_cast<int>(c % g.nx), j = static_cast<int>(c / g.nx);
    double diag = 0.0;
    for (int d = 0; d < 4; ++d) {
      const int ni = i + kDx[d], nj = j + kDy[d];
      if (!g.in_bounds(ni, nj)) continue;
      const std::size_t nb = g.idx(ni, nj);
      diag += 1.0;
      if (eqidx[nb] >= 0)
        trip.emplace_back(row, eqidx[nb], -1.0);
      else if (st.u[nb] > kUFloor && is_labeled(st.labels[nb]))
        b[row] += st.u[nb];  // ball boundary: h = u
      // free boundary: h = 0 contributes nothing
    }
    trip.emplace_back(row, row, diag);
    x0[row] = st.u[c];
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                           Eigen::Lower | Eigen::Upper>
      cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(10 * static_cast<long>(n) + 1000);
  cg.compute(A);
  const Eigen::VectorXd x = cg.solveWithGuess(b, x0);
  if (cg.info() != Eigen::Success)
    throw SolverError("conformal h-solve did not converge");
  for (int row = 0; row < n; ++row) {
    out.h_field[cells[row]] = x[row];
    out.h_solved[cells[row]] = 1;
  }

  // conjugate on lattice corners: across an upward corner edge the increment
  // is h(right cell) - h(left cell); across a rightward edge it is
  // -(h(above) - h(below)). Path-independent wherever h is harmonic.
  const int cnx = g.nx + 1, cny = g.ny + 1;
  auto cidx = [&](int ci, int cj) {
    return static_cast<std::size_t>(cj) * cnx + ci;
  };
  out.w_corners.assign(static_cast<std::size_t>(cnx) * cny, 0.0);
  out.w_valid.assign(out.w_corners.size(), 0);
  auto cell_has_h = [&](int i, int j) { return g.in_bounds(i, j); };
  auto edge_ok = [&](int i1, int j1, int i2, int j2) {
    // usable when both flanking cells exist and at least one was solved
    if (!cell_has_h(i1, j1) || !cell_has_h(i2, j2)) return false;
    return out.h_solved[g.idx(i1, j1)] || out.h_solved[g.idx(i2, j2)];
  };
  // root corner: nearest to the ball center among corners of solved cells
  int rci = -1, rcj = -1;
  double rbest = 1e300;
  for (int row = 0; row < n; ++row) {
    const std::size_t c = cells[row];
    const int i = static_cast<int>(c % g.nx), j = static_cast<int>(c / g.nx);
    for (int dj = 0; dj <= 1; ++dj)
      for (int di = 0; di <= 1; ++di) {
        const double px = g.origin_x + (i + di) * g.h;
        const double py = g.origin_y + (j + dj) * g.h;
        const double d = (px - cx) * (px - cx) + (py - cy) * (py - cy);
        if (d < rbest) {
          rbest = d;
          rci = i + di;
          rcj = j + dj;
        }
      }
  }
  std::deque<std::array<int, 2>> q{{rci, rcj}};
  out.w_valid[cidx(rci, rcj)] = 1;
  while (!q.empty()) {
    const auto [ci, cj] = q.front();
    q.pop_front();
    const double wv = out.w_corners[cidx(ci, cj)];
    // up: edge separates cells (ci-1, cj) and (ci, cj)
    if (cj + 1 < cny && !out.w_valid[cidx(ci, cj + 1)] &&
        edge_ok(ci - 1, cj, ci, cj)) {
      out.w_corners[cidx(ci, cj + 1)] =
          wv + out.h_field[g.idx(ci, cj)] - out.h_field[g.idx(ci - 1, cj)];
      out.w_valid[cidx(ci, cj + 1)] = 1;
      q.push_back({ci, cj + 1});
    }
    // down
    if (cj - 1 >= 0 && !out.w_valid[cidx(ci, cj - 1)] &&
        edge_ok(ci - 1, cj - 1, ci, cj - 1)) {
      out.w_corners[cidx(ci, cj - 1)] =
          wv -
          (out.h_field[g.idx(ci, cj - 1)] - out.h_field[g.idx(ci - 1, cj - 1)]);
      out.w_valid[cidx(ci, cj - 1)] = 1;
      q.push_back({ci, cj - 1});
    }
    // right: edge separates cells (ci, cj-1) below and (ci, cj) above
    if (ci + 1 < cnx && !out.w_valid[cidx(ci + 1, cj)] &&
        edge_ok(ci, cj - 1, ci, cj)) {
      out.w_corners[cidx(ci + 1, cj)] =
          wv - (out.h_field[g.idx(ci, cj)] - out.h_field[g.idx(ci, cj - 1)]);
      out.w_valid[cidx(ci + 1, cj)] = 1;
      q.push_back({ci + 1, cj});
    }
    // left
    if (ci - 1 >= 0 && !out.w_valid[cidx(ci - 1, cj)] &&
        edge_ok(ci - 1, cj - 1, ci - 1, cj)) {
      out.w_corners[cidx(ci - 1, cj)] =
          wv +
          (out.h_field[g.idx(ci - 1, cj)] - out.h_field[g.idx(ci - 1, cj - 1)]);
      out.w_valid[cidx(ci - 1, cj)] = 1;
      q.push_back({ci - 1, cj});
    }
  }

  // plaquette loop residuals against the local harmonic defect
  for (int row = 0; row < n; ++row) {
    const std::size_t c = cells[row];
    const int i = static_cast<int>(c % g.nx), j = static_cast<int>(c / g.nx);
    if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1) continue;
    const double hc = out.h_field[c];
    const double hn = out.h_field[g.idx(i, j + 1)];
    const double hs = out.h_field[g.idx(i, j - 1)];
    const double he = out.h_field[g.idx(i + 1, j)];
    const double hw = out.h_field[g.idx(i - 1, j)];
    const double defect = std::abs(hn + hs + he + hw - 4.0 * hc);
    out.harmonic_defect_max = std::max(out.harmonic_defect_max, defect);
    // counterclockwise loop around the cell
    const double loop = -(hc - hs) + (he - hc) + (hn - hc) - (hc - hw);
    out.loop_residual_max = std::max(out.loop_residual_max, std::abs(loop));
  }

  // weighted-length identity along the interface chains inside the ball
  auto w_at = [&](double px, double py) -> std::pair<bool, double> {
    double gx = (px - g.origin_x) / g.h;
    double gy = (py - g.origin_y) / g.h;
    int i0 = static_cast<int>(std::floor(gx));
    int j0 = static_cast<int>(std::floor(gy));
    double fx = gx - i0, fy = gy - j0;
    if (i0 < 0) { i0 = 0; fx = 0.0; }
    if (j0 < 0) { j0 = 0; fy = 0.0; }
    if (i0 > cnx - 2) { i0 = cnx - 2; fx = 1.0; }
    if (j0 > cny - 2) { j0 = cny - 2; fy = 1.0; }
    if (!(out.w_valid[cidx(i0, j0)] && out.w_valid[cidx(i0 + 1, j0)] &&
          out.w_valid[cidx(i0, j0 + 1)] && out.w_valid[cidx(i0 + 1, j0 + 1)]))
      return {false, 0.0};
    const double v =
        (1 - fx) * (1 - fy) * out.w_corners[cidx(i0, j0)] +
        fx * (1 - fy) * out.w_corners[cidx(i0 + 1, j0)] +
        (1 - fx) * fy * out.w_corners[cidx(i0, j0 + 1)] +
        fx * fy * out.w_corners[cidx(i0 + 1, j0 + 1)];
    return {true, v};
  };

  double lhs = 0.0, rhs = 0.0;
  const std::vector<Chain> chains = extract_interface_chains(st);
  for (const Chain& ch : chains) {
    std::vector<std::array<double, 2>> orig, mapped;
    const std::size_t np = ch.pts.size();
    for (std::size_t k = 0; k + 1 < np + (ch.closed ? 1 : 0); ++k) {
      const auto& p = ch.pts[k];
      const auto& qp = ch.pts[(k + 1) % np];
      const double dpx = p[0] - cx, dpy = p[1] - cy;
      const double dqx = qp[0] - cx, dqy = qp[1] - cy;
      if (dpx * dpx + dpy * dpy > radius * radius) continue;
      if (dqx * dqx + dqy * dqy > radius * radius) continue;
      const auto [okp, wp] = w_at(p[0], p[1]);
      const auto [okq, wq] = w_at(qp[0], qp[1]);
      if (!okp || !okq) continue;
      const double mx = 0.5 * (p[0] + qp[0]);
      const double my = 0.5 * (p[1] + qp[1]);
      const double um = bilinear_cells(g, st.u, mx, my);
      if (um <= kUFloor) continue;
      const auto gh = bilinear_grad(g, out.h_field, mx, my);
      const double gm = std::hypot(gh[0], gh[1]);
      if (gm < 1e-10) {
        out.conditioning_warning = true;
        continue;
      }
      const double hp = bilinear_cells(g, out.h_field, p[0], p[1]);
      const double hq = bilinear_cells(g, out.h_field, qp[0], qp[1]);
      const double seg = std::hypot(qp[0] - p[0], qp[1] - p[1]);
      const double mseg = std::hypot(wq - wp, hq - hp);
      // h^2 * phi with phi = 1/(|grad h| a^2) and a = h/u reduces to
      // u^2 / |grad h|
      lhs += um * um / gm * mseg;
      rhs += um * um * seg;
      if (orig.empty()) {
        orig.push_back(p);
        mapped.push_back({wp, hp});
      }
      orig.push_back(qp);
      mapped.push_back({wq, hq});
    }
    if (!orig.empty()) {
      out.polylines.push_back(std::move(orig));
      out.mapped_polylines.push_back(std::move(mapped));
    }
  }
  out.identity_residual = rhs > 0.0 ? std::abs(lhs - rhs) / rhs : 0.0;
  return out;
}

}  // namespace robinfb
