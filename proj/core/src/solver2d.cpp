#include "robinfb/solver2d.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace robinfb {

namespace {

constexpr int kDx[4] = {1, -1, 0, 0};
constexpr int kDy[4] = {0, 0, 1, -1};

bool on_ring(const Grid& g, int i, int j) {
  return i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1;
}

// Cells whose label may never change: fixed sets always; the boundary ring
// except in strip mode, where the embedded configuration spans the box.
bool is_fixed_cell(const State& st, int i, int j) {
  if (is_e(st.lab(i, j))) return true;
  if (!st.strip_mode && on_ring(st.grid, i, j)) return true;
  return false;
}

double dist_to_set(const std::vector<Shape>& shapes, double x, double y) {
  double d = std::numeric_limits<double>::infinity();
  for (const Shape& s : shapes)
    d = std::min(d, shape_distance_to_point(s, x, y));
  return d;
}

}  // namespace

State u_step(const State& state, double beta, double lambda, double u_tol) {
  (void)lambda;  // the volume term is label-driven and drops out here
  const Grid& g = state.grid;
  std::vector<int> eq(g.size(), -1);
  std::vector<std::size_t> cells;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (is_omega(state.lab(i, j))) {
        eq[g.idx(i, j)] = static_cast<int>(cells.size());
        cells.push_back(g.idx(i, j));
      }
  if (cells.empty()) return state;

  const int n = static_cast<int>(cells.size());
  const double robin_w = 0.5 * beta * g.h;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * cells.size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd x0(n);

  for (int row = 0; row < n; ++row) {
    const std::size_t c = cells[row];
    const int i = static_cast<int>(c % g.nx);
    const int j = static_cast<int>(c / g.nx);
    const Label lc = state.lab(i, j);
    double diag = 0.0;
    for (int d = 0; d < 4; ++d) {
      const int ni = i + kDx[d];
      const int nj = j + kDy[d];
      if (!g.in_bounds(ni, nj)) continue;  // natural boundary, no face term
      const std::size_t nb = g.idx(ni, nj);
      const Label ln = state.labels[nb];
      const bool iface = (in_group1(lc) && in_group2(ln)) ||
                         (in_group2(lc) && in_group1(ln));
      diag += 2.0;
      if (iface) diag += robin_w;
      if (eq[nb] >= 0) {
        double off = -2.0;
        if (iface) off += robin_w;
        trip.emplace_back(row, eq[nb], off);
      } else {
        const double v = state.u[nb];  // g on fixed sets, 0 outside
        b[row] += 2.0 * v;
        if (iface) b[row] -= robin_w * v;
      }
    }
    trip.emplace_back(row, row, diag);
    x0[row] = state.u[c];
  }

  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                           Eigen::Lower | Eigen::Upper>
      cg;
  cg.setTolerance(u_tol);
  cg.setMaxIterations(10 * static_cast<long>(n) + 1000);
  cg.compute(A);
  Eigen::VectorXd x = cg.solveWithGuess(b, x0);
  if (cg.info() != Eigen::Success) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "u_step did not converge: residual %.3e after %ld iterations",
                  cg.error(), static_cast<long>(cg.iterations()));
    throw SolverError(buf);
  }

  State out = state;
  for (int row = 0; row < n; ++row)
    out.u[cells[row]] = std::clamp(x[row], 0.0, state.g_value);
  return out;
}

double flip_delta(const State& st, int i, int j, Label to, double beta,
                  double lambda, double eps, double* u_new) {
  const Grid& g = st.grid;
  const double h = g.h;
  const Label from = st.lab(i, j);
  const double u_old = st.at(i, j);

  // One-point optimum of the local quadratic for flips into a phase.
  double u_next = 0.0;
  if (is_omega(to)) {
    double num = 0.0;
    double den = 0.0;
    for (int d = 0; d < 4; ++d) {
      const int ni = i + kDx[d];
      const int nj = j + kDy[d];
      if (!g.in_bounds(ni, nj)) continue;
      const double un = st.at(ni, nj);
      const Label ln = st.lab(ni, nj);
      const bool iface = (in_group1(to) && in_group2(ln)) ||
                         (in_group2(to) && in_group1(ln));
      den += 2.0;
      num += 2.0 * un;
      if (iface) {
        den += 0.5 * beta * h;
        num -= 0.5 * beta * h * un;
      }
    }
    u_next = den > 0.0 ? std::clamp(num / den, 0.0, st.g_value) : 0.0;
  }
  if (u_new) *u_new = u_next;

  auto local = [&](Label lc, double uc) {
    double e = 0.0;
    for (int d = 0; d < 4; ++d) {
      const int ni = i + kDx[d];
      const int nj = j + kDy[d];
      const bool inb = g.in_bounds(ni, nj);
      const Label ln = inb ? st.lab(ni, nj) : Label::None;
      const double un = inb ? st.at(ni, nj) : 0.0;
      if (inb) {
        const double du = uc - un;
        e += du * du;
        const bool iface = (in_group1(lc) && in_group2(ln)) ||
                           (in_group2(lc) && in_group1(ln));
        if (iface) {
          const double tr = 0.5 * (uc + un);
          e += beta * tr * tr * h;
        }
      }
      // perimeter faces (box-edge faces count against the exterior)
      const bool g1c = in_group1(lc), g1n = inb && in_group1(ln);
      const bool g2c = in_group2(lc), g2n = inb && in_group2(ln);
      if (g1c != g1n) e += eps * h;
      if (g2c != g2n) e += eps * h;
    }
    if (is_omega(lc)) e += lambda * h * h;
    return e;
  };

  return local(to, u_next) - local(from, u_old);
}

namespace {

// Near-marginal flips are re-evaluated with a local relaxation: after the
// flip, Gauss-Seidel passes over the free cells of a small window let the
// field adjust, and the energy change of the compound move is computed
// exactly over the faces touching the window. Without this the advancing
// front stalls with a boundary slope O(1) away from sqrt(lambda).
constexpr int kPatchRadius = 6;
constexpr int kPatchIters = 32;
constexpr double kPatchOmega = 1.7;  // SOR overrelaxation

struct PatchMove {
  double delta = 0.0;
  std::vector<std::pair<std::size_t, double>> new_values;
};

double window_energy(const State& st, int x0, int y0, int x1, int y1,
                     double beta, double lambda, double eps) {
  const Grid& g = st.grid;
  const double h = g.h;
  double e = 0.0;
  for (int j = y0; j <= y1; ++j) {
    for (int i = x0; i <= x1; ++i) {
      const Label lc = st.lab(i, j);
      const double uc = st.at(i, j);
      if (is_omega(lc)) e += lambda * h * h;
      for (int d = 0; d < 4; ++d) {
        const int ni = i + kDx[d], nj = j + kDy[d];
        const bool inb = g.in_bounds(ni, nj);
        const bool in_window =
            inb && ni >= x0 && ni <= x1 && nj >= y0 && nj <= y1;
        if (in_window && d % 2 == 1) continue;  // internal face counted once
        const Label ln = inb ? st.lab(ni, nj) : Label::None;
        const double un = inb ? st.at(ni, nj) : 0.0;
        if (inb) {
          const double du = uc - un;
          e += du * du;
          if ((in_group1(lc) && in_group2(ln)) ||
              (in_group2(lc) && in_group1(ln))) {
            const double tr = 0.5 * (uc + un);
            e += beta * tr * tr * h;
          }
        }
        const bool g1c = in_group1(lc), g1n = inb && in_group1(ln);
        const bool g2c = in_group2(lc), g2n = inb && in_group2(ln);
        if (g1c != g1n) e += eps * h;
        if (g2c != g2n) e += eps * h;
      }
    }
  }
  return e;
}

void relax_window(State& st, int x0, int y0, int x1, int y1, double beta) {
  const Grid& g = st.grid;
  const double robin_w = 0.5 * beta * g.h;
  auto update = [&](int i, int j) {
    if (!is_omega(st.lab(i, j)) || is_fixed_cell(st, i, j)) return;
    const Label lc = st.lab(i, j);
    double num = 0.0, den = 0.0;
    for (int d = 0; d < 4; ++d) {
      const int ni = i + kDx[d], nj = j + kDy[d];
      if (!g.in_bounds(ni, nj)) continue;
      const Label ln = st.lab(ni, nj);
      const double un = st.at(ni, nj);
      den += 2.0;
      num += 2.0 * un;
      if ((in_group1(lc) && in_group2(ln)) ||
          (in_group2(lc) && in_group1(ln))) {
        den += robin_w;
        num -= robin_w * un;
      }
    }
    if (den > 0.0) {
      const double gs = num / den;
      const double cur = st.at(i, j);
      st.at(i, j) =
          std::clamp(cur + kPatchOmega * (gs - cur), 0.0, st.g_value);
    }
  };
  // alternating sweep directions keep the relaxation direction-neutral
  for (int pass = 0; pass < kPatchIters; ++pass) {
    if (pass % 2 == 0) {
      for (int j = y0; j <= y1; ++j)
        for (int i = x0; i <= x1; ++i) update(i, j);
    } else {
      for (int j = y1; j >= y0; --j)
        for (int i = x1; i >= x0; --i) update(i, j);
    }
  }
}

// Evaluates the flip of (i,j) to `to` together with the window relaxation;
// st is restored before returning.
PatchMove evaluate_patch_move(State& st, int i, int j, Label to, double beta,
                              double lambda, double eps, double u_seed) {
  const Grid& g = st.grid;
  const int x0 = std::max(0, i - kPatchRadius);
  const int y0 = std::max(0, j - kPatchRadius);
  const int x1 = std::min(g.nx - 1, i + kPatchRadius);
  const int y1 = std::min(g.ny - 1, j + kPatchRadius);
  const double before = window_energy(st, x0, y0, x1, y1, beta, lambda, eps);
  std::vector<std::pair<std::size_t, double>> saved;
  saved.reserve(static_cast<std::size_t>(x1 - x0 + 1) * (y1 - y0 + 1));
  for (int jj = y0; jj <= y1; ++jj)
    for (int ii = x0; ii <= x1; ++ii)
      saved.emplace_back(g.idx(ii, jj), st.at(ii, jj));
  const Label from = st.lab(i, j);
  st.lab(i, j) = to;
  st.at(i, j) = u_seed;
  relax_window(st, x0, y0, x1, y1, beta);
  const double after = window_energy(st, x0, y0, x1, y1, beta, lambda, eps);
  PatchMove mv;
  mv.delta = after - before;
  for (const auto& [c, old] : saved)
    if (st.u[c] != old) mv.new_values.emplace_back(c, st.u[c]);
  // restore
  st.lab(i, j) = from;
  for (const auto& [c, old] : saved) st.u[c] = old;
  return mv;
}

// A single new cell on a flat front pays for three exposed faces, so flat
// segments cannot advance (or retreat) cell by cell even when moving the
// whole layer lowers the energy. Segment moves flip a maximal straight run
// of equally-oriented front cells at once.
struct SegmentMove {
  double delta = 0.0;
  std::vector<std::size_t> cells;
  std::vector<std::pair<std::size_t, double>> new_values;
};

SegmentMove evaluate_segment_move(State& st, const std::vector<std::size_t>& seg,
                                  Label to, double beta, double lambda,
                                  double eps) {
  const Grid& g = st.grid;
  int x0 = g.nx, y0 = g.ny, x1 = -1, y1 = -1;
  for (const std::size_t c : seg) {
    const int i = static_cast<int>(c % g.nx), j = static_cast<int>(c / g.nx);
    x0 = std::min(x0, i); x1 = std::max(x1, i);
    y0 = std::min(y0, j); y1 = std::max(y1, j);
  }
  x0 = std::max(0, x0 - kPatchRadius);
  y0 = std::max(0, y0 - kPatchRadius);
  x1 = std::min(g.nx - 1, x1 + kPatchRadius);
  y1 = std::min(g.ny - 1, y1 + kPatchRadius);
  const double before = window_energy(st, x0, y0, x1, y1, beta, lambda, eps);
  std::vector<std::pair<std::size_t, double>> saved;
  std::vector<Label> saved_labels(seg.size());
  for (int jj = y0; jj <= y1; ++jj)
    for (int ii = x0; ii <= x1; ++ii)
      saved.emplace_back(g.idx(ii, jj), st.at(ii, jj));
  for (std::size_t k = 0; k < seg.size(); ++k) {
    saved_labels[k] = st.labels[seg[k]];
    st.labels[seg[k]] = to;
    if (to == Label::None) st.u[seg[k]] = 0.0;
  }
  relax_window(st, x0, y0, x1, y1, beta);
  const double after = window_energy(st, x0, y0, x1, y1, beta, lambda, eps);
  SegmentMove mv;
  mv.cells = seg;
  mv.delta = after - before;
  for (const auto& [c, old] : saved)
    if (st.u[c] != old) mv.new_values.emplace_back(c, st.u[c]);
  for (std::size_t k = 0; k < seg.size(); ++k) st.labels[seg[k]] = saved_labels[k];
  for (const auto& [c, old] : saved) st.u[c] = old;
  return mv;
}

// Maximal straight run through (i,j) of cells with the same label and the
// same single phase-P neighbor orientation.
std::vector<std::size_t> front_segment(const State& st, int i, int j,
                                       Label want, Label phase_side) {
  const Grid& g = st.grid;
  int side = -1;
  int nsides = 0;
  for (int d = 0; d < 4; ++d) {
    const int ni = i + kDx[d], nj = j + kDy[d];
    if (!g.in_bounds(ni, nj)) continue;
    const bool match = phase_side == Label::None
                           ? st.lab(ni, nj) == Label::None
                           : (in_group1(phase_side)
                                  ? in_group1(st.lab(ni, nj))
                                  : in_group2(st.lab(ni, nj)));
    if (match && (phase_side == Label::None || st.at(ni, nj) > kUFloor)) {
      side = d;
      ++nsides;
    }
  }
  if (nsides != 1) return {};
  const int li = kDy[side], lj = kDx[side];  // lateral direction
  constexpr int kMaxSegment = 48;
  auto fits = [&](int ci, int cj) {
    if (!g.in_bounds(ci, cj)) return false;
    if (st.lab(ci, cj) != want) return false;
    if (is_e(st.lab(ci, cj))) return false;
    if (!st.strip_mode && on_ring(g, ci, cj)) return false;
    const int ni = ci + kDx[side], nj = cj + kDy[side];
    if (!g.in_bounds(ni, nj)) return false;
    const bool match = phase_side == Label::None
                           ? st.lab(ni, nj) == Label::None
                           : (in_group1(phase_side)
                                  ? in_group1(st.lab(ni, nj))
                                  : in_group2(st.lab(ni, nj)));
    if (!match) return false;
    // the opposite side must stay open so the run is a clean front line
    const int oi = ci - kDx[side], oj = cj - kDy[side];
    if (g.in_bounds(oi, oj) && st.lab(oi, oj) != want &&
        !(phase_side != Label::None && st.lab(oi, oj) == Label::None))
      return false;
    return true;
  };
  if (!fits(i, j)) return {};
  std::vector<std::size_t> seg;
  int lo = 0, hi = 0;
  while (lo > -kMaxSegment && fits(i + (lo - 1) * li, j + (lo - 1) * lj)) --lo;
  while (hi < kMaxSegment && fits(i + (hi + 1) * li, j + (hi + 1) * lj)) ++hi;
  for (int k = lo; k <= hi; ++k)
    seg.push_back(g.idx(i + k * li, j + k * lj));
  return seg;
}

bool creates_interface(const State& st, int i, int j, Label to) {
  if (!is_omega(to) && !is_e(to)) return false;
  const Grid& g = st.grid;
  for (int d = 0; d < 4; ++d) {
    const int ni = i + kDx[d];
    const int nj = j + kDy[d];
    if (!g.in_bounds(ni, nj)) continue;
    const Label ln = st.lab(ni, nj);
    if ((in_group1(to) && in_group2(ln)) || (in_group2(to) && in_group1(ln)))
      return true;
  }
  return false;
}

}  // namespace

SweepResult label_sweep(State& st, double beta, double lambda, double eps,
                        std::mt19937_64& rng, const SolverParams& params,
                        double temperature) {
  const Grid& g = st.grid;
  std::vector<std::uint32_t> order;
  order.reserve(g.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (!is_fixed_cell(st, i, j))
        order.push_back(static_cast<std::uint32_t>(g.idx(i, j)));
  // Fisher-Yates with the raw engine keeps the order independent of the
  // standard library's shuffle implementation.
  for (std::size_t k = order.size(); k > 1; --k) {
    const std::size_t r = static_cast<std::size_t>(rng() % k);
    std::swap(order[k - 1], order[r]);
  }

  constexpr double kFlipTol = 1e-12;
  static constexpr Label kLabels[3] = {Label::None, Label::Omega1,
                                       Label::Omega2};
  // a patch re-evaluation can recover at most the field part the one-point
  // value misses; beyond this band the simple delta is decisive
  const double patch_band =
      lambda * g.h * g.h + 8.0 * eps * g.h +
      0.5 * beta * g.h * st.g_value * st.g_value + 1e-12;
  SweepResult res;
  std::vector<std::uint8_t> seg_tried(g.size(), 0);
  for (const std::uint32_t cell : order) {
    const int i = static_cast<int>(cell % g.nx);
    const int j = static_cast<int>(cell / g.nx);
    const Label cur = st.lab(i, j);
    double best_delta = -kFlipTol;
    Label best_label = cur;
    double best_u = st.at(i, j);
    PatchMove best_patch;
    bool best_is_patch = false;
    for (const Label cand : kLabels) {
      if (cand == cur) continue;
      if (params.forbid_interface && creates_interface(st, i, j, cand))
        continue;
      double u_next = 0.0;
      const double delta = flip_delta(st, i, j, cand, beta, lambda, eps,
                                      &u_next);
      if (delta < best_delta) {
        best_delta = delta;
        best_label = cand;
        best_u = u_next;
        best_is_patch = false;
      }
      // a window relaxation can only help where there is field to couple to
      bool near_field = st.at(i, j) > kUFloor;
      for (int d = 0; d < 4 && !near_field; ++d) {
        const int ni = i + kDx[d], nj = j + kDy[d];
        if (g.in_bounds(ni, nj) && st.at(ni, nj) > kUFloor) near_field = true;
      }
      if (near_field && delta >= -kFlipTol && delta < patch_band) {
        PatchMove mv = evaluate_patch_move(st, i, j, cand, beta, lambda, eps,
                                           cand == Label::None ? 0.0 : u_next);
        if (mv.delta < best_delta) {
          best_delta = mv.delta;
          best_label = cand;
          best_patch = std::move(mv);
          best_is_patch = true;
        }
      }
    }
    bool apply = best_label != cur;
    if (!apply && temperature > 0.0) {
      // Metropolis step over a uniformly proposed alternative label.
      const Label cand = kLabels[rng() % 3];
      if (cand != cur &&
          !(params.forbid_interface && creates_interface(st, i, j, cand))) {
        double u_next = 0.0;
        const double delta =
            flip_delta(st, i, j, cand, beta, lambda, eps, &u_next);
        const double p = std::exp(-delta / temperature);
        const double roll =
            static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
        if (roll < p) {
          apply = true;
          best_label = cand;
          best_u = u_next;
        }
      }
    }
    if (apply) {
      st.lab(i, j) = best_label;
      if (best_is_patch) {
        for (const auto& [c, v] : best_patch.new_values) st.u[c] = v;
      } else {
        st.at(i, j) = best_u;
      }
      ++res.flips;
      continue;
    }
    // line moves along the front: grow into a phase or retreat to None
    if (seg_tried[g.idx(i, j)]) continue;
    bool near_field = st.at(i, j) > kUFloor;
    for (int d = 0; d < 4 && !near_field; ++d) {
      const int ni = i + kDx[d], nj = j + kDy[d];
      if (g.in_bounds(ni, nj) && st.at(ni, nj) > kUFloor) near_field = true;
    }
    if (!near_field) continue;
    auto try_segment = [&](Label phase_side, Label to) {
      const std::vector<std::size_t> seg =
          front_segment(st, i, j, cur, phase_side);
      if (seg.size() < 2) return false;
      for (const std::size_t c : seg) seg_tried[c] = 1;
      if (params.forbid_interface) {
        for (const std::size_t c : seg)
          if (creates_interface(st, static_cast<int>(c % g.nx),
                                static_cast<int>(c / g.nx), to))
            return false;
      }
      SegmentMove mv = evaluate_segment_move(st, seg, to, beta, lambda, eps);
      if (mv.delta >= -kFlipTol) return false;
      for (const std::size_t c : seg) {
        st.labels[c] = to;
        if (to == Label::None) st.u[c] = 0.0;
      }
      for (const auto& [c, v] : mv.new_values) st.u[c] = v;
      res.flips += static_cast<int>(seg.size());
      return true;
    };
    if (cur == Label::None) {
      if (!try_segment(Label::Omega1, Label::Omega1))
        try_segment(Label::Omega2, Label::Omega2);
    } else if (is_omega(cur)) {
      try_segment(Label::None, Label::None);
    }
  }
  res.improved = res.flips > 0;
  return res;
}

State minimize_at_eps(State state, double beta, double lambda, double eps,
                      const SolverParams& params, std::mt19937_64& rng,
                      std::vector<TraceRecord>& trace) {
  int zero_streak = 0;
  double temperature = params.anneal.enabled ? params.anneal.t0 : 0.0;
  for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
    state = u_step(state, beta, lambda, params.u_tol);
    const SweepResult sr =
        label_sweep(state, beta, lambda, eps, rng, params, temperature);
    temperature *= 0.8;
    TraceRecord rec;
    rec.eps = eps;
    rec.sweep = sweep;
    rec.flips = sr.flips;
    rec.energy = total_energy(state, beta, lambda, eps);
    trace.push_back(rec);
    if (sr.flips == 0 && temperature <= 0.0) {
      if (++zero_streak >= 2) break;
    } else {
      zero_streak = 0;
    }
  }
  return state;
}

State initialize_labels(const ProblemSpec& spec, const SolverParams& params,
                        Branch branch) {
  State st = rasterize(spec);
  const Grid& g = st.grid;
  double r_init = params.r_init;
  if (r_init <= 0.0) {
    if (spec.one_phase_mode) {
      double diam = 0.0;
      for (const Shape& s : spec.shapes_e1)
        diam = std::max(diam, shape_diameter(s));
      r_init = 0.3 * diam;
    } else {
      r_init = 0.3 * spec.set_distance();
    }
    r_init = std::max(r_init, 3.0 * g.h);
  }
  if (branch == Branch::Bridged && !spec.one_phase_mode)
    r_init = std::max(r_init, 0.6 * spec.set_distance() + 2.0 * g.h);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (is_fixed_cell(st, i, j) || st.lab(i, j) != Label::None) continue;
      const double x = g.cx(i);
      const double y = g.cy(j);
      const double d1 = dist_to_set(spec.shapes_e1, x, y);
      const double d2 = spec.one_phase_mode
                            ? std::numeric_limits<double>::infinity()
                            : dist_to_set(spec.shapes_e2, x, y);
      if (std::min(d1, d2) <= r_init)
        st.lab(i, j) = (d1 <= d2) ? Label::Omega1 : Label::Omega2;
    }
  }
  return st;
}

bool touches_margin_ring(const State& st) {
  const Grid& g = st.grid;
  const int band = 10;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i >= band && i < g.nx - band && j >= band && j < g.ny - band)
        continue;
      if (is_omega(st.lab(i, j)) || st.at(i, j) > kUFloor) return true;
    }
  }
  return false;
}

namespace {

struct BranchRun {
  State state;
  std::vector<TraceRecord> records;
  double eps_final = 0.0;
};

BranchRun run_schedule(const ProblemSpec& spec, const SolverParams& params,
                       Branch branch, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BranchRun run;
  run.state = initialize_labels(spec, params, branch);
  double eps = params.eps0;
  for (int k = 0; k < params.eps_steps; ++k) {
    run.state = minimize_at_eps(std::move(run.state), spec.beta, spec.lambda,
                                eps, params, rng, run.records);
    run.eps_final = eps;
    eps *= params.eps_factor;
  }
  // Positivity and labels must coincide at the end; prune any labeled cell
  // the field abandoned, then re-converge once if that changed anything.
  bool pruned = false;
  for (std::size_t c = 0; c < run.state.labels.size(); ++c) {
    if (is_omega(run.state.labels[c]) && run.state.u[c] <= kUFloor) {
      run.state.labels[c] = Label::None;
      run.state.u[c] = 0.0;
      pruned = true;
    }
  }
  if (pruned)
    run.state = minimize_at_eps(std::move(run.state), spec.beta, spec.lambda,
                                run.eps_final, params, rng, run.records);
  return run;
}

}  // namespace

ContinuationResult continuation(const ProblemSpec& spec,
                                const SolverParams& params) {
  spec.validate_or_throw();
  params.validate_or_throw();
  ContinuationResult out;
  BranchRun disjoint = run_schedule(spec, params, Branch::Disjoint,
                                    params.seed);
  out.eps_final = disjoint.eps_final;
  out.energy_disjoint_branch =
      total_energy(disjoint.state, spec.beta, spec.lambda, disjoint.eps_final)
          .total_j_eps();
  out.disjoint_state = disjoint.state;

  const bool try_bridged = !spec.one_phase_mode && !params.forbid_interface;
  if (try_bridged) {
    BranchRun bridged =
        run_schedule(spec, params, Branch::Bridged, params.seed + 1);
    out.ran_bridged_branch = true;
    out.energy_bridged_branch =
        total_energy(bridged.state, spec.beta, spec.lambda, bridged.eps_final)
            .total_j_eps();
    if (out.energy_bridged_branch < out.energy_disjoint_branch) {
      out.winner = Branch::Bridged;
      out.state = std::move(bridged.state);
      out.trace.records = std::move(bridged.records);
    } else {
      out.winner = Branch::Disjoint;
      out.state = std::move(disjoint.state);
      out.trace.records = std::move(disjoint.records);
    }
  } else {
    out.winner = Branch::Disjoint;
    out.state = std::move(disjoint.state);
    out.trace.records = std::move(disjoint.records);
  }
  if (!spec.strip_mode && touches_margin_ring(out.state))
    out.trace.margin_warning = true;
  return out;
}

std::string SolveTrace::to_csv() const {
  std::string s = "eps,sweep,flips," + EnergyBreakdown::csv_header() + "\n";
  char buf[64];
  for (const TraceRecord& r : records) {
    std::snprintf(buf, sizeof(buf), "%.17g,%d,%d,", r.eps, r.sweep, r.flips);
    s += buf;
    s += r.energy.csv_row();
    s += "\n";
  }
  return s;
}

}  // namespace robinfb
