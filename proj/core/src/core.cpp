#include "robinfb/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace robinfb {

namespace {

double clamp(double v, double lo, double hi) {
  return std::max(lo, std::min(hi, v));
}

// Distance from a point to an axis-aligned rectangle.
double rect_point_dist(const Rect& r, double x, double y) {
  const double dx = std::max({r.x0 - x, 0.0, x - (r.x0 + r.wx)});
  const double dy = std::max({r.y0 - y, 0.0, y - (r.y0 + r.wy)});
  return std::hypot(dx, dy);
}

}  // namespace

bool shape_contains(const Shape& s, double x, double y) {
  if (const Disk* d = std::get_if<Disk>(&s)) {
    const double dx = x - d->cx;
    const double dy = y - d->cy;
    return dx * dx + dy * dy <= d->radius * d->radius;
  }
  const Rect& r = std::get<Rect>(s);
  return x >= r.x0 && x <= r.x0 + r.wx && y >= r.y0 && y <= r.y0 + r.wy;
}

double shape_distance_to_point(const Shape& s, double x, double y) {
  if (const Disk* d = std::get_if<Disk>(&s)) {
    return std::max(0.0, std::hypot(x - d->cx, y - d->cy) - d->radius);
  }
  return rect_point_dist(std::get<Rect>(s), x, y);
}

double shape_diameter(const Shape& s) {
  if (const Disk* d = std::get_if<Disk>(&s)) return 2.0 * d->radius;
  const Rect& r = std::get<Rect>(s);
  return std::hypot(r.wx, r.wy);
}

double shape_distance(const Shape& a, const Shape& b) {
  if (const Disk* da = std::get_if<Disk>(&a)) {
    if (const Disk* db = std::get_if<Disk>(&b)) {
      return std::max(0.0, std::hypot(da->cx - db->cx, da->cy - db->cy) -
                               da->radius - db->radius);
    }
    const Rect& rb = std::get<Rect>(b);
    const double px = clamp(da->cx, rb.x0, rb.x0 + rb.wx);
    const double py = clamp(da->cy, rb.y0, rb.y0 + rb.wy);
    return std::max(0.0, std::hypot(da->cx - px, da->cy - py) - da->radius);
  }
  if (std::holds_alternative<Disk>(b)) return shape_distance(b, a);
  const Rect& ra = std::get<Rect>(a);
  const Rect& rb = std::get<Rect>(b);
  const double dx =
      std::max({rb.x0 - (ra.x0 + ra.wx), 0.0, ra.x0 - (rb.x0 + rb.wx)});
  const double dy =
      std::max({rb.y0 - (ra.y0 + ra.wy), 0.0, ra.y0 - (rb.y0 + rb.wy)});
  return std::hypot(dx, dy);
}

double ProblemSpec::cell_size() const {
  return std::max(box.width, box.height) / resolution;
}

double ProblemSpec::set_distance() const {
  double d = std::numeric_limits<double>::infinity();
  for (const Shape& a : shapes_e1)
    for (const Shape& b : shapes_e2) d = std::min(d, shape_distance(a, b));
  return d;
}

double ProblemSpec::margin() const { return 10.0 * cell_size(); }

void ProblemSpec::validate_or_throw() const {
  if (resolution < 8) throw GeometryError("resolution must be >= 8");
  if (beta < 0.0) throw GeometryError("beta must be >= 0");
  if (lambda <= 0.0) throw GeometryError("lambda must be > 0");
  if (g_value <= 0.0) throw GeometryError("g_value must be > 0");
  if (box.width <= 0.0 || box.height <= 0.0)
    throw GeometryError("box sides must be positive");
  if (shapes_e1.empty())
    throw GeometryError("shapes_e1 must be nonempty");
  if (one_phase_mode) {
    if (!shapes_e2.empty())
      throw GeometryError("one_phase_mode requires shapes_e2 empty");
  } else if (shapes_e2.empty()) {
    throw GeometryError("shapes_e2 empty requires one_phase_mode");
  }
  if (!shapes_e2.empty() && set_distance() <= 0.0)
    throw GeometryError("E1 and E2 must have strictly positive distance");
  if (strip_mode) return;  // margin rules suspended for strip embeddings
  const double rho = margin();
  auto check_inside = [&](const Shape& s) {
    double sx0, sy0, sx1, sy1;
    if (const Disk* d = std::get_if<Disk>(&s)) {
      sx0 = d->cx - d->radius;
      sy0 = d->cy - d->radius;
      sx1 = d->cx + d->radius;
      sy1 = d->cy + d->radius;
    } else {
      const Rect& r = std::get<Rect>(s);
      sx0 = r.x0;
      sy0 = r.y0;
      sx1 = r.x0 + r.wx;
      sy1 = r.y0 + r.wy;
    }
    if (sx0 - rho < box.x0 || sy0 - rho < box.y0 ||
        sx1 + rho > box.x0 + box.width || sy1 + rho > box.y0 + box.height)
      throw GeometryError("box too small: shape dilated by margin exits box");
  };
  for (const Shape& s : shapes_e1) check_inside(s);
  for (const Shape& s : shapes_e2) check_inside(s);
}

Grid make_grid(const Box& box, int resolution) {
  Grid g;
  g.h = std::max(box.width, box.height) / resolution;
  // Pad the short side up to an integer number of square cells.
  g.nx = static_cast<int>(std::ceil(box.width / g.h - 1e-9));
  g.ny = static_cast<int>(std::ceil(box.height / g.h - 1e-9));
  g.origin_x = box.x0;
  g.origin_y = box.y0;
  return g;
}

State rasterize(const ProblemSpec& spec) {
  spec.validate_or_throw();
  State st;
  st.grid = make_grid(spec.box, spec.resolution);
  st.g_value = spec.g_value;
  st.strip_mode = spec.strip_mode;
  st.u.assign(st.grid.size(), 0.0);
  st.labels.assign(st.grid.size(), Label::None);
  for (int j = 0; j < st.grid.ny; ++j) {
    for (int i = 0; i < st.grid.nx; ++i) {
      const double x = st.grid.cx(i);
      const double y = st.grid.cy(j);
      bool in1 = false, in2 = false;
      for (const Shape& s : spec.shapes_e1)
        if (shape_contains(s, x, y)) { in1 = true; break; }
      for (const Shape& s : spec.shapes_e2)
        if (shape_contains(s, x, y)) { in2 = true; break; }
      if (in1 && in2)
        throw GeometryError("overlapping E1/E2 rasterizations at cell (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      if (in1 || in2) {
        st.lab(i, j) = in1 ? Label::E1 : Label::E2;
        st.at(i, j) = spec.g_value;
      }
    }
  }
  if (!spec.strip_mode) {
    // The fixed sets may not reach the boundary ring (margin already checks
    // the continuum geometry; this guards the rasterized one).
    for (int j = 0; j < st.grid.ny; ++j)
      for (int i = 0; i < st.grid.nx; ++i)
        if ((i == 0 || j == 0 || i == st.grid.nx - 1 || j == st.grid.ny - 1) &&
            st.lab(i, j) != Label::None)
          throw GeometryError("fixed set touches the box boundary ring");
  }
  return st;
}

std::vector<Violation> validate(const State& st) {
  std::vector<Violation> out;
  const Grid& g = st.grid;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Label l = st.lab(i, j);
      const double v = st.at(i, j);
      if (is_e(l) && v != st.g_value)
        out.push_back({"u=g on fixed sets", i, j,
                       "u=" + std::to_string(v)});
      if (l == Label::None && v != 0.0)
        out.push_back({"u=0 outside Omega1+Omega2", i, j,
                       "u=" + std::to_string(v)});
      if (v < 0.0 || v > st.g_value)
        out.push_back({"0<=u<=g", i, j, "u=" + std::to_string(v)});
      if (!st.strip_mode &&
          (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1)) {
        if (v != 0.0)
          out.push_back({"u=0 on box boundary cells", i, j,
                         "u=" + std::to_string(v)});
      }
    }
  }
  return out;
}

std::uint64_t state_hash(const State& st) {
  // FNV-1a over grid metadata and raw field bytes.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < n; ++k) {
      h ^= p[k];
      h *= 1099511628211ull;
    }
  };
  mix(&st.grid.nx, sizeof(st.grid.nx));
  mix(&st.grid.ny, sizeof(st.grid.ny));
  mix(&st.grid.h, sizeof(st.grid.h));
  mix(&st.grid.origin_x, sizeof(st.grid.origin_x));
  mix(&st.grid.origin_y, sizeof(st.grid.origin_y));
  mix(&st.g_value, sizeof(st.g_value));
  mix(st.u.data(), st.u.size() * sizeof(double));
  mix(st.labels.data(), st.labels.size() * sizeof(Label));
  return h;
}

namespace {

// 1D squared distance transform (Felzenszwalb-Huttenlocher lower envelope).
void edt_1d(const std::vector<double>& f, std::vector<double>& d,
            std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

std::vector<double> edt_squared(const Grid& grid, const std::vector<bool>& mask) {
  const double inf = 1e18;
  std::vector<double> dist(grid.size(), inf);
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (mask[k]) dist[k] = 0.0;
  // columns then rows
  {
    std::vector<double> f(grid.ny), d(grid.ny), z(grid.ny + 1);
    std::vector<int> v(grid.ny);
    for (int i = 0; i < grid.nx; ++i) {
      for (int j = 0; j < grid.ny; ++j) f[j] = dist[grid.idx(i, j)];
      edt_1d(f, d, v, z);
      for (int j = 0; j < grid.ny; ++j) dist[grid.idx(i, j)] = d[j];
    }
  }
  {
    std::vector<double> f(grid.nx), d(grid.nx), z(grid.nx + 1);
    std::vector<int> v(grid.nx);
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) f[i] = dist[grid.idx(i, j)];
      edt_1d(f, d, v, z);
      for (int i = 0; i < grid.nx; ++i) dist[grid.idx(i, j)] = d[i];
    }
  }
  return dist;
}

}  // namespace robinfb
