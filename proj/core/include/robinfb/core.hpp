#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace robinfb {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  InputError(std::string field_, const std::string& msg)
      : std::runtime_error(msg), field(std::move(field_)) {}
  std::string field;
};

/// Axis-aligned bounding box, lower-left corner plus side lengths.
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double width = 1.0;
  double height = 1.0;
};

struct Disk {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
};

struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double wx = 0.0;
  double wy = 0.0;
};

using Shape = std::variant<Disk, Rect>;

bool shape_contains(const Shape& s, double x, double y);
double shape_distance_to_point(const Shape& s, double x, double y);
double shape_diameter(const Shape& s);
/// Euclidean distance between two shapes (0 if they touch or overlap).
double shape_distance(const Shape& a, const Shape& b);

/// Problem data: fixed sets, Robin coefficient, volume weight, boundary datum.
struct ProblemSpec {
  Box box;
  int resolution = 64;  // cells along the longest box side; cells are square
  std::vector<Shape> shapes_e1;
  std::vector<Shape> shapes_e2;
  double beta = 1.0;    // interface coefficient, >= 0
  double lambda = 1.0;  // volume weight, > 0
  double g_value = 1.0;
  bool one_phase_mode = false;
  // Strip runs embed a one-dimensional configuration: the fixed sets may span
  // the full box height and touch the left/right edges, and the usual margin
  // and boundary-ring constraints are suspended.
  bool strip_mode = false;

  void validate_or_throw() const;
  double set_distance() const;  // min distance between E1 and E2 shapes
  double margin() const;        // required clearance around the fixed sets
  double cell_size() const;
};

struct Grid {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j) * nx + i;
  }
  bool in_bounds(int i, int j) const {
    return i >= 0 && i < nx && j >= 0 && j < ny;
  }
  double cx(int i) const { return origin_x + (i + 0.5) * h; }
  double cy(int j) const { return origin_y + (j + 0.5) * h; }
};

Grid make_grid(const Box& box, int resolution);

enum class Label : std::uint8_t {
  None = 0,
  Omega1 = 1,
  Omega2 = 2,
  E1 = 3,
  E2 = 4,
};

inline bool is_e(Label l) { return l == Label::E1 || l == Label::E2; }
inline bool is_omega(Label l) { return l == Label::Omega1 || l == Label::Omega2; }
inline bool in_group1(Label l) { return l == Label::Omega1 || l == Label::E1; }
inline bool in_group2(Label l) { return l == Label::Omega2 || l == Label::E2; }
inline bool is_labeled(Label l) { return l != Label::None; }

/// Scalar field plus three-way partition on a uniform grid.
struct State {
  Grid grid;
  std::vector<double> u;       // cell-centered, row-major
  std::vector<Label> labels;   // row-major
  double g_value = 1.0;
  bool strip_mode = false;

  double& at(int i, int j) { return u[grid.idx(i, j)]; }
  double at(int i, int j) const { return u[grid.idx(i, j)]; }
  Label& lab(int i, int j) { return labels[grid.idx(i, j)]; }
  Label lab(int i, int j) const { return labels[grid.idx(i, j)]; }
};

State rasterize(const ProblemSpec& spec);

struct Violation {
  std::string invariant;
  int i = -1;
  int j = -1;
  std::string detail;
};

std::vector<Violation> validate(const State& state);

std::uint64_t state_hash(const State& state);

/// Exact squared Euclidean distance transform (cell units) to the nearest
/// cell where mask is true. Cells with mask true get 0.
std::vector<double> edt_squared(const Grid& grid, const std::vector<bool>& mask);

}  // namespace robinfb
