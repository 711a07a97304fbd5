#pragma once

#include <string>

#include "robinfb/core.hpp"

namespace robinfb {

/// Terms of the discrete functional. `interface_term` is the raw integral of
/// the squared face trace over the two-phase interface; `volume` is already
/// weighted by lambda.
struct EnergyBreakdown {
  double dirichlet = 0.0;
  double interface_term = 0.0;
  double volume = 0.0;
  double perimeter1 = 0.0;
  double perimeter2 = 0.0;
  double beta = 0.0;
  double eps = 0.0;

  double total_j() const { return dirichlet + beta * interface_term + volume; }
  double total_j_eps() const {
    return total_j() + eps * (perimeter1 + perimeter2);
  }
  std::string csv_row() const;
  static std::string csv_header();
};

/// Sum over interior faces of (u_a - u_b)^2. Cell-size factors cancel in 2D.
/// Box-edge faces carry no term; valid states vanish on the boundary ring, so
/// this agrees with a zero-ghost convention there.
double dirichlet_energy(const State& state);

/// Sum over faces between the two phase groups of ((u_a+u_b)/2)^2 * h.
double interface_integral(const State& state);

/// Squared-trace integral over the boundary of phase `phase` (1 or 2): the
/// face trace on interface faces, zero on faces against unlabeled cells or
/// the box exterior.
double side_integral(const State& state, int phase);

/// h * number of faces with exactly one cell in the region. Box-edge faces
/// count against the exterior.
template <class Pred>
double perimeter(const Grid& grid, const std::vector<Label>& labels,
                 Pred in_region) {
  long count = 0;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const bool a = in_region(labels[grid.idx(i, j)]);
      // right and top neighbors cover every interior face once
      if (i + 1 < grid.nx) {
        if (a != in_region(labels[grid.idx(i + 1, j)])) ++count;
      } else if (a) {
        ++count;
      }
      if (j + 1 < grid.ny) {
        if (a != in_region(labels[grid.idx(i, j + 1)])) ++count;
      } else if (a) {
        ++count;
      }
      if (i == 0 && a) ++count;
      if (j == 0 && a) ++count;
    }
  }
  return grid.h * count;
}

double perimeter_phase(const State& state, int phase);

struct PerimeterDecomposition {
  double lhs = 0.0;
  double rhs = 0.0;
  double difference = 0.0;
};

/// lhs = Per(Omega1)+Per(Omega2), rhs = Per(union) + 2h * #(shared faces).
/// The difference is exactly zero for disjoint label fields.
PerimeterDecomposition perimeter_decomposition_check(
    const Grid& grid, const std::vector<Label>& labels);

EnergyBreakdown total_energy(const State& state, double beta, double lambda,
                             double eps);

}  // namespace robinfb
