#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "robinfb/core.hpp"
#include "robinfb/polyline.hpp"

namespace robinfb {

struct ConformalResult {
  // harmonic substitute h: solved on positive cells in the ball, boundary
  // data elsewhere (u on labeled cells, 0 outside the positivity set)
  std::vector<double> h_field;        // full grid, row-major
  std::vector<std::uint8_t> h_solved; // 1 where h was solved
  // harmonic conjugate on lattice corners, (nx+1) x (ny+1)
  std::vector<double> w_corners;
  std::vector<std::uint8_t> w_valid;
  // interface polyline segments inside the ball and their images under
  // Phi = (w, h)
  std::vector<std::vector<std::array<double, 2>>> polylines;
  std::vector<std::vector<std::array<double, 2>>> mapped_polylines;
  double loop_residual_max = 0.0;
  double harmonic_defect_max = 0.0;
  double identity_residual = 0.0;
  bool conditioning_warning = false;
};

/// Conformal flattening in a ball: h is discrete-harmonic on the positive
/// cells with h = u on the ball boundary and h = 0 across the free boundary;
/// w integrates the rotated gradient along lattice paths from the ball
/// center. The weighted-length identity is checked on the interface chains
/// inside the ball.
ConformalResult conformal_flatten(const State& state, double cx, double cy,
                                  double radius, double tol = 1e-12);

}  // namespace robinfb
