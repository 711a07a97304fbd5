#pragma once

#include <string>

#include "robinfb/core.hpp"

namespace robinfb {

/// One-dimensional two-point configuration on [-1-eps, 1+eps] with unit
/// boundary data at both ends and a single candidate interface at 0.
struct Config1D {
  double eps = 0.0;   // half-gap of the disjoint wedges
  double beta = 1.0;  // interface coefficient
  double ell = 0.0;   // trace value at the interface, in [0, 1]

  void validate_or_throw() const {
    if (eps < 0.0) throw InputError("eps", "eps must be >= 0");
    if (beta <= 0.0) throw InputError("beta", "beta must be > 0");
    if (ell < 0.0 || ell > 1.0) throw InputError("ell", "ell must be in [0,1]");
  }
};

/// Energy of the two disjoint unit-slope wedges (volume weight 1): exactly 4.
double disjoint_energy();

/// Energy of the single-interface configuration with trace ell:
/// 2(1-ell)^2/(1+eps) + beta*ell^2 + 2 + 2*eps.
double bridged_energy(double beta, double eps, double ell);

/// Minimizer of bridged_energy in ell: 2 / (2 + beta + eps*beta).
double optimal_ell(double beta, double eps);

/// bridged_energy at the optimal trace.
double bridged_energy_optimal(double beta, double eps);

/// Same value written out directly:
/// 2(1+eps)b^2/(2+b+eps b)^2 + b (2/(2+b+eps b))^2 + 2 + 2 eps.
double bridged_energy_optimal_expanded(double beta, double eps);

/// The unique eps0 > 0 where the optimal bridged energy crosses the disjoint
/// value 4, found by bisection to 1e-12. Below eps0 the interface wins.
double interface_threshold(double beta);

enum class Winner1D { Disjoint, Bridged };

struct Solve1DResult {
  double energy = 0.0;
  double ell_hat = 0.0;
  Winner1D winner = Winner1D::Disjoint;
  double energy_disjoint = 0.0;
  double energy_bridged = 0.0;
};

/// Direct minimization of the discrete 1D functional over the two symmetric
/// candidate families: disjoint wedges parameterized by the positivity
/// radius, and bridged profiles parameterized by the trace at 0. Candidates
/// are piecewise-linear on an n-interval grid (kinks handled exactly);
/// each family is minimized by golden-section search with a final parabolic
/// refinement.
Solve1DResult solve_1d_numeric(double beta, double eps, int n);

inline const char* winner_name(Winner1D w) {
  return w == Winner1D::Bridged ? "bridged" : "disjoint";
}

}  // namespace robinfb
