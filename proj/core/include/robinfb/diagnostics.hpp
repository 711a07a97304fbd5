#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "robinfb/core.hpp"
#include "robinfb/polyline.hpp"

namespace robinfb {

struct FbResidual {
  int i = 0;
  int j = 0;
  double grad_mag = 0.0;
  double residual = 0.0;
};

struct RobinResidual {
  // face between (i,j) and its +x or +y neighbor
  int i = 0;
  int j = 0;
  int axis = 0;  // 0: x-face, 1: y-face
  double grad1 = 0.0;
  double grad2 = 0.0;
  double trace = 0.0;
  double residual = 0.0;
  bool degenerate = false;
};

struct WeissSample {
  double x0 = 0.0;
  double y0 = 0.0;
  double r = 0.0;
  double w = 0.0;
};

struct WeissFit {
  double c0 = 0.0;
  double gamma = 0.0;
  double max_violation = 0.0;
  bool flat = false;
};

struct BlowupSample {
  double x0 = 0.0;
  double y0 = 0.0;
  double r = 0.0;
  double nu_x = 0.0;
  double nu_y = 0.0;
  double linf = 0.0;
};

struct DensityGrowthSample {
  double x0 = 0.0;
  double y0 = 0.0;
  double r = 0.0;
  double density = 0.0;      // zero-set volume fraction of the ball
  double sup_over_r = 0.0;   // sup_{B_r} u / r
};

struct ContactAngleSample {
  double x = 0.0;
  double y = 0.0;
  double angle_deg = 0.0;  // unsigned angle between tangent lines, [0, 90]
};

/// Free-boundary cells: labeled cells with an unlabeled 4-neighbor.
std::vector<std::array<int, 2>> free_boundary_cells(const State& state);

/// | |grad u| - sqrt(lambda) | at free-boundary cells, one-sided stencils
/// into the labeled side; cells near the two-phase interface are skipped.
std::vector<FbResidual> free_boundary_residual(const State& state,
                                               double lambda);

/// | |grad u_1| + |grad u_2| - beta * trace | per interface face, with
/// one-sided gradients from each phase evaluated at the face.
std::vector<RobinResidual> robin_residual(const State& state, double beta);

/// Weiss boundary-adjusted energy of the rescaling u(x0 + r x)/r, evaluated
/// on a fixed 64x64 reference grid over the unit ball (midpoint quadrature;
/// boundary term by trapezoid on 256 circle samples).
double weiss_energy(const State& state, double x0, double y0, double r,
                    double lambda);

inline double weiss_theta(double lambda) {
  return lambda * 3.14159265358979323846 / 2.0;
}

WeissFit weiss_decay_fit(const State& state, double x0, double y0,
                         std::span<const double> r_ladder, double lambda);

/// Best half-plane fit sqrt(lambda) (x . nu)_+ to the rescaled field: 720
/// scanned angles with golden-section refinement, sup-norm error over B_1.
BlowupSample blow_up_error(const State& state, double x0, double y0, double r,
                           double lambda);

std::vector<DensityGrowthSample> density_and_growth(
    const State& state, double lambda, std::span<const double> r_ladder,
    int max_points = 24);

double holder_seminorm(const State& state, double delta, double exponent,
                       std::uint64_t seed = 31337, int npairs = 100000);

double non_collapsing_check(const State& state, double delta);

std::vector<ContactAngleSample> contact_angle(const State& state);

/// Most negative change of beta * interface + eps * perimeters over all
/// single-cell and 2x2-block phase relabelings inside seeded random windows,
/// holding u fixed.
double interface_local_minimality_check(const State& state, double beta,
                                        double eps_final, int window = 8,
                                        int nwindows = 100,
                                        std::uint64_t seed = 777);

struct DiagnosticsOptions {
  bool fb = true;
  bool robin = true;
  bool weiss = true;
  bool blowup = true;
  bool density_growth = true;
  bool holder = true;
  bool non_collapsing = true;
  bool contact = true;
  bool minimality = true;
  bool conformal = true;
  double delta = 0.0;            // 0: 2h for non-collapsing, derived for holder
  double holder_exponent = 1.0 / 3.0;
  std::vector<double> r_ladder_h = {32.0, 16.0, 8.0};  // radii in cell units
  int max_points = 24;
  int minimality_window = 8;
  int minimality_windows = 100;
  std::uint64_t seed = 31337;
  // conformal ball; radius 0 picks one automatically near a contact point
  double ball_cx = 0.0;
  double ball_cy = 0.0;
  double ball_r = 0.0;
};

struct ConformalSummary {
  bool ran = false;
  double loop_residual_max = 0.0;
  double harmonic_defect_max = 0.0;
  double identity_residual = 0.0;
  bool conditioning_warning = false;
};

struct DiagnosticsReport {
  std::vector<FbResidual> fb_residuals;
  std::vector<RobinResidual> robin_residuals;
  std::vector<WeissSample> weiss;
  WeissFit weiss_fit;
  std::vector<BlowupSample> blowup_errors;
  std::vector<DensityGrowthSample> density_growth;
  double holder_seminorm_value = 0.0;
  double noncollapse_min = 0.0;
  std::vector<ContactAngleSample> contact_angles;
  double minimality_worst = 0.0;
  ConformalSummary flatten;

  double fb_residual_median() const;
  double robin_residual_median() const;
  std::string to_json() const;
};

DiagnosticsReport run_diagnostics(const State& state, double beta,
                                  double lambda, double eps_final,
                                  const DiagnosticsOptions& opts);

}  // namespace robinfb
