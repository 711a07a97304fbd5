#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "robinfb/core.hpp"
#include "robinfb/energy.hpp"

namespace robinfb {

/// Cells with u above this are counted as positive in reports; the label
/// field stays authoritative for the volume term.
inline constexpr double kUFloor = 1e-10;

struct AnnealParams {
  bool enabled = false;
  double t0 = 0.0;
};

struct SolverParams {
  double eps0 = 0.1;        // initial perimeter weight
  double eps_factor = 0.5;  // multiplicative decay per continuation level
  int eps_steps = 12;
  double u_tol = 1e-10;     // relative residual of the linear solve
  int max_sweeps = 200;     // label-sweep cap per level
  std::uint64_t seed = 12345;
  AnnealParams anneal;
  double r_init = 0.0;      // seed-label dilation radius; 0 = automatic
  bool forbid_interface = false;  // reject flips that create interface faces

  void validate_or_throw() const {
    if (eps0 <= 0.0) throw InputError("eps0", "eps0 must be > 0");
    if (eps_factor <= 0.0 || eps_factor >= 1.0)
      throw InputError("eps_factor", "eps_factor must be in (0,1)");
    if (eps_steps < 1) throw InputError("eps_steps", "eps_steps must be >= 1");
    if (u_tol <= 0.0) throw InputError("u_tol", "u_tol must be > 0");
    if (max_sweeps < 1)
      throw InputError("max_sweeps", "max_sweeps must be >= 1");
  }
};

enum class Branch { Disjoint, Bridged };

struct TraceRecord {
  double eps = 0.0;
  int sweep = 0;
  int flips = 0;
  EnergyBreakdown energy;
};

struct SolveTrace {
  std::vector<TraceRecord> records;
  bool margin_warning = false;

  std::string to_csv() const;
};

/// Minimizes the field part (Dirichlet + beta * interface) at fixed labels:
/// one SPD solve with the five-point stencil plus a beta*h/2 face coupling on
/// interface faces. The result is clamped to [0, g].
State u_step(const State& state, double beta, double lambda,
             double u_tol = 1e-10);

/// Exact local change of J_eps for relabeling one cell. Flips to None force
/// u = 0 there; flips into a phase set the cell to the one-point optimum of
/// the local quadratic (clamped to [0, g]), which is what lets supports grow.
/// Returns the energy change and writes the cell value through u_new.
double flip_delta(const State& state, int i, int j, Label to, double beta,
                  double lambda, double eps, double* u_new);

struct SweepResult {
  bool improved = false;
  int flips = 0;
};

/// One full pass over non-fixed cells in seeded random order, applying the
/// best strictly improving relabeling at each cell.
SweepResult label_sweep(State& state, double beta, double lambda, double eps,
                        std::mt19937_64& rng, const SolverParams& params,
                        double temperature = 0.0);

/// Alternates u_step and label sweeps at fixed eps until a sweep makes no
/// flip twice in a row or max_sweeps is reached. Appends one record per
/// sweep to trace.
State minimize_at_eps(State state, double beta, double lambda, double eps,
                      const SolverParams& params, std::mt19937_64& rng,
                      std::vector<TraceRecord>& trace);

/// Nearest-set seed labeling on a dilation of the fixed sets. The dilation
/// radius 0 picks the default for the branch: 0.3 * set distance for the
/// disjoint start, a gap-covering radius for the bridged start.
State initialize_labels(const ProblemSpec& spec, const SolverParams& params,
                        Branch branch = Branch::Disjoint);

struct ContinuationResult {
  State state;
  SolveTrace trace;
  double eps_final = 0.0;
  Branch winner = Branch::Disjoint;
  // final energies (at eps_final) of the two warm-start branches; the
  // bridged entries are unset in one-phase or interface-forbidden runs
  double energy_disjoint_branch = 0.0;
  double energy_bridged_branch = 0.0;
  bool ran_bridged_branch = false;
  State disjoint_state;  // final state of the disjoint-seeded branch
};

/// Decreasing-eps schedule with warm starts. Greedy descent cannot cross
/// the barrier between the disjoint and bridged basins, so both seeds are
/// run and the lower final energy wins. The final state has {u > kUFloor}
/// equal to the labeled set.
ContinuationResult continuation(const ProblemSpec& spec,
                                const SolverParams& params);

/// True when a positive or labeled cell lies within 10 cells of the box
/// boundary (the discrete compact-support margin).
bool touches_margin_ring(const State& state);

}  // namespace robinfb
