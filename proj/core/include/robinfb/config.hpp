#pragma once

#include <string>
#include <vector>

#include "robinfb/core.hpp"
#include "robinfb/diagnostics.hpp"
#include "robinfb/solver2d.hpp"

namespace robinfb {

enum class RunMode { Solve1D, Solve2D, Sweep1D, Sweep2D, Diagnose };

struct RunConfig {
  RunMode mode = RunMode::Solve1D;
  std::string out_dir = ".";
  int workers = 1;
  ProblemSpec spec;          // 2D modes
  bool has_spec = false;
  SolverParams params;
  DiagnosticsOptions diagnostics;
  // 1D parameter points (singletons for solve1d, grids for sweep1d)
  std::vector<double> oned_beta = {1.0};
  std::vector<double> oned_eps = {0.0};
  int oned_n = 4096;
  // 2D sweep overrides applied on top of spec
  std::vector<double> sweep_beta;
  std::vector<double> sweep_lambda;
  std::string state_path;    // optional input for diagnose
};

/// Parses and validates a config document. Throws InputError carrying the
/// offending field path.
RunConfig parse_config(const std::string& json_text);

/// JSON schema of the config document, defaults included.
std::string config_schema();

const char* mode_name(RunMode mode);

}  // namespace robinfb
