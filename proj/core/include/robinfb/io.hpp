#pragma once

#include <string>

#include "robinfb/core.hpp"
#include "robinfb/diagnostics.hpp"

namespace robinfb {

std::string state_to_json(const State& state);
State state_from_json(const std::string& text);

std::string spec_to_json(const ProblemSpec& spec);
ProblemSpec spec_from_json(const std::string& text);

/// 8-bit binary PGM; u is scaled by 255/g and labels are mapped to
/// 0/96/160/224/255. Top row first.
std::string pgm_from_u(const State& state);
std::string pgm_from_labels(const State& state);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

std::string fb_residuals_csv(const DiagnosticsReport& rep);
std::string robin_residuals_csv(const DiagnosticsReport& rep);
std::string weiss_csv(const DiagnosticsReport& rep);
std::string blowup_csv(const DiagnosticsReport& rep);
std::string density_growth_csv(const DiagnosticsReport& rep);
std::string contact_angles_csv(const DiagnosticsReport& rep);

}  // namespace robinfb
