#pragma once

#include <array>
#include <vector>

#include "robinfb/core.hpp"

namespace robinfb {

/// A chain of face midpoints tracing a label-field isoline. Open chains end
/// at lattice corners; `start_contact`/`end_contact` mark ends that sit on a
/// cell outside both regions (for the interface chain this is the point where
/// it meets the free boundary).
struct Chain {
  std::vector<std::array<double, 2>> pts;
  bool closed = false;
  bool start_contact = false;
  bool end_contact = false;
};

/// Chains separating the two phase groups inside the labeled set.
std::vector<Chain> extract_interface_chains(const State& state);

/// Chains separating the labeled set from unlabeled cells.
std::vector<Chain> extract_free_boundary_chains(const State& state);

/// Principal direction of a small point cloud (total least squares).
std::array<double, 2> principal_direction(
    const std::vector<std::array<double, 2>>& pts);

}  // namespace robinfb
