#pragma once

#include "json.hpp"
#include "robinfb/core.hpp"

namespace robinfb {

// shared between io.cpp and config.cpp; not part of the public surface
ProblemSpec spec_from_json_value(const nlohmann::json& j);

}  // namespace robinfb
