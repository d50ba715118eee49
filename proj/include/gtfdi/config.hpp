#pragma once

#include <string>

#include "gtfdi/engine.hpp"

namespace gtfdi {

// flat `key=value` engine-parameter file; unknown keys are rejected
EngineParams params_from_kv(const std::string& text);
std::string params_to_kv(const EngineParams& params);
EngineParams load_params(const std::string& path);

}  // namespace gtfdi
