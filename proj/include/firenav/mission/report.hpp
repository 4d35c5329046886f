#pragma once

#include <string>

#include <json.hpp>

namespace firenav::mission {

/// Pure reduction of the trace files in a run directory into the run
/// report; every number is recomputable from the traces alone.
nlohmann::json build_report(const std::string& run_dir);

}  // namespace firenav::mission
