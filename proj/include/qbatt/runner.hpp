#pragma once

#include <string>

#include "qbatt/collision.hpp"
#include "qbatt/config.hpp"

namespace qbatt {

struct SimulateOutput {
    std::string trajectory_csv;
    std::string summary_json;
};

CollisionModel model_from_config(const ScenarioConfig& cfg);
DensityMatrix initial_state(const ScenarioConfig& cfg, const CollisionModel& model);

/// The four CLI verbs, producing the exact output bytes they write to disk.
SimulateOutput run_simulate(const ScenarioConfig& cfg);
std::string run_report(const ScenarioConfig& cfg);
std::string run_sweep(const SweepConfig& sweep);
std::string run_find_h0(const ScenarioConfig& cfg);

}  // namespace qbatt
