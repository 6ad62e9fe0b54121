#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbatt/hamiltonians.hpp"
#include "qbatt/operators.hpp"

namespace qbatt {

enum class InitialState { GibbsHS, GibbsMinusHS, PassiveOfPi, MaximallyMixed, Custom };

struct ScenarioConfig {
    std::string name;  // preset name when loaded from one
    ModelSpec model;
    double beta = 1.0;
    double tau = 0.1;
    double gap = 0.0;
    InitialState initial_state = InitialState::GibbsHS;
    std::optional<Matrix> initial_custom;
    int steps = 10000;
    double conv_tol = 1e-12;
    std::uint64_t seed = 0;
    std::string trajectory_csv;  // optional output paths carried in the config
    std::string summary_json;
};

struct SweepConfig {
    ScenarioConfig base;
    std::string axis;  // beta | h | J | a | tau | epsilon
    std::vector<double> values;
    double e0_center = 0.0;             // epsilon axis only
    std::vector<double> offsets;        // epsilon axis only
};

/// Matrix literal convention: nested arrays of [re, im] pairs, row-major.
Matrix matrix_from_json(const nlohmann::json& j, const std::string& context);
nlohmann::json matrix_to_json(const Matrix& m);

ScenarioConfig scenario_from_json(const nlohmann::json& j);
SweepConfig sweep_from_json(const nlohmann::json& j);

/// Parse a config file's text (reports line/field diagnostics on errors).
ScenarioConfig load_scenario(const std::string& text);
SweepConfig load_sweep(const std::string& text);

/// Embedded named scenarios: "fig1", "two_qubit_default".
ScenarioConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Shortest round-trip decimal representation; locale independent.
std::string format_double(double x);

}  // namespace qbatt
