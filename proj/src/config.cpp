#include "qbatt/config.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "qbatt/errors.hpp"

namespace qbatt {

namespace {

using nlohmann::json;

const json& require_field(const json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw config_error("config: missing field '" + ctx + key + "'");
    }
    return *it;
}

double require_number(const json& j, const char* key, const std::string& ctx) {
    const json& field = require_field(j, key, ctx);
    if (!field.is_number()) {
        throw config_error("config: field '" + ctx + key + "' must be a number");
    }
    return field.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
    auto it = j.find(key);
    if (it == j.end()) {
        return fallback;
    }
    if (!it->is_number()) {
        throw config_error(std::string("config: field '") + key + "' must be a number");
    }
    return it->get<double>();
}

}  // namespace

Matrix matrix_from_json(const json& j, const std::string& context) {
    if (!j.is_array() || j.empty()) {
        throw config_error("config: '" + context + "' must be a non-empty array of rows");
    }
    const std::size_t n = j.size();
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const json& row = j[r];
        if (!row.is_array() || row.size() != n) {
            throw config_error("config: '" + context + "' row " + std::to_string(r) +
                               " must have " + std::to_string(n) + " entries (square matrix)");
        }
        for (std::size_t c = 0; c < n; ++c) {
            const json& entry = row[c];
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
                !entry[1].is_number()) {
                throw config_error("config: '" + context + "' entry (" + std::to_string(r) + "," +
                                   std::to_string(c) + ") must be an [re, im] pair");
            }
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                Complex(entry[0].get<double>(), entry[1].get<double>());
        }
    }
    if (!m.allFinite()) {
        throw config_error("config: '" + context + "' has non-finite entries");
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

ModelSpec model_from_json(const json& j) {
    if (!j.is_object()) {
        throw config_error("config: 'model' must be an object");
    }
    const json& variant = require_field(j, "variant", "model.");
    if (!variant.is_string()) {
        throw config_error("config: 'model.variant' must be a string");
    }
    ModelSpec spec;
    const std::string name = variant.get<std::string>();
    if (name == "single_qubit") {
        spec.variant = ModelVariant::SingleQubit;
        spec.h = require_number(j, "h", "model.");
        spec.a = require_number(j, "a", "model.");
    } else if (name == "two_qubit") {
        spec.variant = ModelVariant::TwoQubit;
        spec.h = require_number(j, "h", "model.");
        spec.j = require_number(j, "J", "model.");
    } else if (name == "custom") {
        spec.variant = ModelVariant::Custom;
        spec.custom_h_s = matrix_from_json(require_field(j, "h_s", "model."), "model.h_s");
        spec.custom_h_a = matrix_from_json(require_field(j, "h_a", "model."), "model.h_a");
        spec.custom_v = matrix_from_json(require_field(j, "v", "model."), "model.v");
    } else {
        throw config_error("config: unknown model variant '" + name +
                           "' (expected single_qubit, two_qubit or custom)");
    }
    return spec;
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j) {
    if (!j.is_object()) {
        throw config_error("config: scenario must be a JSON object");
    }
    ScenarioConfig cfg;
    cfg.model = model_from_json(require_field(j, "model", ""));
    cfg.beta = require_number(j, "beta", "");
    cfg.tau = require_number(j, "tau", "");
    cfg.gap = number_or(j, "gap", 0.0);

    if (auto it = j.find("initial_state"); it != j.end()) {
        if (it->is_array()) {
            cfg.initial_state = InitialState::Custom;
            cfg.initial_custom = matrix_from_json(*it, "initial_state");
        } else if (it->is_string()) {
            const std::string s = it->get<std::string>();
            if (s == "gibbs_HS") {
                cfg.initial_state = InitialState::GibbsHS;
            } else if (s == "gibbs_minus_HS") {
                cfg.initial_state = InitialState::GibbsMinusHS;
            } else if (s == "passive_of_pi") {
                cfg.initial_state = InitialState::PassiveOfPi;
            } else if (s == "maximally_mixed") {
                cfg.initial_state = InitialState::MaximallyMixed;
            } else {
                throw config_error("config: unknown initial_state '" + s + "'");
            }
        } else {
            throw config_error("config: 'initial_state' must be a string or a matrix literal");
        }
    }

    if (auto it = j.find("steps"); it != j.end()) {
        if (!it->is_number_integer() || it->get<long long>() < 1) {
            throw config_error("config: 'steps' must be a positive integer");
        }
        cfg.steps = it->get<int>();
    }
    cfg.conv_tol = number_or(j, "conv_tol", cfg.conv_tol);
    if (!(cfg.conv_tol > 0.0)) {
        throw config_error("config: 'conv_tol' must be positive");
    }
    if (auto it = j.find("seed"); it != j.end()) {
        if (!it->is_number_integer()) {
            throw config_error("config: 'seed' must be an integer");
        }
        cfg.seed = it->get<std::uint64_t>();
    }
    if (auto it = j.find("outputs"); it != j.end()) {
        if (!it->is_object()) {
            throw config_error("config: 'outputs' must be an object");
        }
        if (auto t = it->find("trajectory_csv"); t != it->end()) {
            cfg.trajectory_csv = t->get<std::string>();
        }
        if (auto s = it->find("summary_json"); s != it->end()) {
            cfg.summary_json = s->get<std::string>();
        }
    }
    return cfg;
}

SweepConfig sweep_from_json(const json& j) {
    if (!j.is_object()) {
        throw config_error("config: sweep must be a JSON object");
    }
    SweepConfig sweep;
    sweep.base = scenario_from_json(require_field(j, "base", ""));
    const json& axis = require_field(j, "axis", "");
    if (!axis.is_string()) {
        throw config_error("config: 'axis' must be a string");
    }
    sweep.axis = axis.get<std::string>();
    static const char* known[] = {"beta", "h", "J", "a", "tau", "epsilon"};
    bool ok = false;
    for (const char* k : known) {
        ok = ok || sweep.axis == k;
    }
    if (!ok) {
        throw config_error("config: unknown sweep axis '" + sweep.axis + "'");
    }
    const json& values = require_field(j, "values", "");
    if (!values.is_array() || values.empty()) {
        throw config_error("config: 'values' must be a non-empty array");
    }
    for (const json& v : values) {
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            throw config_error("config: sweep values must be finite numbers");
        }
        sweep.values.push_back(v.get<double>());
    }
    if (sweep.axis == "epsilon") {
        const json& nb = require_field(j, "narrow_band", "");
        sweep.e0_center = number_or(nb, "e0_center", 0.0);
        const json& offsets = require_field(nb, "offsets", "narrow_band.");
        if (!offsets.is_array()) {
            throw config_error("config: 'narrow_band.offsets' must be an array");
        }
        for (const json& v : offsets) {
            if (!v.is_number()) {
                throw config_error("config: narrow_band offsets must be numbers");
            }
            sweep.offsets.push_back(v.get<double>());
        }
    }
    return sweep;
}

namespace {

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config: JSON parse error: ") + e.what());
    }
}

}  // namespace

ScenarioConfig load_scenario(const std::string& text) {
    return scenario_from_json(parse_text(text));
}

SweepConfig load_sweep(const std::string& text) { return sweep_from_json(parse_text(text)); }

ScenarioConfig preset(const std::string& name) {
    ScenarioConfig cfg;
    cfg.name = name;
    if (name == "fig1") {
        cfg.model.variant = ModelVariant::SingleQubit;
        cfg.model.h = 1.5;
        cfg.model.a = std::sqrt(10.0);
        cfg.beta = 1.0;
        cfg.tau = 0.1;
        cfg.initial_state = InitialState::GibbsHS;
        cfg.steps = 10000;
        cfg.conv_tol = 1e-10;
        return cfg;
    }
    if (name == "two_qubit_default") {
        cfg.model.variant = ModelVariant::TwoQubit;
        cfg.model.h = 0.5;
        cfg.model.j = 1.0;
        cfg.beta = 2.0;
        cfg.tau = 0.1;
        cfg.initial_state = InitialState::GibbsHS;
        cfg.steps = 20000;
        cfg.conv_tol = 1e-10;
        return cfg;
    }
    throw config_error("config: unknown preset '" + name + "' (available: fig1, "
                       "two_qubit_default)");
}

std::vector<std::string> preset_names() { return {"fig1", "two_qubit_default"}; }

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace qbatt
