#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbatt/errors.hpp"
#include "qbatt/runner.hpp"

using namespace qbatt;
using nlohmann::json;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

const char* kCustomNessConfig = R"({
  "model": {
    "variant": "custom",
    "h_s": [[[0.75, 0], [0, 0]], [[0, 0], [-0.75, 0]]],
    "h_a": [[[0.75, 0], [0, 0]], [[0, 0], [-0.75, 0]]],
    "v": [[[0,0],[0,0],[0,0],[1,0]],
           [[0,0],[0,0],[1,0],[0,0]],
           [[0,0],[1,0],[0,0],[0,0]],
           [[1,0],[0,0],[0,0],[0,0]]]
  },
  "beta": 1.0,
  "tau": 0.1,
  "steps": 2000,
  "conv_tol": 1e-10
})";

}  // namespace

TEST_CASE("scenario config parsing") {
    const std::string text = R"({
      "model": {"variant": "single_qubit", "h": 1.5, "a": 3.0},
      "beta": 1.0, "tau": 0.1, "gap": 0.2,
      "initial_state": "gibbs_minus_HS",
      "steps": 500, "conv_tol": 1e-9, "seed": 11,
      "outputs": {"trajectory_csv": "t.csv", "summary_json": "s.json"}
    })";
    const ScenarioConfig cfg = load_scenario(text);
    CHECK(cfg.model.variant == ModelVariant::SingleQubit);
    CHECK(cfg.model.h == 1.5);
    CHECK(cfg.gap == 0.2);
    CHECK(cfg.initial_state == InitialState::GibbsMinusHS);
    CHECK(cfg.steps == 500);
    CHECK(cfg.seed == 11);
    CHECK(cfg.trajectory_csv == "t.csv");

    SUBCASE("missing fields are reported by name") {
        try {
            load_scenario(R"({"model": {"variant": "single_qubit", "h": 1.5, "a": 1.0}})");
            FAIL("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find("beta") != std::string::npos);
        }
    }

    SUBCASE("bad JSON reports a parse diagnostic") {
        CHECK_THROWS_AS(load_scenario("{ not json"), config_error);
    }

    SUBCASE("unknown variants and states are rejected") {
        CHECK_THROWS_AS(
            load_scenario(R"({"model": {"variant": "bogus"}, "beta": 1, "tau": 0.1})"),
            config_error);
        CHECK_THROWS_AS(load_scenario(R"({
            "model": {"variant": "single_qubit", "h": 1.5, "a": 1.0},
            "beta": 1, "tau": 0.1, "initial_state": "bogus"})"),
                        config_error);
    }

    SUBCASE("non-physical parameters are rejected at build time") {
        const ScenarioConfig bad = load_scenario(R"({
            "model": {"variant": "single_qubit", "h": -1.5, "a": 1.0},
            "beta": 1, "tau": 0.1})");
        CHECK_THROWS_AS(model_from_config(bad), std::invalid_argument);
    }

    SUBCASE("steps and conv_tol are validated") {
        CHECK_THROWS_AS(load_scenario(R"({
            "model": {"variant": "single_qubit", "h": 1.5, "a": 1.0},
            "beta": 1, "tau": 0.1, "steps": 0})"),
                        config_error);
        CHECK_THROWS_AS(load_scenario(R"({
            "model": {"variant": "single_qubit", "h": 1.5, "a": 1.0},
            "beta": 1, "tau": 0.1, "conv_tol": -1e-9})"),
                        config_error);
    }
}

TEST_CASE("matrix literals") {
    const json j = json::parse(R"([[[1,0],[0,0]],[[0,0],[-1,0]]])");
    const Matrix m = matrix_from_json(j, "test");
    CHECK(m(0, 0) == Complex(1, 0));
    CHECK(m(1, 1) == Complex(-1, 0));

    const Matrix back = matrix_from_json(matrix_to_json(m), "round");
    CHECK((back - m).norm() == 0.0);

    CHECK_THROWS_AS(matrix_from_json(json::parse(R"([[[1,0]],[[0,0],[1,0]]])"), "bad"),
                    config_error);
    CHECK_THROWS_AS(matrix_from_json(json::parse(R"([[[1,0],[0]],[[0,0],[1,0]]])"), "bad"),
                    config_error);
    CHECK_THROWS_AS(matrix_from_json(json::parse("[]"), "bad"), config_error);
}

TEST_CASE("presets") {
    const ScenarioConfig fig1 = preset("fig1");
    CHECK(fig1.model.h == 1.5);
    CHECK(fig1.model.a == doctest::Approx(std::sqrt(10.0)).epsilon(1e-15));
    CHECK(fig1.beta == 1.0);
    CHECK(fig1.tau == 0.1);

    CHECK(preset("two_qubit_default").model.j == 1.0);
    CHECK_THROWS_AS(preset("bogus"), config_error);
    CHECK(preset_names().size() == 2);
}

TEST_CASE("simulate: population-inversion trajectory") {
    const SimulateOutput out = run_simulate(preset("fig1"));

    const auto rows = parse_csv(out.trajectory_csv);
    CHECK(rows.front() ==
          std::vector<std::string>{"n", "p1", "p2", "W", "Q", "dE", "dS", "Sigma"});
    CHECK(rows[1][0] == "0");
    const double p2_initial = std::stod(rows[1][2]);
    const double p2_final = std::stod(rows.back()[2]);
    CHECK(p2_initial == doctest::Approx(std::exp(-0.75) / (2 * std::cosh(0.75))).epsilon(1e-12));
    CHECK(p2_final ==
          doctest::Approx(std::exp(0.75) / (2 * std::cosh(0.75))).epsilon(1e-6));

    const json summary = json::parse(out.summary_json);
    CHECK(summary["converged"] == true);
    CHECK(summary["equilibrium"]["found"] == true);
    CHECK(summary["equilibrium"]["valid"] == true);
    const std::vector<double> h0_spectrum = summary["equilibrium"]["h0_spectrum"];
    CHECK(h0_spectrum[0] == doctest::Approx(-0.75).epsilon(1e-10));
    CHECK(h0_spectrum[1] == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(summary["fixed_point"]["degenerate"] == false);

    SUBCASE("byte-identical across runs") {
        const SimulateOutput again = run_simulate(preset("fig1"));
        CHECK(out.trajectory_csv == again.trajectory_csv);
        CHECK(out.summary_json == again.summary_json);
    }
}

TEST_CASE("simulate: starting at equilibrium produces an all-zero ledger") {
    ScenarioConfig cfg = preset("fig1");
    cfg.initial_state = InitialState::GibbsMinusHS;
    const SimulateOutput out = run_simulate(cfg);
    const auto rows = parse_csv(out.trajectory_csv);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        CHECK(std::abs(std::stod(rows[r][3])) <= 1e-11);  // W
        CHECK(std::abs(std::stod(rows[r][4])) <= 1e-11);  // Q
        CHECK(std::abs(std::stod(rows[r][7])) <= 1e-11);  // Sigma
    }
}

TEST_CASE("simulate: two-qubit scenario lands on the eigentable populations") {
    const SimulateOutput out = run_simulate(preset("two_qubit_default"));
    const json summary = json::parse(out.summary_json);
    CHECK(summary["converged"] == true);
    const std::vector<double> pops = summary["final_populations"];
    const double beta_h = 2.0 * 0.5;
    const double z0 = 2.0 + 2.0 * std::cosh(beta_h);
    CHECK(pops[0] == doctest::Approx(1.0 / z0).epsilon(1e-6));
    CHECK(pops[1] == doctest::Approx(std::exp(beta_h) / z0).epsilon(1e-6));
    CHECK(pops[2] == doctest::Approx(std::exp(-beta_h) / z0).epsilon(1e-6));
    CHECK(pops[3] == doctest::Approx(1.0 / z0).epsilon(1e-6));
}

TEST_CASE("simulate: passive initial state recharges the battery") {
    ScenarioConfig cfg = preset("fig1");
    cfg.initial_state = InitialState::PassiveOfPi;
    cfg.conv_tol = 1e-12;
    const SimulateOutput out = run_simulate(cfg);
    const json summary = json::parse(out.summary_json);
    const double total_work = summary["totals"]["work"];
    const double w_r = 2.0 * 1.5 * std::tanh(0.75);  // recharging work
    CHECK(total_work == doctest::Approx(w_r).epsilon(1e-9));
}

TEST_CASE("report: single-qubit closed forms") {
    const std::string text = run_report(preset("fig1"));
    const json rep = json::parse(text);
    const double erg = 1.5 * std::tanh(0.75);
    CHECK(rep["report"]["ergotropy"].get<double>() == doctest::Approx(erg).epsilon(1e-12));
    CHECK(rep["report"]["eta"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep["report"]["w_r"].get<double>() == doctest::Approx(2 * erg).epsilon(1e-12));
    CHECK(rep["report"]["q_r"].get<double>() == doctest::Approx(-erg).epsilon(1e-12));
    CHECK(rep["report"]["permutation"] == json::array({2, 1}));
    CHECK(rep["report"]["beta_star"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rep["closed_form"]["max_abs_difference"].get<double>() <= 1e-11);
    CHECK(rep["dominance_check"]["within_ergotropy"] == true);
    CHECK(rep["dominance_check"]["max_extracted"].get<double>() <= erg + 1e-10);

    SUBCASE("deterministic") { CHECK(run_report(preset("fig1")) == text); }

    SUBCASE("the seed steers the dominance sample") {
        ScenarioConfig seeded = preset("fig1");
        seeded.seed = 12345;
        const json other = json::parse(run_report(seeded));
        CHECK(other["dominance_check"]["seed"] == 12345);
        CHECK(other["dominance_check"]["max_extracted"].get<double>() !=
              rep["dominance_check"]["max_extracted"].get<double>());
        CHECK(other["dominance_check"]["within_ergotropy"] == true);
    }
}

TEST_CASE("report: two-qubit closed forms and the low-temperature limit") {
    const json rep = json::parse(run_report(preset("two_qubit_default")));
    CHECK(rep["report"]["eta"].get<double>() == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(rep["report"]["permutation"] == json::array({2, 1, 4, 3}));
    CHECK(rep["closed_form"]["max_abs_difference"].get<double>() <= 1e-11);

    ScenarioConfig cold = preset("two_qubit_default");
    cold.model.h = 0.05;
    cold.model.j = 1.0;
    cold.beta = 200.0;
    const json crep = json::parse(run_report(cold));
    const double erg = crep["report"]["ergotropy"].get<double>();
    CHECK(std::abs(erg - 1.95) / 1.95 <= 0.01);  // -> 2J - h as beta*h >> 1
}

TEST_CASE("report: NESS models are rejected with the dissipation rate") {
    const ScenarioConfig cfg = load_scenario(kCustomNessConfig);
    CHECK_THROWS_AS(run_report(cfg), physics_error);
    try {
        run_report(cfg);
    } catch (const physics_error& e) {
        CHECK(std::string(e.what()).find("entropy production") != std::string::npos);
    }
}

TEST_CASE("find-h0 outputs") {
    const json single = json::parse(run_find_h0(preset("fig1")));
    CHECK(single["classification"] == "equilibrium");
    CHECK(single["h0_spectrum"][0].get<double>() == doctest::Approx(-0.75).epsilon(1e-10));
    CHECK(single["h0_spectrum"][1].get<double>() == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(single["null_space_dim"] == 0);

    const json two = json::parse(run_find_h0(preset("two_qubit_default")));
    const std::vector<double> spectrum = two["h0_spectrum"];
    CHECK(spectrum[0] == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(std::abs(spectrum[1]) <= 1e-10);
    CHECK(std::abs(spectrum[2]) <= 1e-10);
    CHECK(spectrum[3] == doctest::Approx(0.5).epsilon(1e-10));

    const json ness = json::parse(run_find_h0(load_scenario(kCustomNessConfig)));
    CHECK(ness["classification"] == "ness");
    CHECK(ness["sigma_rate"].get<double>() > 1e-6);
    CHECK_FALSE(ness.contains("h0_spectrum"));
}

TEST_CASE("sweep: closed-form rows over h") {
    SweepConfig sweep;
    sweep.base = preset("two_qubit_default");
    sweep.axis = "h";
    sweep.values = {0.2, 0.6, 1.0, 1.4, 1.8};
    const std::string csv = run_sweep(sweep);
    const auto rows = parse_csv(csv);
    CHECK(rows.front() ==
          std::vector<std::string>{"h", "ergotropy", "w_r", "q_r", "eta", "sigma_rate"});
    REQUIRE(rows.size() == 6);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const double h = std::stod(rows[r][0]);
        const double eta = std::stod(rows[r][4]);
        CHECK(std::abs(eta - (1.0 - h / 2.0)) <= 1e-10);
        CHECK(std::stod(rows[r][5]) <= 1e-9);  // equilibrium: no dissipation
    }

    SUBCASE("thread-count independent bytes") {
        setenv("QBATT_THREADS", "1", 1);
        const std::string serial = run_sweep(sweep);
        unsetenv("QBATT_THREADS");
        CHECK(serial == csv);
    }
}

TEST_CASE("sweep: single-value sweep matches the report") {
    SweepConfig sweep;
    sweep.base = preset("two_qubit_default");
    sweep.axis = "h";
    sweep.values = {0.5};
    const auto rows = parse_csv(run_sweep(sweep));
    REQUIRE(rows.size() == 2);
    const json rep = json::parse(run_report(preset("two_qubit_default")));
    CHECK(std::stod(rows[1][1]) ==
          doctest::Approx(rep["report"]["ergotropy"].get<double>()).epsilon(1e-13));
    CHECK(std::stod(rows[1][2]) ==
          doctest::Approx(rep["report"]["w_r"].get<double>()).epsilon(1e-13));
    CHECK(std::stod(rows[1][4]) ==
          doctest::Approx(rep["report"]["eta"].get<double>()).epsilon(1e-13));
}

TEST_CASE("sweep: epsilon axis drives the narrow-band battery") {
    const std::string text = R"({
      "base": {
        "model": {"variant": "custom",
          "h_s": [[[-1.5,0],[0,0],[0,0],[0,0]],
                   [[0,0],[-0.4,0],[0,0],[0,0]],
                   [[0,0],[0,0],[0.7,0],[0,0]],
                   [[0,0],[0,0],[0,0],[2.0,0]]],
          "h_a": [[[0.5,0],[0,0]],[[0,0],[-0.5,0]]],
          "v":   [[[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                   [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                   [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                   [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                   [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                   [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                   [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                   [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]]
        },
        "beta": 1.0, "tau": 0.1
      },
      "axis": "epsilon",
      "values": [0.1, 0.0316227766016838, 0.01, 0.00316227766016838, 0.001],
      "narrow_band": {"e0_center": 0.0, "offsets": [1.0, 0.4, -0.2, -0.9]}
    })";
    const SweepConfig sweep = load_sweep(text);
    const auto rows = parse_csv(run_sweep(sweep));
    REQUIRE(rows.size() == 6);
    double prev_eta = 0.0, prev_erg = 1e9;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const double erg = std::stod(rows[r][1]);
        const double eta = std::stod(rows[r][4]);
        CHECK(eta > prev_eta);   // eta increases toward 1 as eps decreases
        CHECK(erg < prev_erg);   // ergotropy shrinks with eps
        prev_eta = eta;
        prev_erg = erg;
    }
    CHECK(prev_eta > 0.999);
}

TEST_CASE("sweep: axis/model mismatches are config errors") {
    SweepConfig sweep;
    sweep.base = preset("fig1");
    sweep.axis = "J";
    sweep.values = {1.0};
    CHECK_THROWS_AS(run_sweep(sweep), config_error);

    CHECK_THROWS_AS(load_sweep(R"({"base": {"model": {"variant": "single_qubit",
        "h": 1.5, "a": 1.0}, "beta": 1, "tau": 0.1}, "axis": "bogus", "values": [1]})"),
                    config_error);
    CHECK_THROWS_AS(load_sweep(R"({"base": {"model": {"variant": "single_qubit",
        "h": 1.5, "a": 1.0}, "beta": 1, "tau": 0.1}, "axis": "h", "values": []})"),
                    config_error);
}

TEST_CASE("custom initial states are validated") {
    ScenarioConfig cfg = preset("fig1");
    cfg.initial_state = InitialState::Custom;
    cfg.initial_custom = Matrix::Identity(3, 3) / 3.0;
    CHECK_THROWS_AS(run_simulate(cfg), config_error);

    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = 2.0;
    bad(1, 1) = -1.0;
    cfg.initial_custom = bad;
    CHECK_THROWS_AS(run_simulate(cfg), config_error);

    Matrix fine = Matrix::Zero(2, 2);
    fine(0, 0) = 0.25;
    fine(1, 1) = 0.75;
    cfg.initial_custom = fine;
    const json summary = json::parse(run_simulate(cfg).summary_json);
    CHECK(summary["converged"] == true);
}
