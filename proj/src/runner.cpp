#include "qbatt/runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qbatt/batch.hpp"
#include "qbatt/equilibrium.hpp"
#include "qbatt/ergotropy.hpp"
#include "qbatt/errors.hpp"

namespace qbatt {

namespace {

using nlohmann::json;

std::vector<double> populations(const Matrix& basis, const DensityMatrix& rho) {
    std::vector<double> pops(static_cast<std::size_t>(basis.cols()));
    for (Eigen::Index i = 0; i < basis.cols(); ++i) {
        pops[static_cast<std::size_t>(i)] =
            std::real(basis.col(i).dot(rho.matrix() * basis.col(i)));
    }
    return pops;
}

json json_number_or_null(double x) {
    if (std::isfinite(x)) {
        return x;
    }
    return nullptr;
}

std::vector<double> sorted_spectrum(const HermitianOperator& h) {
    auto eig = herm_eig(h);
    return std::vector<double>(eig.eigenvalues.data(), eig.eigenvalues.data() + eig.eigenvalues.size());
}

const char* initial_state_name(InitialState s) {
    switch (s) {
        case InitialState::GibbsHS: return "gibbs_HS";
        case InitialState::GibbsMinusHS: return "gibbs_minus_HS";
        case InitialState::PassiveOfPi: return "passive_of_pi";
        case InitialState::MaximallyMixed: return "maximally_mixed";
        case InitialState::Custom: return "custom";
    }
    return "unknown";
}

json scenario_echo(const ScenarioConfig& cfg) {
    json out;
    if (!cfg.name.empty()) {
        out["preset"] = cfg.name;
    }
    switch (cfg.model.variant) {
        case ModelVariant::SingleQubit:
            out["model"] = {{"variant", "single_qubit"}, {"h", cfg.model.h}, {"a", cfg.model.a}};
            break;
        case ModelVariant::TwoQubit:
            out["model"] = {{"variant", "two_qubit"}, {"h", cfg.model.h}, {"J", cfg.model.j}};
            break;
        case ModelVariant::Custom:
            out["model"] = {{"variant", "custom"},
                            {"system_dim", cfg.model.custom_h_s ? cfg.model.custom_h_s->rows() : 0},
                            {"ancilla_dim", cfg.model.custom_h_a ? cfg.model.custom_h_a->rows() : 0}};
            break;
    }
    out["beta"] = cfg.beta;
    out["tau"] = cfg.tau;
    out["gap"] = cfg.gap;
    out["initial_state"] = initial_state_name(cfg.initial_state);
    out["steps"] = cfg.steps;
    out["conv_tol"] = cfg.conv_tol;
    return out;
}

json certificate_json(const EquilibriumCertificate& cert) {
    return json{{"found", true},
                {"h0_spectrum", sorted_spectrum(cert.h0)},
                {"residual_u", cert.residual_u},
                {"residual_hs", cert.residual_hs},
                {"residual_v", cert.residual_v},
                {"fixed_point_gap", cert.fixed_point_gap},
                {"valid", cert.valid()}};
}

std::vector<int> one_based(const std::vector<int>& p) {
    std::vector<int> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = p[i] + 1;
    }
    return out;
}

void check_row_identities(const StepRecord& r, double beta) {
    if (std::abs(r.energy_change - (r.work + r.heat)) >
        1e-11 * (1.0 + std::abs(r.energy_change))) {
        throw numeric_error("csv: first-law identity violated at emission");
    }
    if (std::isfinite(r.entropy_production)) {
        if (std::abs(r.entropy_change - (r.entropy_production + beta * r.heat)) > 1e-10) {
            throw numeric_error("csv: entropy-balance identity violated at emission");
        }
        if (r.entropy_production < -1e-10) {
            throw numeric_error("csv: negative entropy production at emission");
        }
    }
}

}  // namespace

CollisionModel model_from_config(const ScenarioConfig& cfg) {
    ModelOperators ops = cfg.model.build();
    return CollisionModel(ops.h_s, ops.h_a, ops.v, cfg.beta, cfg.tau, cfg.gap);
}

DensityMatrix initial_state(const ScenarioConfig& cfg, const CollisionModel& model) {
    const Eigen::Index d = model.system_dim();
    switch (cfg.initial_state) {
        case InitialState::GibbsHS:
            return gibbs(model.h_s, cfg.beta);
        case InitialState::GibbsMinusHS:
            return gibbs(HermitianOperator(-model.h_s.matrix()), cfg.beta);
        case InitialState::MaximallyMixed:
            return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d));
        case InitialState::PassiveOfPi: {
            const Classification cls = classify(model);
            if (!cls.is_equilibrium()) {
                throw physics_error(
                    "initial_state: passive_of_pi requires a map with equilibrium; this map is "
                    "NESS with per-step entropy production " +
                    format_double(cls.sigma_rate));
            }
            const ChargingReport rep =
                charging_report(model.h_s, cls.certificate->h0, cfg.beta);
            Matrix sigma = Matrix::Zero(d, d);
            for (Eigen::Index i = 0; i < d; ++i) {
                sigma += rep.passive_populations[static_cast<std::size_t>(i)] *
                         rep.basis.col(i) * rep.basis.col(i).adjoint();
            }
            return DensityMatrix(sigma);
        }
        case InitialState::Custom:
            break;
    }
    if (!cfg.initial_custom) {
        throw config_error("initial_state: custom state requires a matrix literal");
    }
    if (cfg.initial_custom->rows() != d) {
        throw config_error("initial_state: custom state has dimension " +
                           std::to_string(cfg.initial_custom->rows()) + ", model needs " +
                           std::to_string(d));
    }
    try {
        return DensityMatrix(*cfg.initial_custom);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("initial_state: ") + e.what());
    }
}

SimulateOutput run_simulate(const ScenarioConfig& cfg) {
    const CollisionModel model = model_from_config(cfg);
    const DensityMatrix rho0 = initial_state(cfg, model);
    const Trajectory traj = evolve(model, rho0, cfg.steps, cfg.conv_tol);
    const auto basis = herm_eig(model.h_s);
    const Eigen::Index d = model.system_dim();

    std::string csv = "n";
    for (Eigen::Index i = 0; i < d; ++i) {
        csv += ",p" + std::to_string(i + 1);
    }
    csv += ",W,Q,dE,dS,Sigma\n";
    const auto append_row = [&](int n, const std::vector<double>& pops, double w, double q,
                                double de, double ds, double sigma) {
        csv += std::to_string(n);
        for (double p : pops) {
            csv += ",";
            csv += format_double(p);
        }
        for (double x : {w, q, de, ds, sigma}) {
            csv += ",";
            csv += format_double(x);
        }
        csv += "\n";
    };
    append_row(0, populations(basis.eigenvectors, rho0), 0.0, 0.0, 0.0, 0.0, 0.0);
    for (const StepRecord& r : traj.records) {
        check_row_identities(r, cfg.beta);
        append_row(r.n, populations(basis.eigenvectors, r.rho_after), r.work, r.heat,
                   r.energy_change, r.entropy_change, r.entropy_production);
    }

    json summary;
    summary["scenario"] = scenario_echo(cfg);
    summary["steps_run"] = traj.records.size();
    summary["converged"] = traj.converged;
    summary["totals"] = {{"work", traj.total_work},
                         {"heat", traj.total_heat},
                         {"entropy_production", json_number_or_null(traj.total_entropy_production)}};
    const DensityMatrix& final_state =
        traj.records.empty() ? rho0 : traj.records.back().rho_after;
    summary["final_populations"] = populations(basis.eigenvectors, final_state);

    const FixedPointResult fp = fixed_point(model);
    summary["fixed_point"] = {{"populations", populations(basis.eigenvectors, fp.state)},
                              {"degenerate", fp.degenerate},
                              {"fixed_space_dim", fp.fixed_space_dim},
                              {"residual", fp.residual}};

    const Classification cls = classify(model);
    if (cls.is_equilibrium()) {
        json eq = certificate_json(*cls.certificate);
        eq["sigma_rate"] = cls.sigma_rate;
        summary["equilibrium"] = eq;
    } else {
        summary["equilibrium"] = {{"found", false}, {"sigma_rate", cls.sigma_rate}};
    }
    return SimulateOutput{std::move(csv), summary.dump(2) + "\n"};
}

std::string run_report(const ScenarioConfig& cfg) {
    const CollisionModel model = model_from_config(cfg);
    const Classification cls = classify(model);
    if (!cls.is_equilibrium()) {
        throw physics_error("report: map has no equilibrium; per-step entropy production at the "
                            "invariant state is " +
                            format_double(cls.sigma_rate) + " nats");
    }
    const ChargingReport rep = charging_report(model.h_s, cls.certificate->h0, cfg.beta);
    const ErgotropyReport erg = ergotropy(cls.certificate->pi, model.h_s);

    json out;
    out["scenario"] = scenario_echo(cfg);
    out["report"] = {{"ergotropy", rep.ergotropy},
                     {"passive_populations", rep.passive_populations},
                     {"w_r", rep.w_r},
                     {"q_r", rep.q_r},
                     {"eta", rep.eta_defined ? json(rep.eta) : json(nullptr)},
                     {"eta_defined", rep.eta_defined},
                     {"beta_star", json_number_or_null(erg.beta_star)},
                     {"beta_star_is_infinite", std::isinf(erg.beta_star)},
                     {"bound", erg.bound},
                     {"permutation", one_based(rep.permutation)}};
    json eq = certificate_json(*cls.certificate);
    eq["sigma_rate"] = cls.sigma_rate;
    out["equilibrium"] = eq;

    // Sampled-unitary cross-check of the reported ergotropy.
    {
        const int trials = 2000;
        const double best =
            random_unitary_dominance(cls.certificate->pi, model.h_s, trials, cfg.seed);
        out["dominance_check"] = {{"seed", cfg.seed},
                                  {"trials", trials},
                                  {"max_extracted", best},
                                  {"within_ergotropy", best <= rep.ergotropy + 1e-10}};
    }

    if (cfg.model.variant == ModelVariant::SingleQubit) {
        const double w = cfg.model.h * std::tanh(cfg.beta * cfg.model.h / 2.0);
        json cf = {{"ergotropy", w}, {"w_r", 2.0 * w}, {"q_r", -w}, {"eta", 0.5}};
        cf["max_abs_difference"] =
            std::max({std::abs(w - rep.ergotropy), std::abs(2.0 * w - rep.w_r),
                      std::abs(-w - rep.q_r), std::abs(0.5 - rep.eta)});
        out["closed_form"] = cf;
    } else if (cfg.model.variant == ModelVariant::TwoQubit) {
        const double h = cfg.model.h;
        const double j2 = 2.0 * cfg.model.j;
        const double ratio = std::sinh(cfg.beta * h) / (1.0 + std::cosh(cfg.beta * h));
        const double w = (j2 - h) * ratio;
        const double w_r = j2 * ratio;
        json cf = {{"ergotropy", w}, {"w_r", w_r}, {"q_r", w - w_r}, {"eta", 1.0 - h / j2}};
        cf["max_abs_difference"] =
            std::max({std::abs(w - rep.ergotropy), std::abs(w_r - rep.w_r),
                      std::abs((w - w_r) - rep.q_r), std::abs((1.0 - h / j2) - rep.eta)});
        out["closed_form"] = cf;
    }
    return out.dump(2) + "\n";
}

namespace {

struct SweepRow {
    double value = 0.0;
    double ergotropy = 0.0;
    double w_r = std::numeric_limits<double>::quiet_NaN();
    double q_r = std::numeric_limits<double>::quiet_NaN();
    double eta = std::numeric_limits<double>::quiet_NaN();
    double sigma_rate = 0.0;
};

ScenarioConfig with_axis_value(const ScenarioConfig& base, const std::string& axis, double v) {
    ScenarioConfig cfg = base;
    if (axis == "beta") {
        cfg.beta = v;
    } else if (axis == "tau") {
        cfg.tau = v;
    } else if (axis == "h") {
        if (cfg.model.variant == ModelVariant::Custom) {
            throw config_error("sweep: axis 'h' does not apply to custom models");
        }
        cfg.model.h = v;
    } else if (axis == "J") {
        if (cfg.model.variant != ModelVariant::TwoQubit) {
            throw config_error("sweep: axis 'J' applies to the two_qubit model only");
        }
        cfg.model.j = v;
    } else if (axis == "a") {
        if (cfg.model.variant != ModelVariant::SingleQubit) {
            throw config_error("sweep: axis 'a' applies to the single_qubit model only");
        }
        cfg.model.a = v;
    } else {
        throw config_error("sweep: unknown axis '" + axis + "'");
    }
    return cfg;
}

}  // namespace

std::string run_sweep(const SweepConfig& sweep) {
    std::vector<SweepRow> rows(sweep.values.size());

    if (sweep.axis == "epsilon") {
        const ModelOperators ops = sweep.base.model.build();
        const NarrowBandScan scan = narrow_band_scan(ops.h_s, sweep.e0_center, sweep.offsets,
                                                     sweep.values, sweep.base.beta);
        for (std::size_t i = 0; i < scan.points.size(); ++i) {
            const NarrowBandPoint& pt = scan.points[i];
            rows[i] = SweepRow{pt.epsilon, pt.ergotropy, pt.w_r, pt.q_r, pt.eta, 0.0};
        }
    } else {
        // Validate the axis against the model once, before the parallel region.
        (void)with_axis_value(sweep.base, sweep.axis, sweep.values.front());
        batch::run_parallel(static_cast<int>(sweep.values.size()), [&](int i) {
            const double v = sweep.values[static_cast<std::size_t>(i)];
            const ScenarioConfig cfg = with_axis_value(sweep.base, sweep.axis, v);
            const CollisionModel model = model_from_config(cfg);
            const Classification cls = classify(model);
            SweepRow row;
            row.value = v;
            row.sigma_rate = cls.sigma_rate;
            if (cls.is_equilibrium()) {
                const ChargingReport rep =
                    charging_report(model.h_s, cls.certificate->h0, cfg.beta);
                row.ergotropy = rep.ergotropy;
                row.w_r = rep.w_r;
                row.q_r = rep.q_r;
                row.eta = rep.eta;
            } else {
                const FixedPointResult fp = fixed_point(model);
                row.ergotropy = ergotropy(fp.state, model.h_s).value;
            }
            rows[static_cast<std::size_t>(i)] = row;
        });
    }

    std::string csv = sweep.axis + ",ergotropy,w_r,q_r,eta,sigma_rate\n";
    for (const SweepRow& row : rows) {
        csv += format_double(row.value);
        for (double x : {row.ergotropy, row.w_r, row.q_r, row.eta, row.sigma_rate}) {
            csv += ",";
            csv += format_double(x);
        }
        csv += "\n";
    }
    return csv;
}

std::string run_find_h0(const ScenarioConfig& cfg) {
    const CollisionModel model = model_from_config(cfg);
    const Classification cls = classify(model);
    const auto basis = herm_eig(model.h_s);

    json out;
    out["scenario"] = scenario_echo(cfg);
    out["classification"] = cls.is_equilibrium() ? "equilibrium" : "ness";
    out["sigma_rate"] = cls.sigma_rate;
    out["fixed_point_degenerate"] = cls.fixed_point_degenerate;
    if (cls.solution) {
        out["h0_spectrum"] = sorted_spectrum(cls.solution->h0);
        out["solver_residual"] = cls.solution->residual;
        out["null_space_dim"] = cls.solution->null_space_dim;
    }
    if (cls.certificate) {
        out["residuals"] = {{"u", cls.certificate->residual_u},
                            {"hs", cls.certificate->residual_hs},
                            {"v", cls.certificate->residual_v}};
        out["fixed_point_gap"] = cls.certificate->fixed_point_gap;
        out["pi_populations"] = populations(basis.eigenvectors, cls.certificate->pi);
    } else {
        const FixedPointResult fp = fixed_point(model);
        out["pi_populations"] = populations(basis.eigenvectors, fp.state);
    }
    return out.dump(2) + "\n";
}

}  // namespace qbatt
