#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qbatt/errors.hpp"
#include "qbatt/runner.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string preset_name;
    std::string out_prefix;
    int steps = -1;
    double tol = -1.0;
    long long seed = -1;
};

void add_common(CLI::App* sub, CommonOptions& opts, const std::string& default_prefix) {
    opts.out_prefix = default_prefix;
    sub->add_option("--config", opts.config_path, "Path to a JSON config file");
    sub->add_option("--preset", opts.preset_name,
                    "Named scenario (fig1, two_qubit_default) instead of --config");
    sub->add_option("--out", opts.out_prefix, "Output path prefix");
    sub->add_option("--steps", opts.steps, "Override the step budget");
    sub->add_option("--tol", opts.tol, "Override the convergence tolerance");
    sub->add_option("--seed", opts.seed, "Override the RNG seed");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw qbatt::config_error("cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw qbatt::config_error("cannot open output file '" + path + "'");
    }
    out << content;
}

qbatt::ScenarioConfig load_scenario_options(const CommonOptions& opts) {
    if (opts.config_path.empty() == opts.preset_name.empty()) {
        throw qbatt::config_error("exactly one of --config or --preset is required");
    }
    qbatt::ScenarioConfig cfg = opts.preset_name.empty()
                                    ? qbatt::load_scenario(read_file(opts.config_path))
                                    : qbatt::preset(opts.preset_name);
    if (opts.steps > 0) {
        cfg.steps = opts.steps;
    }
    if (opts.tol > 0.0) {
        cfg.conv_tol = opts.tol;
    }
    if (opts.seed >= 0) {
        cfg.seed = static_cast<std::uint64_t>(opts.seed);
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Repeated-interaction quantum battery simulator"};
    app.require_subcommand(1);

    CommonOptions sim_opts, rep_opts, sweep_opts, h0_opts;
    CLI::App* sim = app.add_subcommand("simulate", "Run a trajectory; emit CSV and summary JSON");
    add_common(sim, sim_opts, "simulate");
    CLI::App* rep = app.add_subcommand("report", "Charging report for an equilibrium model");
    add_common(rep, rep_opts, "report");
    CLI::App* swp = app.add_subcommand("sweep", "Parameter sweep; emit long-form CSV");
    add_common(swp, sweep_opts, "sweep");
    CLI::App* fh0 = app.add_subcommand("find-h0", "Solve for the equilibrium operator H0");
    add_common(fh0, h0_opts, "find_h0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) {
            const qbatt::ScenarioConfig cfg = load_scenario_options(sim_opts);
            const qbatt::SimulateOutput out = qbatt::run_simulate(cfg);
            const std::string csv_path =
                cfg.trajectory_csv.empty() ? sim_opts.out_prefix + ".csv" : cfg.trajectory_csv;
            const std::string json_path =
                cfg.summary_json.empty() ? sim_opts.out_prefix + ".json" : cfg.summary_json;
            write_file(csv_path, out.trajectory_csv);
            write_file(json_path, out.summary_json);
            std::cout << "wrote " << csv_path << " and " << json_path << "\n";
        } else if (rep->parsed()) {
            const qbatt::ScenarioConfig cfg = load_scenario_options(rep_opts);
            const std::string path = rep_opts.out_prefix + ".json";
            write_file(path, qbatt::run_report(cfg));
            std::cout << "wrote " << path << "\n";
        } else if (swp->parsed()) {
            if (sweep_opts.config_path.empty()) {
                throw qbatt::config_error("sweep requires --config");
            }
            const qbatt::SweepConfig cfg = qbatt::load_sweep(read_file(sweep_opts.config_path));
            const std::string path = sweep_opts.out_prefix + ".csv";
            write_file(path, qbatt::run_sweep(cfg));
            std::cout << "wrote " << path << "\n";
        } else if (fh0->parsed()) {
            const qbatt::ScenarioConfig cfg = load_scenario_options(h0_opts);
            const std::string path = h0_opts.out_prefix + ".json";
            write_file(path, qbatt::run_find_h0(cfg));
            std::cout << "wrote " << path << "\n";
        }
    } catch (const qbatt::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qbatt::physics_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const qbatt::numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
