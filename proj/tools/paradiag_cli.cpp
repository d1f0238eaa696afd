// Command-line driver: windowed all-at-once solves, parameter sweeps, the
// per-frequency coefficient diagnostic, and the speedup calculator.
// Exit codes: 0 success, 2 configuration error, 3 solver failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "paradiag/runner.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw paradiag::ConfigError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw paradiag::ConfigError(path + ": " + e.what());
    }
    return j;
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::vector<int> parse_ints(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"alpha-circulant parallel-in-time solver kit"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "solve a windowed timeseries");
    std::string run_config_path, run_out_dir;
    run_cmd->add_option("--config", run_config_path, "JSON run configuration")
        ->required();
    run_cmd->add_option("--out", run_out_dir,
                        "directory for csv/jsonl/checkpoints (overrides the "
                        "config paths)");

    // sweep
    auto* sweep_cmd =
        app.add_subcommand("sweep", "alpha x window-length parameter sweep");
    std::string sweep_config_path, sweep_alphas, sweep_nts, sweep_out;
    sweep_cmd->add_option("--config", sweep_config_path, "base configuration")
        ->required();
    sweep_cmd->add_option("--alphas", sweep_alphas, "comma-separated alphas")
        ->required();
    sweep_cmd->add_option("--nts", sweep_nts, "comma-separated window lengths")
        ->required();
    sweep_cmd->add_option("--out", sweep_out, "CSV output path (default stdout)");

    // psi
    auto* psi_cmd = app.add_subcommand(
        "psi", "block-coefficient ratios of the circulant preconditioner");
    int psi_nt = 16;
    double psi_dt = 1.0, psi_theta = 0.5, psi_alpha = 1e-4;
    std::string psi_out;
    psi_cmd->add_option("--nt", psi_nt, "window length")->required();
    psi_cmd->add_option("--dt", psi_dt, "timestep")->required();
    psi_cmd->add_option("--theta", psi_theta, "implicit parameter")->required();
    psi_cmd->add_option("--alpha", psi_alpha, "circulant parameter")->required();
    psi_cmd->add_option("--out", psi_out, "CSV output path (default stdout)");

    // predict
    auto* predict_cmd =
        app.add_subcommand("predict", "speedup and efficiency estimate");
    std::string predict_inputs;
    paradiag::PerfInputs flags;
    predict_cmd->add_option("--inputs", predict_inputs,
                            "JSON file of model inputs");
    predict_cmd->add_option("--k-s", flags.k_s, "serial block iterations");
    predict_cmd->add_option("--k-p", flags.k_p, "parallel block iterations");
    predict_cmd->add_option("--m-s", flags.m_s, "serial solves per step");
    predict_cmd->add_option("--m-p", flags.m_p,
                            "total preconditioner applications");
    predict_cmd->add_option("--nx", flags.nx, "spatial DoFs");
    predict_cmd->add_option("--nt", flags.nt, "window length");
    predict_cmd->add_option("--q", flags.q, "spatial work exponent");
    predict_cmd->add_option("--t-c", flags.t_c, "transpose time");
    predict_cmd->add_option("--t-b", flags.t_b, "block-solve time");
    predict_cmd->add_option("--core-penalty", flags.core_penalty,
                            "processor allocation factor");
    std::string predict_out;
    predict_cmd->add_option("--out", predict_out,
                            "JSON output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            auto config = paradiag::config_from_json(load_json(run_config_path));
            if (!run_out_dir.empty()) {
                std::filesystem::create_directories(run_out_dir);
                config.output.csv_path = run_out_dir + "/run.csv";
                config.output.json_path = run_out_dir + "/windows.jsonl";
                config.output.checkpoint_dir = run_out_dir + "/checkpoints";
            }
            const auto result = paradiag::run(config);
            std::cout << "windows: " << result.windows.size()
                      << ", t_end: " << result.t_end << "\n";
            return 0;
        }
        if (*sweep_cmd) {
            const auto config =
                paradiag::config_from_json(load_json(sweep_config_path));
            const auto alphas = parse_doubles(sweep_alphas);
            const auto nts = parse_ints(sweep_nts);
            if (sweep_out.empty()) {
                paradiag::sweep(config, alphas, nts, &std::cout);
            } else {
                std::ofstream os(sweep_out);
                if (!os) throw paradiag::ConfigError("cannot open " + sweep_out);
                paradiag::sweep(config, alphas, nts, &os);
            }
            return 0;
        }
        if (*psi_cmd) {
            if (psi_out.empty()) {
                paradiag::psi_csv(psi_nt, psi_dt, psi_theta, psi_alpha,
                                  std::cout);
            } else {
                std::ofstream os(psi_out);
                if (!os) throw paradiag::ConfigError("cannot open " + psi_out);
                paradiag::psi_csv(psi_nt, psi_dt, psi_theta, psi_alpha, os);
            }
            return 0;
        }
        if (*predict_cmd) {
            paradiag::PerfInputs in = flags;
            if (!predict_inputs.empty())
                in = paradiag::perf_inputs_from_json(load_json(predict_inputs));
            const auto estimate = paradiag::predict(in);
            const auto j = paradiag::to_json(estimate);
            if (predict_out.empty()) {
                std::cout << j.dump(2) << "\n";
            } else {
                std::ofstream os(predict_out);
                os << j.dump(2) << "\n";
            }
            return 0;
        }
    } catch (const paradiag::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const paradiag::InvalidInputError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const paradiag::Error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
