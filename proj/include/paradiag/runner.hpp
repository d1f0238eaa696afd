#pragma once

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "paradiag/config.hpp"
#include "paradiag/report_json.hpp"
#include "paradiag/serial.hpp"
#include "paradiag/solvers.hpp"

namespace paradiag {

/// A window solve failed; carries the window index for diagnostics.
struct SolveError : Error {
    int window = -1;
    SolveError(const std::string& msg, int w) : Error(msg), window(w) {}
};

namespace detail {

/// Shortest-exact decimal form so identical values print identically.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_le_doubles(std::ostream& os, std::span<const double> v) {
    for (double d : v) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, sizeof(bits));
        char bytes[8];
        for (int b = 0; b < 8; ++b)
            bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
        os.write(bytes, 8);
    }
}

}  // namespace detail

/// Window-end state as a flat little-endian float64 array plus a JSON
/// sidecar naming the size, time, and window index.
inline void write_checkpoint(const std::string& dir, int window,
                             std::span<const double> state, double t) {
    std::filesystem::create_directories(dir);
    char name[32];
    std::snprintf(name, sizeof(name), "window_%03d", window);
    const std::string base = dir + "/" + name;
    std::ofstream bin(base + ".bin", std::ios::binary);
    if (!bin) throw Error("cannot write checkpoint: " + base + ".bin");
    detail::write_le_doubles(bin, state);
    nlohmann::json sidecar{{"nx", state.size()}, {"t", t}, {"window", window}};
    std::ofstream meta(base + ".json");
    meta << sidecar.dump() << "\n";
}

inline RealVector read_checkpoint(const std::string& dir, int window) {
    char name[32];
    std::snprintf(name, sizeof(name), "window_%03d", window);
    const std::string base = dir + "/" + name;
    std::ifstream meta(base + ".json");
    if (!meta) throw Error("cannot read checkpoint sidecar: " + base + ".json");
    nlohmann::json sidecar;
    meta >> sidecar;
    const auto nx = sidecar.at("nx").get<std::size_t>();
    std::ifstream bin(base + ".bin", std::ios::binary);
    RealVector v(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        char bytes[8];
        bin.read(bytes, 8);
        if (!bin) throw Error("checkpoint truncated: " + base + ".bin");
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[b]))
                    << (8 * b);
        std::memcpy(&v[i], &bits, sizeof(double));
    }
    return v;
}

struct RunResult {
    RealVector final_state;
    double t_end = 0.0;
    std::vector<SolveReport> windows;
    SolveReport serial_equivalent;  // unused unless requested
};

inline const char* run_csv_header() {
    return "window,m_p,eta_mean,k_p_max,t_total,t_blocks,t_transpose";
}

/// Executes nwindows sequential all-at-once solves, chaining the final
/// timestep of each window into the next initial condition. Emits one CSV
/// row and one JSON-lines report per window, plus optional checkpoints.
inline RunResult run(const RunConfig& config) {
    validate(config);
    const ProblemPtr problem = make_problem(config.problem);
    const ThetaScheme scheme(config.dt, config.theta);

    std::ofstream csv, jsonl;
    if (!config.output.csv_path.empty()) {
        csv.open(config.output.csv_path);
        if (!csv) throw ConfigError("cannot open csv_path for writing");
        csv << run_csv_header() << "\n";
    }
    if (!config.output.json_path.empty()) {
        jsonl.open(config.output.json_path);
        if (!jsonl) throw ConfigError("cannot open json_path for writing");
    }

    RunResult result;
    RealVector u0 = problem->default_initial_condition();
    const int nt = config.window.nt;
    for (int w = 0; w < config.window.nwindows; ++w) {
        const double t0 = w * nt * config.dt;
        const AllAtOnceForm form(problem, scheme, nt, t0);
        Timeseries guess(nt, problem->nx(), t0);
        guess.initial_condition = u0;
        if (!config.window.partition.empty())
            guess.set_partition(config.window.partition);
        if (config.initial_guess == "constant") guess.assign_all(u0);

        WindowResult res;
        try {
            res = solve_window(form, guess, config.solver);
        } catch (const Error& e) {
            csv.flush();
            jsonl.flush();
            throw SolveError("window " + std::to_string(w) + ": " + e.what(),
                             w);
        }

        const bool tm = config.output.timings;
        if (csv.is_open()) {
            csv << w << "," << res.report.m_p << ","
                << detail::fmt(res.report.eta_mean()) << ","
                << res.report.k_p_max << ","
                << detail::fmt(tm ? res.report.timings.t_total : 0.0) << ","
                << detail::fmt(tm ? res.report.timings.t_blocks : 0.0) << ","
                << detail::fmt(tm ? res.report.timings.t_transpose : 0.0)
                << "\n";
        }
        if (jsonl.is_open()) {
            nlohmann::json line = to_json(res.report, tm);
            line["window"] = w;
            line["seed"] = config.seed;
            line["courant"] = problem->courant(config.dt);
            jsonl << line.dump() << "\n";
        }

        u0 = bcast_final_step(res.u);
        result.t_end = t0 + nt * config.dt;
        if (!config.output.checkpoint_dir.empty())
            write_checkpoint(config.output.checkpoint_dir, w, u0, result.t_end);
        result.windows.push_back(std::move(res.report));
    }
    result.final_state = std::move(u0);
    return result;
}

struct SweepRow {
    double alpha;
    int nt;
    int m_p;
    double eta_mean;
    double eta_ratio;  // eta / (alpha/(1-alpha))
    int k_p_max;
    double t_wall;
    double s_predicted;  // Nt / (2 (M_p + 1)) for Richardson accounting
};

inline const char* sweep_csv_header() {
    return "alpha,nt,m_p,eta_mean,eta_over_eta_e,k_p_max,t_wall,s_predicted";
}

/// Cartesian sweep over alpha and window length on the configured problem,
/// one single-window solve per combination. Rows are flushed as they are
/// produced so partial results survive a failure.
inline std::vector<SweepRow> sweep(const RunConfig& base,
                                   const std::vector<double>& alphas,
                                   const std::vector<int>& nts,
                                   std::ostream* csv_out = nullptr) {
    if (alphas.empty() || nts.empty())
        throw ConfigError("sweep needs nonempty alpha and nt lists");
    RunConfig config = base;
    config.window.nwindows = 1;
    config.window.partition.clear();
    validate(config);
    const ProblemPtr problem = make_problem(config.problem);
    const ThetaScheme scheme(config.dt, config.theta);

    if (csv_out) *csv_out << sweep_csv_header() << "\n";
    std::vector<SweepRow> rows;
    for (double alpha : alphas) {
        for (int nt : nts) {
            SolverOptions opts = config.solver;
            opts.alpha = alpha;
            const AllAtOnceForm form(problem, scheme, nt);
            Timeseries guess(nt, problem->nx());
            guess.initial_condition = problem->default_initial_condition();
            if (config.initial_guess == "constant")
                guess.assign_all(guess.initial_condition);
            const auto res = solve_window(form, guess, opts);

            SweepRow row;
            row.alpha = alpha;
            row.nt = nt;
            row.m_p = res.report.m_p;
            row.eta_mean = res.report.eta_mean();
            row.eta_ratio = row.eta_mean / (alpha / (1.0 - alpha));
            row.k_p_max = res.report.k_p_max;
            row.t_wall =
                config.output.timings ? res.report.timings.t_total : 0.0;
            row.s_predicted =
                static_cast<double>(nt) / (2.0 * (res.report.m_p + 1));
            rows.push_back(row);
            if (csv_out) {
                *csv_out << detail::fmt(row.alpha) << "," << row.nt << ","
                         << row.m_p << "," << detail::fmt(row.eta_mean) << ","
                         << detail::fmt(row.eta_ratio) << "," << row.k_p_max
                         << "," << detail::fmt(row.t_wall) << ","
                         << detail::fmt(row.s_predicted) << "\n";
                csv_out->flush();
            }
        }
    }
    return rows;
}

inline const char* psi_csv_header() {
    return "k,re_lambda1,im_lambda1,re_lambda2,im_lambda2,re_psi,im_psi";
}

/// Per-frequency eigenvalues and block-coefficient ratios, CSV-shaped for
/// replotting the clustering picture.
inline void psi_csv(int nt, double dt, double theta, double alpha,
                    std::ostream& os) {
    const auto eigs = circulant_eigenvalues(nt, dt, theta, alpha);
    const auto psi = psi_ratios(eigs);
    os << psi_csv_header() << "\n";
    for (int k = 0; k < nt; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        os << k << "," << detail::fmt(eigs.lambda1[ks].real()) << ","
           << detail::fmt(eigs.lambda1[ks].imag()) << ","
           << detail::fmt(eigs.lambda2[ks].real()) << ","
           << detail::fmt(eigs.lambda2[ks].imag()) << ","
           << detail::fmt(psi[ks].real()) << "," << detail::fmt(psi[ks].imag())
           << "\n";
    }
}

}  // namespace paradiag
