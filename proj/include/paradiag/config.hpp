#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "paradiag/errors.hpp"
#include "paradiag/problems_builtin.hpp"
#include "paradiag/solvers.hpp"

namespace paradiag {

struct ProblemConfig {
    std::string type;  // heat1d | advection1d | burgers1d | heat2d
    int nx = 0;
    int ny = 0;                      // heat2d only
    std::optional<double> dx;        // grid spacing override (1D problems)
    double nu = 0.1;                 // diffusivity
    double c = 1.0;                  // advection speed
    std::string bc;                  // dirichlet | periodic (defaulted by type)
    std::string mass = "identity";   // identity | consistent (heat1d)
};

struct WindowConfig {
    int nt = 1;
    int nwindows = 1;
    std::vector<int> partition;  // optional; defaults to one slice
};

struct OutputConfig {
    std::string csv_path;
    std::string json_path;        // JSON-lines, one report per window
    std::string checkpoint_dir;
    bool timings = true;  // write measured times; false zeroes them for
                          // byte-reproducible output
};

struct RunConfig {
    ProblemConfig problem;
    double dt = 0.0;
    double theta = 0.5;
    WindowConfig window;
    SolverOptions solver;
    std::string initial_guess = "constant";  // constant | zero
    OutputConfig output;
    int threads = 1;
    std::uint64_t seed = 0;  // recorded in output metadata
};

namespace detail {

inline OuterMethod parse_outer(const std::string& s) {
    if (s == "richardson") return OuterMethod::richardson;
    if (s == "gmres") return OuterMethod::gmres;
    if (s == "fgmres") return OuterMethod::fgmres;
    throw ConfigError("unknown outer method: " + s);
}

inline ReferenceMode parse_reference(const std::string& s) {
    if (s == "time_average") return ReferenceMode::time_average;
    if (s == "initial") return ReferenceMode::initial;
    if (s == "user") return ReferenceMode::user;
    if (s == "linear") return ReferenceMode::linear;
    throw ConfigError("unknown reference state: " + s);
}

inline BlockMethod parse_block_method(const std::string& s) {
    if (s == "dense_lu") return BlockMethod::dense_lu;
    if (s == "gmres") return BlockMethod::gmres;
    throw ConfigError("unknown block method: " + s);
}

inline const char* outer_name(OuterMethod m) {
    switch (m) {
        case OuterMethod::richardson: return "richardson";
        case OuterMethod::gmres: return "gmres";
        case OuterMethod::fgmres: return "fgmres";
    }
    return "richardson";
}

inline const char* reference_name(ReferenceMode m) {
    switch (m) {
        case ReferenceMode::time_average: return "time_average";
        case ReferenceMode::initial: return "initial";
        case ReferenceMode::user: return "user";
        case ReferenceMode::linear: return "linear";
    }
    return "time_average";
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    if (!j.contains("problem") || !j.contains("scheme") || !j.contains("window"))
        throw ConfigError("config needs problem, scheme, and window sections");

    const auto& jp = j.at("problem");
    c.problem.type = jp.value("type", "");
    c.problem.nx = jp.value("nx", 0);
    c.problem.ny = jp.value("ny", 0);
    if (jp.contains("dx")) c.problem.dx = jp.at("dx").get<double>();
    if (jp.contains("params")) {
        const auto& pp = jp.at("params");
        c.problem.nu = pp.value("nu", c.problem.nu);
        c.problem.c = pp.value("c", c.problem.c);
    }
    c.problem.bc = jp.value("bc", "");
    c.problem.mass = jp.value("mass", c.problem.mass);

    const auto& js = j.at("scheme");
    c.dt = js.value("dt", 0.0);
    c.theta = js.value("theta", 0.5);

    const auto& jw = j.at("window");
    c.window.nt = jw.value("nt", 0);
    c.window.nwindows = jw.value("nwindows", 0);
    if (jw.contains("partition"))
        c.window.partition = jw.at("partition").get<std::vector<int>>();

    if (j.contains("solver")) {
        const auto& jo = j.at("solver");
        c.solver.outer = detail::parse_outer(jo.value("outer", "richardson"));
        c.solver.rtol = jo.value("rtol", c.solver.rtol);
        c.solver.atol = jo.value("atol", c.solver.atol);
        c.solver.max_outer = jo.value("max_outer", c.solver.max_outer);
        c.solver.newton_max = jo.value("newton_max", c.solver.newton_max);
        c.solver.alpha = jo.value("alpha", c.solver.alpha);
        c.solver.reference.mode = detail::parse_reference(
            jo.value("reference_state", "time_average"));
        if (jo.contains("block")) {
            const auto& jb = jo.at("block");
            c.solver.block.method =
                detail::parse_block_method(jb.value("method", "dense_lu"));
            c.solver.block.tol = jb.value("tol", c.solver.block.tol);
            c.solver.block.max_iters =
                jb.value("max_iters", c.solver.block.max_iters);
            c.solver.block.fixed_iters =
                jb.value("fixed_iters", c.solver.block.fixed_iters);
        }
        if (jo.contains("forcing")) {
            const auto& jf = jo.at("forcing");
            const std::string type = jf.value("type", "fixed");
            if (type == "eisenstat_walker") {
                c.solver.forcing.eisenstat_walker = true;
            } else if (type == "fixed") {
                c.solver.forcing.eisenstat_walker = false;
            } else {
                throw ConfigError("unknown forcing type: " + type);
            }
            c.solver.forcing.fixed_tol =
                jf.value("tol", c.solver.forcing.fixed_tol);
        }
        const std::string jm = jo.value("jacobian_mode", "exact");
        if (jm == "exact") {
            c.solver.jacobian_mode = JacobianMode::exact;
        } else if (jm == "preconditioner_only") {
            c.solver.jacobian_mode = JacobianMode::preconditioner_only;
        } else {
            throw ConfigError("unknown jacobian mode: " + jm);
        }
        const std::string rs = jo.value("residual_scaling", "none");
        if (rs == "none") {
            c.solver.residual_scaling = ResidualScaling::none;
        } else if (rs == "sqrt_nt") {
            c.solver.residual_scaling = ResidualScaling::sqrt_nt;
        } else {
            throw ConfigError("unknown residual scaling: " + rs);
        }
        const std::string jl = jo.value("jacobian_linearization", "current");
        if (jl == "current") {
            c.solver.jac_linearization = JacobianLinearization::current;
        } else if (jl == "time_average") {
            c.solver.jac_linearization = JacobianLinearization::time_average;
        } else if (jl == "initial") {
            c.solver.jac_linearization = JacobianLinearization::initial;
        } else {
            throw ConfigError("unknown jacobian linearization: " + jl);
        }
        c.solver.richardson_damping =
            jo.value("richardson_damping", c.solver.richardson_damping);
        c.initial_guess = jo.value("initial_guess", c.initial_guess);
    }

    if (j.contains("output")) {
        const auto& jo = j.at("output");
        c.output.csv_path = jo.value("csv_path", "");
        c.output.json_path = jo.value("json_path", "");
        c.output.checkpoint_dir = jo.value("checkpoint_dir", "");
        c.output.timings = jo.value("timings", true);
    }
    c.threads = j.value("threads", 1);
    c.seed = j.value("seed", std::uint64_t{0});
    c.solver.threads = c.threads;
    return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["problem"] = {{"type", c.problem.type}, {"nx", c.problem.nx},
                    {"params", {{"nu", c.problem.nu}, {"c", c.problem.c}}},
                    {"mass", c.problem.mass}};
    if (c.problem.ny > 0) j["problem"]["ny"] = c.problem.ny;
    if (c.problem.dx) j["problem"]["dx"] = *c.problem.dx;
    if (!c.problem.bc.empty()) j["problem"]["bc"] = c.problem.bc;
    j["scheme"] = {{"dt", c.dt}, {"theta", c.theta}};
    j["window"] = {{"nt", c.window.nt}, {"nwindows", c.window.nwindows}};
    if (!c.window.partition.empty()) j["window"]["partition"] = c.window.partition;
    j["solver"] = {
        {"outer", detail::outer_name(c.solver.outer)},
        {"rtol", c.solver.rtol},
        {"atol", c.solver.atol},
        {"max_outer", c.solver.max_outer},
        {"newton_max", c.solver.newton_max},
        {"alpha", c.solver.alpha},
        {"reference_state", detail::reference_name(c.solver.reference.mode)},
        {"block",
         {{"method", c.solver.block.method == BlockMethod::dense_lu
                         ? "dense_lu"
                         : "gmres"},
          {"tol", c.solver.block.tol},
          {"max_iters", c.solver.block.max_iters},
          {"fixed_iters", c.solver.block.fixed_iters}}},
        {"forcing",
         {{"type", c.solver.forcing.eisenstat_walker ? "eisenstat_walker"
                                                     : "fixed"},
          {"tol", c.solver.forcing.fixed_tol}}},
        {"jacobian_mode", c.solver.jacobian_mode == JacobianMode::exact
                              ? "exact"
                              : "preconditioner_only"},
        {"residual_scaling",
         c.solver.residual_scaling == ResidualScaling::none ? "none"
                                                            : "sqrt_nt"},
        {"jacobian_linearization",
         c.solver.jac_linearization == JacobianLinearization::current
             ? "current"
             : (c.solver.jac_linearization == JacobianLinearization::time_average
                    ? "time_average"
                    : "initial")},
        {"richardson_damping", c.solver.richardson_damping},
        {"initial_guess", c.initial_guess},
    };
    j["output"] = {{"csv_path", c.output.csv_path},
                   {"json_path", c.output.json_path},
                   {"checkpoint_dir", c.output.checkpoint_dir},
                   {"timings", c.output.timings}};
    j["threads"] = c.threads;
    j["seed"] = c.seed;
    return j;
}

/// Checks every range constraint before any problem is built.
inline void validate(const RunConfig& c) {
    const auto& p = c.problem;
    if (p.type != "heat1d" && p.type != "advection1d" && p.type != "burgers1d" &&
        p.type != "heat2d")
        throw ConfigError("unknown problem type: " + p.type);
    if (p.nx < 1) throw ConfigError("problem.nx must be >= 1");
    if (p.type == "heat2d" && p.ny < 1)
        throw ConfigError("problem.ny must be >= 1 for heat2d");
    if (p.dx) {
        if (*p.dx <= 0.0) throw ConfigError("problem.dx must be > 0");
        if (p.type == "heat2d")
            throw ConfigError("problem.dx override is for 1D problems");
    }
    if (!p.bc.empty()) {
        const bool periodic = p.type == "advection1d" || p.type == "burgers1d";
        if (periodic && p.bc != "periodic")
            throw ConfigError(p.type + " supports periodic boundaries only");
        if (!periodic && p.bc != "dirichlet")
            throw ConfigError(p.type + " supports dirichlet boundaries only");
    }
    if (p.mass != "identity" && p.mass != "consistent")
        throw ConfigError("problem.mass must be identity or consistent");
    if (!(c.dt > 0.0)) throw ConfigError("scheme.dt must be > 0");
    if (c.theta < 0.0 || c.theta > 1.0)
        throw ConfigError("scheme.theta must be in [0, 1]");
    if (c.window.nt < 1) throw ConfigError("window.nt must be >= 1");
    if (c.window.nwindows < 1) throw ConfigError("window.nwindows must be >= 1");
    if (!c.window.partition.empty()) {
        int sum = 0;
        for (int s : c.window.partition) {
            if (s < 1) throw ConfigError("window.partition entries must be >= 1");
            sum += s;
        }
        if (sum != c.window.nt)
            throw ConfigError("window.partition must sum to window.nt");
    }
    if (c.initial_guess != "constant" && c.initial_guess != "zero")
        throw ConfigError("initial_guess must be constant or zero");
    if (c.threads < 1) throw ConfigError("threads must be >= 1");
    if (c.solver.reference.mode == ReferenceMode::user &&
        !c.solver.reference.user_state)
        throw ConfigError(
            "reference_state user needs a state supplied through the API");
    c.solver.validate();
}

/// Builds the configured spatial discretization. The optional dx override
/// rescales the 1D domain so the grid spacing is exactly as requested.
inline ProblemPtr make_problem(const ProblemConfig& p) {
    const double length_1d =
        p.dx ? (p.type == "heat1d" ? *p.dx * (p.nx + 1) : *p.dx * p.nx) : 1.0;
    if (p.type == "heat1d")
        return make_heat1d(p.nx, p.nu,
                           p.mass == "consistent" ? MassType::consistent
                                                  : MassType::identity,
                           length_1d);
    if (p.type == "advection1d") return make_advection1d(p.nx, p.c, length_1d);
    if (p.type == "burgers1d") return make_burgers1d(p.nx, p.nu, length_1d);
    if (p.type == "heat2d") return make_heat2d(p.nx, p.ny, p.nu);
    throw ConfigError("unknown problem type: " + p.type);
}

}  // namespace paradiag
