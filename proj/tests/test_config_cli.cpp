#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "paradiag/runner.hpp"
#include "paradiag/serial.hpp"
#include "support/oracles.hpp"

using paradiag::ConfigError;
using paradiag::RealVector;
using paradiag::RunConfig;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
    const auto dir = fs::temp_directory_path() / "paradiag_test";
    fs::create_directories(dir);
    return dir;
}

RunConfig heat_config() {
    RunConfig c;
    c.problem.type = "heat1d";
    c.problem.nx = 24;
    c.problem.nu = 0.4;
    c.dt = 0.01;
    c.theta = 0.5;
    c.window.nt = 8;
    c.window.nwindows = 6;
    c.solver.outer = paradiag::OuterMethod::richardson;
    c.solver.rtol = 1e-11;
    c.solver.alpha = 1e-4;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

#ifdef CLI_PATH
int run_cli(const std::string& args) {
    const std::string cmd = std::string(CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}
#endif

}  // namespace

TEST_CASE("config round trip through JSON is the identity") {
    RunConfig c = heat_config();
    c.solver.forcing.eisenstat_walker = true;
    c.solver.residual_scaling = paradiag::ResidualScaling::sqrt_nt;
    c.window.partition = {2, 2, 2, 2};
    c.threads = 2;
    c.seed = 777;
    const auto j1 = paradiag::config_to_json(c);
    const RunConfig c2 = paradiag::config_from_json(j1);
    const auto j2 = paradiag::config_to_json(c2);
    REQUIRE(j1 == j2);
}

TEST_CASE("invalid configurations are rejected before any compute") {
    RunConfig c = heat_config();
    SECTION("zero windows") {
        c.window.nwindows = 0;
        REQUIRE_THROWS_AS(paradiag::run(c), ConfigError);
    }
    SECTION("unknown problem type") {
        c.problem.type = "wave1d";
        REQUIRE_THROWS_AS(paradiag::validate(c), ConfigError);
    }
    SECTION("alpha out of range") {
        c.solver.alpha = 0.0;
        REQUIRE_THROWS_AS(paradiag::validate(c), ConfigError);
    }
    SECTION("partition must sum to the window length") {
        c.window.partition = {3, 3};
        REQUIRE_THROWS_AS(paradiag::validate(c), ConfigError);
    }
    SECTION("wrong boundary for a periodic problem") {
        c.problem.type = "advection1d";
        c.problem.bc = "dirichlet";
        REQUIRE_THROWS_AS(paradiag::validate(c), ConfigError);
    }
}

TEST_CASE("windowed run chains initial conditions and writes artifacts") {
    const auto dir = temp_dir() / "run_heat";
    fs::remove_all(dir);
    fs::create_directories(dir);

    RunConfig c = heat_config();
    c.output.csv_path = (dir / "run.csv").string();
    c.output.json_path = (dir / "windows.jsonl").string();
    c.output.checkpoint_dir = (dir / "ckpt").string();
    const auto result = paradiag::run(c);

    SECTION("final state equals the 48-step serial march") {
        const auto p = paradiag::make_problem(c.problem);
        const auto serial = paradiag::run_serial(
            *p, paradiag::ThetaScheme(c.dt, c.theta),
            p->default_initial_condition(), 48, 0.0, 1e-13);
        const RealVector want(serial.series.step(47).begin(),
                              serial.series.step(47).end());
        double err = 0.0, den = 0.0;
        for (std::size_t i = 0; i < want.size(); ++i) {
            err = std::max(err, std::abs(result.final_state[i] - want[i]));
            den = std::max(den, std::abs(want[i]));
        }
        REQUIRE(err / den <= 1e-8);
        REQUIRE(result.t_end == Approx(48 * c.dt));
    }
    SECTION("one CSV row per window") {
        std::ifstream csv(c.output.csv_path);
        std::string line;
        std::getline(csv, line);
        REQUIRE(line == paradiag::run_csv_header());
        int rows = 0;
        while (std::getline(csv, line))
            if (!line.empty()) ++rows;
        REQUIRE(rows == 6);
    }
    SECTION("JSON-lines reports carry the documented keys") {
        std::ifstream jsonl(c.output.json_path);
        std::string line;
        int rows = 0;
        while (std::getline(jsonl, line)) {
            if (line.empty()) continue;
            const auto j = nlohmann::json::parse(line);
            for (const char* key :
                 {"m_p", "residuals", "eta", "k_p_max", "k_p_min",
                  "newton_its", "timings", "window", "seed"})
                REQUIRE(j.contains(key));
            ++rows;
        }
        REQUIRE(rows == 6);
    }
    SECTION("checkpoints round trip bit-exactly") {
        const RealVector back =
            paradiag::read_checkpoint(c.output.checkpoint_dir, 5);
        REQUIRE(back.size() == result.final_state.size());
        for (std::size_t i = 0; i < back.size(); ++i)
            REQUIRE(back[i] == result.final_state[i]);
        // sidecar metadata
        std::ifstream meta(c.output.checkpoint_dir + "/window_005.json");
        nlohmann::json sidecar;
        meta >> sidecar;
        REQUIRE(sidecar.at("nx").get<int>() == c.problem.nx);
        REQUIRE(sidecar.at("window").get<int>() == 5);
        REQUIRE(sidecar.at("t").get<double>() == Approx(48 * c.dt));
    }
}

TEST_CASE("identical configs produce byte-identical output without timings") {
    const auto dir = temp_dir() / "determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);

    RunConfig c = heat_config();
    c.output.timings = false;
    c.threads = 1;
    c.output.csv_path = (dir / "a.csv").string();
    paradiag::run(c);
    c.output.csv_path = (dir / "b.csv").string();
    paradiag::run(c);
    REQUIRE(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
}

TEST_CASE("burgers run with direct blocks populates every report field") {
    RunConfig c;
    c.problem.type = "burgers1d";
    c.problem.nx = 32;
    c.problem.nu = 0.02;
    c.dt = 0.4 / 32.0;
    c.theta = 0.5;
    c.window.nt = 8;
    c.window.nwindows = 2;
    c.solver.outer = paradiag::OuterMethod::fgmres;
    c.solver.rtol = 1e-6;
    c.solver.alpha = 1e-4;
    c.solver.forcing.eisenstat_walker = true;
    const auto result = paradiag::run(c);
    REQUIRE(result.windows.size() == 2);
    for (const auto& r : result.windows) {
        REQUIRE(r.converged);
        REQUIRE(r.newton_iterations >= 1);
        REQUIRE(r.m_p >= 1);
        REQUIRE(r.k_p_max >= 1);
        REQUIRE_FALSE(r.residual_history.empty());
        REQUIRE(r.timings.t_total > 0.0);
    }
}

TEST_CASE("sweep emits the reference iteration counts") {
    RunConfig c;
    c.problem.type = "advection1d";
    c.problem.nx = 64;
    c.problem.c = 1.0;
    c.dt = 0.8 / 64.0;  // courant 0.8
    c.theta = 0.5;
    c.window.nt = 4;
    c.window.nwindows = 1;
    c.solver.outer = paradiag::OuterMethod::richardson;
    c.solver.rtol = 1e-11;

    SECTION("alpha = 1e-4 gives three iterations at every window length") {
        std::ostringstream os;
        const auto rows = paradiag::sweep(c, {1e-4}, {4, 16, 64}, &os);
        REQUIRE(rows.size() == 3);
        for (const auto& row : rows) REQUIRE(row.m_p == 3);
        // header plus three data lines
        std::istringstream is(os.str());
        std::string line;
        std::getline(is, line);
        REQUIRE(line == paradiag::sweep_csv_header());
    }
    SECTION("eta ratio near one at alpha = 1e-1") {
        const auto rows = paradiag::sweep(c, {1e-1}, {16}, nullptr);
        REQUIRE(rows[0].eta_ratio > 0.85);
        REQUIRE(rows[0].eta_ratio < 1.10);
    }
    SECTION("predicted speedup scales with the window length at fixed alpha") {
        const auto rows = paradiag::sweep(c, {1e-4}, {4, 16}, nullptr);
        REQUIRE(rows[1].s_predicted == Approx(4.0 * rows[0].s_predicted));
    }
    SECTION("empty grids are rejected") {
        REQUIRE_THROWS_AS(paradiag::sweep(c, {}, {4}, nullptr), ConfigError);
        REQUIRE_THROWS_AS(paradiag::sweep(c, {1e-4}, {}, nullptr), ConfigError);
    }
    SECTION("rows are flushed before a failure propagates") {
        RunConfig hard = c;
        hard.solver.max_outer = 4;  // enough for 1e-4 but not for 1e-1
        std::ostringstream os;
        REQUIRE_THROWS_AS(paradiag::sweep(hard, {1e-4, 1e-1}, {8}, &os),
                          paradiag::MaxIterationsError);
        std::istringstream is(os.str());
        std::string line;
        int lines = 0;
        while (std::getline(is, line))
            if (!line.empty()) ++lines;
        REQUIRE(lines == 2);  // header plus the completed first row
    }
}

#ifdef PROJECT_SOURCE_DIR
TEST_CASE("every emitted CSV column is documented") {
    const std::string doc =
        slurp(fs::path(PROJECT_SOURCE_DIR) / "docs" / "output_reference.md");
    auto check_header = [&doc](const std::string& header) {
        std::stringstream ss(header);
        std::string column;
        while (std::getline(ss, column, ',')) {
            INFO("column " << column);
            REQUIRE(doc.find("`" + column + "`") != std::string::npos);
        }
    };
    check_header(paradiag::run_csv_header());
    check_header(paradiag::sweep_csv_header());
    check_header(paradiag::psi_csv_header());
}
#endif

TEST_CASE("psi csv matches the hand-computed table") {
    std::ostringstream os;
    paradiag::psi_csv(2, 1.0, 0.5, 0.25, os);
    std::istringstream is(os.str());
    std::string header, row0, row1;
    std::getline(is, header);
    std::getline(is, row0);
    std::getline(is, row1);
    REQUIRE(header == paradiag::psi_csv_header());
    REQUIRE(row0.substr(0, 2) == "0,");
    REQUIRE(row0.find("0.33333333333333331") != std::string::npos);
    REQUIRE(row1.find(",3,") != std::string::npos);
}

#ifdef CLI_PATH
TEST_CASE("command-line exit codes") {
    const auto dir = temp_dir() / "cli";
    fs::remove_all(dir);
    fs::create_directories(dir);

    SECTION("valid run exits zero and honors --out") {
        RunConfig c = heat_config();
        c.window.nwindows = 2;
        std::ofstream(dir / "ok.json") << paradiag::config_to_json(c).dump();
        const auto out = dir / "results";
        REQUIRE(run_cli("run --config " + (dir / "ok.json").string() +
                        " --out " + out.string()) == 0);
        REQUIRE(fs::exists(out / "run.csv"));
        REQUIRE(fs::exists(out / "windows.jsonl"));
        REQUIRE(fs::exists(out / "checkpoints" / "window_001.bin"));
    }
    SECTION("schema violation exits two") {
        RunConfig c = heat_config();
        c.window.nwindows = 0;
        std::ofstream(dir / "bad.json") << paradiag::config_to_json(c).dump();
        REQUIRE(run_cli("run --config " + (dir / "bad.json").string()) == 2);
    }
    SECTION("solver failure exits three") {
        RunConfig c = heat_config();
        c.problem.type = "advection1d";
        c.problem.nx = 32;
        c.dt = 0.8 / 32.0;
        c.solver.alpha = 1e-1;
        c.solver.max_outer = 2;  // needs ~12 iterations
        std::ofstream(dir / "hard.json") << paradiag::config_to_json(c).dump();
        REQUIRE(run_cli("run --config " + (dir / "hard.json").string()) == 3);
    }
    SECTION("psi subcommand prints the table") {
        REQUIRE(run_cli("psi --nt 4 --dt 1 --theta 0.5 --alpha 1e-4") == 0);
    }
    SECTION("predict reads inputs from a file") {
        std::ofstream(dir / "inputs.json")
            << R"({"m_p": 4, "nt": 64, "core_penalty": 2})";
        REQUIRE(run_cli("predict --inputs " + (dir / "inputs.json").string()) ==
                0);
    }
}
#endif
