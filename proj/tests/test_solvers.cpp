#include <catch2/catch.hpp>

#include "paradiag/problems_builtin.hpp"
#include "paradiag/serial.hpp"
#include "paradiag/solvers.hpp"
#include "support/oracles.hpp"

using paradiag::AllAtOnceForm;
using paradiag::ApplyOp;
using paradiag::OuterMethod;
using paradiag::RealVector;
using paradiag::SolveReport;
using paradiag::SolverOptions;
using paradiag::ThetaScheme;
using paradiag::Timeseries;

namespace {

const ApplyOp identity_op = [](std::span<const double> x,
                               std::span<double> y) {
    paradiag::copy(x, y);
};

Timeseries constant_guess(const paradiag::Problem& p, int nt) {
    Timeseries guess(nt, p.nx());
    guess.initial_condition = p.default_initial_condition();
    guess.assign_all(guess.initial_condition);
    return guess;
}

}  // namespace

TEST_CASE("richardson returns immediately from the exact solution") {
    std::mt19937_64 rng(61);
    const RealVector rhs = oracles::random_vector(rng, 16);
    SolverOptions opts;
    SolveReport report;
    const RealVector x =
        richardson_solve(identity_op, identity_op, rhs, rhs, opts, report);
    REQUIRE(report.m_p == 0);
    REQUIRE(report.converged);
    REQUIRE(oracles::rel_err(x, rhs) == 0.0);
}

TEST_CASE("gmres on the identity converges in one iteration") {
    std::mt19937_64 rng(62);
    const RealVector rhs = oracles::random_vector(rng, 16);
    RealVector x0(16, 0.0);
    SolverOptions opts;
    opts.rtol = 1e-12;
    SolveReport report;
    const RealVector x =
        gmres_solve(identity_op, nullptr, rhs, x0, opts, false, report);
    REQUIRE(report.m_p == 1);
    REQUIRE(oracles::rel_err(x, rhs) < 1e-12);
}

TEST_CASE("richardson iteration counts follow the alpha law on advection") {
    const auto p = paradiag::make_advection1d(128, 1.0);
    const double dt = 0.8 * p->dx();
    auto run = [&](double alpha, int nt) {
        const AllAtOnceForm form(p, ThetaScheme(dt, 0.5), nt);
        SolverOptions opts;
        opts.outer = OuterMethod::richardson;
        opts.rtol = 1e-11;
        opts.alpha = alpha;
        return solve_window(form, constant_guess(*p, nt), opts).report;
    };
    SECTION("alpha = 1e-4 needs 3 iterations at every window length") {
        for (int nt : {4, 16, 64}) {
            const auto report = run(1e-4, nt);
            INFO("nt = " << nt);
            REQUIRE(report.m_p == 3);
            REQUIRE(report.pc_applies == report.m_p + 1);
        }
    }
    SECTION("alpha = 1e-2 needs 6, alpha = 1e-6 needs 2") {
        REQUIRE(run(1e-2, 16).m_p == 6);
        REQUIRE(run(1e-6, 16).m_p == 2);
    }
    SECTION("iteration count varies by at most one across window lengths") {
        for (double alpha : {1e-1, 1e-2, 1e-3}) {
            int mn = 1 << 20, mx = 0;
            for (int nt : {4, 16, 64}) {
                const int mp = run(alpha, nt).m_p;
                mn = std::min(mn, mp);
                mx = std::max(mx, mp);
            }
            INFO("alpha = " << alpha);
            REQUIRE(mx - mn <= 1);
        }
    }
    SECTION("tail contraction stays below 1.5 alpha/(1-alpha)") {
        for (double alpha : {1e-1, 1e-2, 1e-3, 1e-4}) {
            for (int nt : {16, 64}) {
                const auto report = run(alpha, nt);
                INFO("alpha = " << alpha << ", nt = " << nt);
                REQUIRE(report.eta_tail_mean() <=
                        1.5 * alpha / (1.0 - alpha));
            }
        }
    }
}

TEST_CASE("richardson and gmres agree on linear heat") {
    const auto p = paradiag::make_heat1d(24, 0.5);
    const AllAtOnceForm form(p, ThetaScheme(0.01, 0.5), 8);
    SolverOptions opts;
    opts.rtol = 1e-12;
    opts.alpha = 1e-4;

    opts.outer = OuterMethod::richardson;
    const auto rich = solve_window(form, constant_guess(*p, 8), opts);
    opts.outer = OuterMethod::gmres;
    const auto gm = solve_window(form, constant_guess(*p, 8), opts);
    REQUIRE(oracles::rel_err(gm.u.data, rich.u.data) < 1e-9);
    REQUIRE(gm.report.m_p <= rich.report.m_p);
}

TEST_CASE("fgmres saves one preconditioner application over gmres") {
    // mass-matrix variant stands in for the wave-system case
    const auto p =
        paradiag::make_heat1d(24, 0.5, paradiag::MassType::consistent);
    const AllAtOnceForm form(p, ThetaScheme(0.01, 0.5), 8);
    SolverOptions opts;
    opts.rtol = 1e-11;
    opts.alpha = 1e-4;

    opts.outer = OuterMethod::gmres;
    const auto gm = solve_window(form, constant_guess(*p, 8), opts);
    opts.outer = OuterMethod::fgmres;
    const auto fgm = solve_window(form, constant_guess(*p, 8), opts);

    REQUIRE(fgm.report.converged);
    REQUIRE(fgm.report.m_p == gm.report.m_p);
    REQUIRE(fgm.report.pc_applies == gm.report.pc_applies - 1);
    REQUIRE(oracles::rel_err(fgm.u.data, gm.u.data) < 1e-9);
    // measures 2 here (heat contracts faster than the alpha bound; the
    // advection table rows sit at 3)
    REQUIRE(fgm.report.m_p <= 3);
}

TEST_CASE("two-dimensional heat solves through the same machinery") {
    const auto p = paradiag::make_heat2d(6, 5, 0.3);
    const ThetaScheme scheme(0.01, 1.0);
    const AllAtOnceForm form(p, scheme, 4);
    SolverOptions opts;
    opts.rtol = 1e-11;
    opts.alpha = 1e-4;
    const auto par = solve_window(form, constant_guess(*p, 4), opts);
    const auto ser = run_serial(*p, scheme, p->default_initial_condition(), 4,
                                0.0, 1e-13);
    REQUIRE(par.report.converged);
    REQUIRE(oracles::rel_err(par.u.data, ser.series.data) < 1e-9);
}

TEST_CASE("linear problem through the Newton path takes one iteration") {
    const auto p = paradiag::make_heat1d(12, 0.8);
    const AllAtOnceForm form(p, ThetaScheme(0.02, 1.0), 4);
    SolverOptions opts;
    opts.outer = OuterMethod::gmres;
    opts.rtol = 1e-10;
    opts.alpha = 1e-4;
    const auto res = newton_solve(form, constant_guess(*p, 4), opts);
    REQUIRE(res.report.newton_iterations == 1);
    REQUIRE(res.report.converged);
}

TEST_CASE("parallel-in-time equals serial-in-time") {
    SECTION("heat") {
        const auto p = paradiag::make_heat1d(32, 0.4);
        const ThetaScheme scheme(0.01, 0.5);
        const AllAtOnceForm form(p, scheme, 8);
        SolverOptions opts;
        opts.rtol = 1e-11;
        opts.alpha = 1e-4;
        const auto par = solve_window(form, constant_guess(*p, 8), opts);
        const auto ser = run_serial(*p, scheme, p->default_initial_condition(),
                                    8, 0.0, 1e-13);
        double err = 0.0, den = 0.0;
        for (std::size_t i = 0; i < par.u.data.size(); ++i) {
            err = std::max(err, std::abs(par.u.data[i] - ser.series.data[i]));
            den = std::max(den, std::abs(ser.series.data[i]));
        }
        REQUIRE(err / den <= 100 * opts.rtol);
    }
    SECTION("burgers via quasi-Newton") {
        const auto p = paradiag::make_burgers1d(48, 0.02);
        const ThetaScheme scheme(0.4 * p->dx(), 0.5);
        const AllAtOnceForm form(p, scheme, 8);
        SolverOptions opts;
        opts.outer = OuterMethod::fgmres;
        opts.rtol = 1e-6;
        opts.alpha = 1e-4;
        opts.forcing.eisenstat_walker = true;
        const auto par = newton_solve(form, constant_guess(*p, 8), opts);
        const auto ser = run_serial(*p, scheme, p->default_initial_condition(),
                                    8, 0.0, 1e-12);
        double err = 0.0, den = 0.0;
        for (std::size_t i = 0; i < par.u.data.size(); ++i) {
            err = std::max(err, std::abs(par.u.data[i] - ser.series.data[i]));
            den = std::max(den, std::abs(ser.series.data[i]));
        }
        REQUIRE(err / den <= 100 * opts.rtol);
    }
}

TEST_CASE("jacobian-free mode converges on burgers") {
    const auto p = paradiag::make_burgers1d(32, 0.02);
    const AllAtOnceForm form(p, ThetaScheme(0.4 * p->dx(), 0.5), 8);
    SolverOptions opts;
    opts.rtol = 1e-6;
    opts.alpha = 1e-4;
    opts.jacobian_mode = paradiag::JacobianMode::preconditioner_only;
    opts.newton_max = 100;
    const auto res = newton_solve(form, constant_guess(*p, 8), opts);
    REQUIRE(res.report.converged);
    // one preconditioner application per quasi-Newton step
    REQUIRE(res.report.pc_applies == res.report.newton_iterations);
}

TEST_CASE("newton reports nondecreasing work for longer windows") {
    const auto p = paradiag::make_burgers1d(48, 0.02);
    const double dt = 0.4 * p->dx();
    int prev = 0;
    for (int nt : {4, 8, 16}) {
        const AllAtOnceForm form(p, ThetaScheme(dt, 0.5), nt);
        SolverOptions opts;
        opts.outer = OuterMethod::fgmres;
        opts.rtol = 1e-6;
        opts.alpha = 1e-4;
        opts.forcing.eisenstat_walker = true;
        const auto res = newton_solve(form, constant_guess(*p, nt), opts);
        INFO("nt = " << nt);
        REQUIRE(res.report.m_p >= prev);
        prev = res.report.m_p;
    }
}

TEST_CASE("newton divergence guards") {
    const auto p = paradiag::make_burgers1d(32, 0.02);
    const AllAtOnceForm form(p, ThetaScheme(0.4 * p->dx(), 0.5), 8);
    SolverOptions opts;
    opts.outer = OuterMethod::fgmres;
    opts.rtol = 1e-10;
    opts.alpha = 1e-4;
    SECTION("iteration cap") {
        opts.newton_max = 1;
        REQUIRE_THROWS_AS(newton_solve(form, constant_guess(*p, 8), opts),
                          paradiag::NewtonDivergedError);
    }
    SECTION("serial step cap") {
        REQUIRE_THROWS_AS(
            paradiag::serial_theta_step(*p, form.scheme,
                                        p->default_initial_condition(), 0.0,
                                        1e-14, 0),
            paradiag::NewtonDivergedError);
    }
}

TEST_CASE("solver failures carry their histories") {
    const auto p = paradiag::make_advection1d(32, 1.0);
    const AllAtOnceForm form(p, ThetaScheme(0.8 * p->dx(), 0.5), 8);
    SolverOptions opts;
    opts.outer = OuterMethod::richardson;
    opts.rtol = 1e-11;
    opts.alpha = 1e-1;  // needs ~12 iterations
    opts.max_outer = 2;
    try {
        solve_window(form, constant_guess(*p, 8), opts);
        FAIL("expected MaxIterationsError");
    } catch (const paradiag::MaxIterationsError& e) {
        REQUIRE(e.history.size() >= 2);
    }
}

TEST_CASE("singular operators break down instead of stalling") {
    // diag(1, 1, 0) saturates the Krylov space after two vectors while the
    // residual component outside the range remains
    const ApplyOp apply = [](std::span<const double> x, std::span<double> y) {
        y[0] = x[0];
        y[1] = x[1];
        y[2] = 0.0;
    };
    const RealVector rhs = {1.0, 1.0, 1.0};
    RealVector x(3, 0.0);
    paradiag::KrylovOptions opts;
    opts.rtol = 1e-12;
    opts.max_iter = 10;
    REQUIRE_THROWS_AS(paradiag::gmres(apply, nullptr, rhs, x, opts),
                      paradiag::BreakdownError);
}

TEST_CASE("converged linear solutions satisfy the residual independently") {
    const auto p = paradiag::make_heat1d(20, 0.5);
    const AllAtOnceForm form(p, ThetaScheme(0.01, 0.5), 8);
    SolverOptions opts;
    opts.rtol = 1e-11;
    opts.alpha = 1e-4;
    const auto res = solve_window(form, constant_guess(*p, 8), opts);
    RealVector r(form.size());
    paradiag::aaos_residual(form, res.u.data, res.u.initial_condition, r);
    const RealVector btilde =
        paradiag::aaos_rhs(form, res.u.initial_condition);
    REQUIRE(paradiag::norm2(r) <= 100 * opts.rtol * paradiag::norm2(btilde));
}

TEST_CASE("timing partition never exceeds the total") {
    const auto p = paradiag::make_heat1d(24, 0.5);
    const AllAtOnceForm form(p, ThetaScheme(0.01, 0.5), 8);
    SolverOptions opts;
    opts.rtol = 1e-10;
    opts.alpha = 1e-4;
    const auto res = solve_window(form, constant_guess(*p, 8), opts);
    const auto& t = res.report.timings;
    REQUIRE(t.t_blocks + t.t_transpose + t.t_fft + t.t_residual + t.t_jac <=
            t.t_total);
    REQUIRE(t.t_blocks > 0.0);
}

TEST_CASE("invalid solver options are rejected") {
    SolverOptions opts;
    opts.rtol = 0.0;
    REQUIRE_THROWS_AS(opts.validate(), paradiag::ConfigError);
    opts.rtol = 1e-8;
    opts.alpha = 1.5;
    REQUIRE_THROWS_AS(opts.validate(), paradiag::ConfigError);
}
