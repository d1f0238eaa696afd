#pragma once

#include <limits>
#include <optional>

#include "paradiag/dense.hpp"
#include "paradiag/problem.hpp"
#include "paradiag/solve_report.hpp"
#include "paradiag/timeseries.hpp"

namespace paradiag {

namespace detail {

/// One theta step with an optional cached factorization for linear
/// problems. Returns the Newton iteration count.
inline int theta_step(const Problem& p, const ThetaScheme& s,
                      std::span<const double> u_n, double t_n,
                      std::span<double> u_next, double tol, int newton_max,
                      const LuFactorization* cached_linear,
                      double* t_blocks = nullptr) {
    const int nx = p.nx();
    const auto nxs = static_cast<std::size_t>(nx);
    const double t_next = t_n + s.dt;

    RealVector f_old(nxs), btilde(nxs, 0.0);
    p.apply_f(u_n, t_n, f_old);
    if (p.has_forcing()) {
        RealVector b0(nxs), b1(nxs);
        p.forcing(t_n, b0);
        p.forcing(t_next, b1);
        for (std::size_t i = 0; i < nxs; ++i)
            btilde[i] = s.theta * b1[i] + (1.0 - s.theta) * b0[i];
    }

    copy(u_n, u_next);
    // stiff operators leave a roundoff floor proportional to their norm,
    // so an absolute tolerance below that floor is unreachable
    const double op_norm =
        p.mass().norm_inf() / s.dt + s.theta * p.jacobian(u_n, t_n).norm_inf();
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() *
                         op_norm * std::max(1.0, norm_inf(u_n));
    RealVector g(nxs), fw(nxs), du(nxs);
    for (int it = 0; it <= newton_max; ++it) {
        p.apply_f(u_next, t_next, fw);
        p.mass().matvec(u_next, g);
        p.mass().matvec_add(u_n, g, -1.0);
        for (std::size_t i = 0; i < nxs; ++i)
            g[i] = g[i] / s.dt + s.theta * fw[i] +
                   (1.0 - s.theta) * f_old[i] - btilde[i];
        const double gn = norm2(g);
        if (gn <= std::max(tol, floor)) return it;

        for (std::size_t i = 0; i < nxs; ++i) du[i] = -g[i];
        std::optional<ScopedTimer> timer;
        if (t_blocks) timer.emplace(*t_blocks);
        if (cached_linear) {
            cached_linear->solve(du);
        } else {
            DenseMatrix jac(nx, nx);
            jac.add_sparse(p.mass(), 1.0 / s.dt);
            jac.add_sparse(p.jacobian(u_next, t_next), s.theta);
            LuFactorization lu(std::move(jac));
            lu.solve(du);
        }
        timer.reset();
        axpy(1.0, du, u_next);
    }
    throw NewtonDivergedError("serial theta step: Newton failed to converge");
}

}  // namespace detail

/// Advances one implicit theta step. Solves
///   M(u' - u)/dt + theta f(u', t+dt) + (1-theta) f(u, t) = btilde
/// to residual norm <= tol; linear problems need a single block solve,
/// nonlinear problems run Newton on the one-step residual.
inline RealVector serial_theta_step(const Problem& p, const ThetaScheme& s,
                                    std::span<const double> u_n, double t_n,
                                    double tol = 1e-10, int newton_max = 30,
                                    int* newton_iters = nullptr) {
    RealVector u_next(static_cast<std::size_t>(p.nx()));
    const int iters =
        detail::theta_step(p, s, u_n, t_n, u_next, tol, newton_max, nullptr);
    if (newton_iters) *newton_iters = iters;
    return u_next;
}

struct SerialRun {
    Timeseries series;
    SolveReport report;
};

/// Marches n_steps of the theta method from u0. Linear problems factor the
/// real block once and reuse it for every step.
inline SerialRun run_serial(const Problem& p, const ThetaScheme& s,
                            RealVector u0, int n_steps, double t0 = 0.0,
                            double tol = 1e-10, int newton_max = 30) {
    if (n_steps < 1) throw Error("run_serial: n_steps must be >= 1");
    SerialRun out{Timeseries(n_steps, p.nx(), t0), SolveReport{}};
    out.series.initial_condition = u0;

    std::optional<LuFactorization> linear_lu;
    {
        ScopedTimer timer(out.report.timings.t_blocks);
        if (p.is_linear()) {
            DenseMatrix jac(p.nx(), p.nx());
            jac.add_sparse(p.mass(), 1.0 / s.dt);
            jac.add_sparse(p.jacobian(u0, t0), s.theta);
            linear_lu.emplace(std::move(jac));
        }
    }

    const auto wall_start = std::chrono::steady_clock::now();
    RealVector u = std::move(u0);
    double t = t0;
    int newton_total = 0;
    for (int n = 0; n < n_steps; ++n) {
        int iters = 0;
        try {
            iters = detail::theta_step(p, s, u, t, out.series.step(n), tol,
                                       newton_max,
                                       linear_lu ? &*linear_lu : nullptr,
                                       &out.report.timings.t_blocks);
        } catch (const NewtonDivergedError&) {
            throw NewtonDivergedError("run_serial: Newton diverged", n);
        }
        out.report.newton_per_step.push_back(std::max(iters, 1));
        newton_total += std::max(iters, 1);
        copy(out.series.step(n), u);
        t += s.dt;
    }
    out.report.steps = n_steps;
    out.report.m_s_mean =
        static_cast<double>(newton_total) / static_cast<double>(n_steps);
    out.report.k_s_mean = 1.0;  // direct block solves
    out.report.converged = true;
    out.report.fingerprint = p.fingerprint();
    out.report.timings.t_total += seconds_since(wall_start);
    return out;
}

}  // namespace paradiag
