#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>

#include "paradiag/aaos.hpp"
#include "paradiag/circulant.hpp"
#include "paradiag/krylov.hpp"
#include "paradiag/solve_report.hpp"
#include "paradiag/timeseries.hpp"

namespace paradiag {

enum class OuterMethod { richardson, gmres, fgmres };
enum class JacobianMode { exact, preconditioner_only };
enum class ResidualScaling { none, sqrt_nt };
enum class JacobianLinearization { current, time_average, initial, user };

struct ForcingOptions {
    bool eisenstat_walker = false;
    double fixed_tol = 1e-3;  // inner relative tolerance when fixed
};

struct SolverOptions {
    OuterMethod outer = OuterMethod::richardson;
    double rtol = 1e-11;
    double atol = 0.0;
    int max_outer = 200;
    int newton_max = 50;
    double alpha = 1e-4;
    ForcingOptions forcing;
    JacobianMode jacobian_mode = JacobianMode::exact;
    ResidualScaling residual_scaling = ResidualScaling::none;
    ReferenceState reference;
    JacobianLinearization jac_linearization = JacobianLinearization::current;
    std::optional<RealVector> jac_user_state;  // length nt*nx when used
    BlockOptions block;
    int threads = 1;
    double richardson_damping = 1.0;  // kept at 1 for all shipped experiments

    void validate() const {
        if (!(rtol > 0.0) || rtol >= 1.0)
            throw ConfigError("SolverOptions: rtol must be in (0, 1)");
        if (max_outer < 1) throw ConfigError("SolverOptions: max_outer >= 1");
        if (!(alpha > 0.0) || alpha > 1.0)
            throw ConfigError("SolverOptions: alpha must be in (0, 1]");
        if (threads < 1) throw ConfigError("SolverOptions: threads >= 1");
    }
};

/// Preconditioned Richardson on A x = rhs,
///   x <- x + damping * P^{-1}(rhs - A x).
/// The stopping test uses the preconditioned residual norm, so a converged
/// solve costs m_p + 1 preconditioner applications: the initial one that
/// seeds the test is not counted in m_p.
inline RealVector richardson_solve(const ApplyOp& apply_a,
                                   const ApplyOp& apply_pinv,
                                   std::span<const double> rhs, RealVector x,
                                   const SolverOptions& opts,
                                   SolveReport& report) {
    const std::size_t n = rhs.size();
    RealVector r(n), z(n);

    auto compute_residual = [&](const RealVector& xv) {
        apply_a(xv, r);
        for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    };

    compute_residual(x);
    apply_pinv(r, z);
    ++report.pc_applies;
    const double h0 = norm2(z);
    report.residual_history.push_back(h0);
    if (h0 <= opts.atol || h0 == 0.0) {
        report.converged = true;
        report.stop_rule = "preconditioned residual at or below atol";
        return x;
    }
    const double target = std::max(opts.atol, opts.rtol * h0);
    double prev = h0;
    for (int it = 1; it <= opts.max_outer; ++it) {
        axpy(opts.richardson_damping, z, x);
        compute_residual(x);
        apply_pinv(r, z);
        ++report.pc_applies;
        report.m_p = it;
        const double h = norm2(z);
        report.residual_history.push_back(h);
        report.contraction_rates.push_back(h / prev);
        prev = h;
        if (h <= target) {
            report.converged = true;
            report.stop_rule = "preconditioned residual <= max(atol, rtol*r0)";
            return x;
        }
    }
    throw MaxIterationsError("richardson_solve: iteration cap reached",
                             report.residual_history);
}

/// (F)GMRES on the all-at-once operator; right preconditioned, with the
/// flexible variant storing preconditioned basis vectors so it needs one
/// fewer application than plain GMRES.
inline RealVector gmres_solve(const ApplyOp& apply_a, const ApplyOp* apply_pinv,
                              std::span<const double> rhs, RealVector x,
                              const SolverOptions& opts, bool flexible,
                              SolveReport& report) {
    KrylovOptions kopts;
    kopts.rtol = opts.rtol;
    kopts.atol = opts.atol;
    kopts.max_iter = opts.max_outer;
    kopts.flexible = flexible;
    const KrylovResult kr = gmres(apply_a, apply_pinv, rhs, x, kopts);
    report.m_p += kr.iterations;
    report.pc_applies += kr.pc_applies;
    report.residual_history.insert(report.residual_history.end(),
                                   kr.history.begin(), kr.history.end());
    for (std::size_t i = 1; i < kr.history.size(); ++i)
        report.contraction_rates.push_back(kr.history[i] / kr.history[i - 1]);
    report.converged = kr.converged;
    report.stop_rule = "true residual <= max(atol, rtol*r0)";
    if (!kr.converged)
        throw MaxIterationsError("gmres_solve: iteration cap reached",
                                 report.residual_history);
    return x;
}

namespace detail {

inline RealVector jacobian_linearization_state(
    const AllAtOnceForm& form, std::span<const double> u,
    std::span<const double> ic, const SolverOptions& opts) {
    const int nx = form.nx();
    RealVector state(form.size());
    switch (opts.jac_linearization) {
        case JacobianLinearization::current:
            state.assign(u.begin(), u.end());
            break;
        case JacobianLinearization::time_average: {
            ReferenceState ref;
            ref.mode = ReferenceMode::time_average;
            const auto res = resolve_reference(form, u, ic, ref);
            for (int n = 0; n < form.nt; ++n)
                copy(res.u_hat, slice(std::span<double>(state), n, nx));
            break;
        }
        case JacobianLinearization::initial:
            for (int n = 0; n < form.nt; ++n)
                copy(ic, slice(std::span<double>(state), n, nx));
            break;
        case JacobianLinearization::user:
            if (!opts.jac_user_state || opts.jac_user_state->size() != form.size())
                throw ConfigError("jacobian linearization: user state missing");
            state = *opts.jac_user_state;
            break;
    }
    return state;
}

}  // namespace detail

struct WindowResult {
    Timeseries u;
    SolveReport report;
};

/// Quasi-Newton on the nonlinear all-at-once system. Every Newton
/// iteration re-resolves the reference state, rebuilds the circulant
/// blocks, and solves the Jacobian system inexactly with the requested
/// outer Krylov method; jacobian_mode preconditioner_only instead takes
/// the step P^{-1}(-r) directly.
inline WindowResult newton_solve(const AllAtOnceForm& form,
                                 const Timeseries& guess,
                                 const SolverOptions& opts) {
    opts.validate();
    WindowResult out{guess, SolveReport{}};
    SolveReport& report = out.report;
    report.fingerprint = form.problem->fingerprint();
    const auto wall_start = std::chrono::steady_clock::now();

    const std::size_t n = form.size();
    const double scale =
        opts.residual_scaling == ResidualScaling::sqrt_nt
            ? std::sqrt(static_cast<double>(form.nt))
            : 1.0;
    const CirculantEigenvalues eigs =
        circulant_eigenvalues(form.nt, form.scheme.dt, form.scheme.theta,
                              opts.alpha);

    Timeseries& u = out.u;
    RealVector r(n);
    double r0n = 0.0, prev_rn = 0.0, prev_lin_res = 0.0;
    double forcing = opts.forcing.eisenstat_walker ? 0.1 : opts.forcing.fixed_tol;
    int consecutive_increases = 0;

    for (int m = 0;; ++m) {
        aaos_residual(form, u.data, u.initial_condition, r,
                      &report.timings);
        const double rn = norm2(r);
        report.residual_history.push_back(rn);
        if (m == 0) {
            r0n = rn;
        } else {
            report.contraction_rates.push_back(rn / prev_rn);
            consecutive_increases = rn > prev_rn ? consecutive_increases + 1 : 0;
        }
        if (rn <= std::max(opts.atol * scale, opts.rtol * r0n)) {
            report.converged = true;
            report.stop_rule = "space-time residual <= max(atol*scale, rtol*r0)";
            break;
        }
        if (consecutive_increases >= 3)
            throw NewtonDivergedError(
                "newton_solve: residual increased over 3 iterations", m);
        if (m >= opts.newton_max)
            throw NewtonDivergedError("newton_solve: iteration cap reached", m);

        // Eisenstat-Walker choice 1 with the power safeguard
        if (opts.forcing.eisenstat_walker && m > 0) {
            double eta = std::abs(rn - prev_lin_res) / prev_rn;
            const double safeguard =
                std::pow(forcing, 0.5 * (1.0 + std::sqrt(5.0)));
            if (safeguard > 0.1) eta = std::max(eta, safeguard);
            forcing = std::clamp(eta, 1e-8, 0.9);
        }
        double inner_tol =
            opts.forcing.eisenstat_walker ? forcing : opts.forcing.fixed_tol;
        // a linear problem finishes in one Newton step when the inner
        // solve is driven to the outer tolerance
        if (form.problem->is_linear()) inner_tol = 0.5 * opts.rtol;

        const ResolvedReference ref =
            resolve_reference(form, u.data, u.initial_condition,
                              form.problem->is_linear()
                                  ? ReferenceState{ReferenceMode::linear, {}, {}}
                                  : opts.reference);
        const CsrMatrix jac_ref =
            form.problem->jacobian(ref.u_hat, ref.t_hat);
        CirculantPreconditioner pc(form, eigs, jac_ref, opts.block,
                                   opts.threads);

        RealVector neg_r(n), delta(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) neg_r[i] = -r[i];

        if (opts.jacobian_mode == JacobianMode::preconditioner_only) {
            pc.apply(neg_r, delta);
            report.m_p += 1;
            prev_lin_res = 0.0;  // step is exact for P
        } else {
            const RealVector lin_state = detail::jacobian_linearization_state(
                form, u.data, u.initial_condition, opts);
            const AaosJacobian jac(form, lin_state);
            ApplyOp apply_a = [&](std::span<const double> v,
                                  std::span<double> w) {
                jac.apply(v, w, &report.timings);
            };
            ApplyOp apply_pinv = [&pc](std::span<const double> v,
                                       std::span<double> w) { pc.apply(v, w); };
            SolverOptions inner = opts;
            inner.rtol = inner_tol;
            inner.atol = 0.0;
            SolveReport lin_report;
            switch (opts.outer) {
                case OuterMethod::richardson:
                    delta = richardson_solve(apply_a, apply_pinv, neg_r,
                                             std::move(delta), inner, lin_report);
                    break;
                case OuterMethod::gmres:
                    delta = gmres_solve(apply_a, &apply_pinv, neg_r,
                                        std::move(delta), inner, false,
                                        lin_report);
                    break;
                case OuterMethod::fgmres:
                    delta = gmres_solve(apply_a, &apply_pinv, neg_r,
                                        std::move(delta), inner, true,
                                        lin_report);
                    break;
            }
            report.m_p += lin_report.m_p;
            prev_lin_res = lin_report.residual_history.empty()
                               ? 0.0
                               : lin_report.residual_history.back();
        }
        report.pc_applies += pc.applies();
        report.timings.add(pc.timings());
        if (report.newton_iterations == 0) {
            report.k_p_max = pc.stats().k_p_max;
            report.k_p_min = pc.stats().k_p_min;
        } else {
            report.k_p_max = std::max(report.k_p_max, pc.stats().k_p_max);
            report.k_p_min = std::min(report.k_p_min, pc.stats().k_p_min);
        }
        report.block_iterations = pc.stats().iterations;

        axpy(1.0, delta, u.data);
        report.newton_iterations = m + 1;
        prev_rn = rn;
    }
    report.timings.t_total += seconds_since(wall_start);
    return out;
}

/// Solves one window of the all-at-once system starting from a guess.
/// Linear problems go straight to the requested Krylov method on
/// A u = btilde with a single preconditioner build; nonlinear problems run
/// the quasi-Newton loop.
inline WindowResult solve_window(const AllAtOnceForm& form,
                                 const Timeseries& guess,
                                 const SolverOptions& opts) {
    opts.validate();
    if (!form.problem->is_linear()) return newton_solve(form, guess, opts);

    WindowResult out{guess, SolveReport{}};
    SolveReport& report = out.report;
    report.fingerprint = form.problem->fingerprint();
    const auto wall_start = std::chrono::steady_clock::now();

    const RealVector rhs = aaos_rhs(form, guess.initial_condition);
    const CirculantEigenvalues eigs = circulant_eigenvalues(
        form.nt, form.scheme.dt, form.scheme.theta, opts.alpha);
    ReferenceState ref;
    ref.mode = ReferenceMode::linear;
    const ResolvedReference res =
        resolve_reference(form, guess.data, guess.initial_condition, ref);
    const CsrMatrix jac_ref = form.problem->jacobian(res.u_hat, res.t_hat);
    CirculantPreconditioner pc(form, eigs, jac_ref, opts.block, opts.threads);
    const AaosJacobian jac(form);

    ApplyOp apply_a = [&](std::span<const double> v, std::span<double> w) {
        jac.apply(v, w, &report.timings);
    };
    ApplyOp apply_pinv = [&pc](std::span<const double> v, std::span<double> w) {
        pc.apply(v, w);
    };

    try {
        switch (opts.outer) {
            case OuterMethod::richardson:
                out.u.data = richardson_solve(apply_a, apply_pinv, rhs,
                                              std::move(out.u.data), opts,
                                              report);
                break;
            case OuterMethod::gmres:
                out.u.data = gmres_solve(apply_a, &apply_pinv, rhs,
                                         std::move(out.u.data), opts, false,
                                         report);
                break;
            case OuterMethod::fgmres:
                out.u.data = gmres_solve(apply_a, &apply_pinv, rhs,
                                         std::move(out.u.data), opts, true,
                                         report);
                break;
        }
    } catch (...) {
        report.timings.add(pc.timings());
        throw;
    }
    report.newton_iterations = 1;
    report.pc_applies = pc.applies();
    report.k_p_max = pc.stats().k_p_max;
    report.k_p_min = pc.stats().k_p_min;
    report.block_iterations = pc.stats().iterations;
    report.timings.add(pc.timings());
    report.timings.t_total += seconds_since(wall_start);
    return out;
}

}  // namespace paradiag
