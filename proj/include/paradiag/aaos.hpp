#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "paradiag/problem.hpp"
#include "paradiag/solve_report.hpp"
#include "paradiag/sparse.hpp"
#include "paradiag/timeseries.hpp"
#include "paradiag/vec.hpp"

namespace paradiag {

/// The all-at-once form: Nt coupled theta steps of one problem.
/// Step n (0-based) is the unknown at time t0 + (n+1)*dt.
struct AllAtOnceForm {
    ProblemPtr problem;
    ThetaScheme scheme;
    int nt;
    double t0 = 0.0;

    AllAtOnceForm(ProblemPtr p, ThetaScheme s, int nt_, double t0_ = 0.0)
        : problem(std::move(p)), scheme(s), nt(nt_), t0(t0_) {
        if (!problem) throw Error("AllAtOnceForm: null problem");
        if (nt < 1) throw Error("AllAtOnceForm: Nt must be >= 1");
    }

    int nx() const { return problem->nx(); }
    std::size_t size() const {
        return static_cast<std::size_t>(nt) * static_cast<std::size_t>(nx());
    }
    double time_of(int n) const { return t0 + (n + 1) * scheme.dt; }
};

namespace detail {

inline std::span<const double> slice(std::span<const double> v, int n, int nx) {
    return v.subspan(static_cast<std::size_t>(n) * static_cast<std::size_t>(nx),
                     static_cast<std::size_t>(nx));
}
inline std::span<double> slice(std::span<double> v, int n, int nx) {
    return v.subspan(static_cast<std::size_t>(n) * static_cast<std::size_t>(nx),
                     static_cast<std::size_t>(nx));
}

}  // namespace detail

/// Residual of the all-at-once system,
///   r^n = M(u^n - u^{n-1})/dt + theta f(u^n, t^n)
///       + (1-theta) f(u^{n-1}, t^{n-1}) - btilde^n,
/// where the n = 0 row reads the initial condition through the one-step
/// lookback (an in-process copy at desk scale; slice boundaries exchange
/// exactly this one previous step).
inline void aaos_residual(const AllAtOnceForm& form, std::span<const double> u,
                          std::span<const double> ic, std::span<double> r,
                          Timings* timings = nullptr) {
    std::optional<ScopedTimer> timer;
    if (timings) timer.emplace(timings->t_residual);
    const Problem& p = *form.problem;
    const int nx = p.nx();
    const int nt = form.nt;
    const double dt = form.scheme.dt;
    const double th = form.scheme.theta;
    const auto nxs = static_cast<std::size_t>(nx);

    RealVector f_prev(nxs), f_cur(nxs), b_prev(nxs, 0.0), b_cur(nxs, 0.0);
    p.apply_f(ic, form.t0, f_prev);
    if (p.has_forcing()) p.forcing(form.t0, b_prev);

    std::span<const double> u_prev = ic;
    for (int n = 0; n < nt; ++n) {
        const double tn = form.time_of(n);
        auto un = detail::slice(u, n, nx);
        auto rn = detail::slice(r, n, nx);
        p.apply_f(un, tn, f_cur);
        if (p.has_forcing()) p.forcing(tn, b_cur);
        p.mass().matvec(un, rn);
        p.mass().matvec_add(u_prev, rn, -1.0);
        for (std::size_t i = 0; i < nxs; ++i) {
            const double btilde =
                p.has_forcing() ? th * b_cur[i] + (1.0 - th) * b_prev[i] : 0.0;
            rn[i] = rn[i] / dt + th * f_cur[i] + (1.0 - th) * f_prev[i] - btilde;
        }
        std::swap(f_prev, f_cur);
        std::swap(b_prev, b_cur);
        u_prev = un;
    }
}

inline void aaos_residual(const AllAtOnceForm& form, const Timeseries& u,
                          std::span<double> r, Timings* timings = nullptr) {
    aaos_residual(form, u.data, u.initial_condition, r, timings);
}

/// Right-hand side of the linear all-at-once system, including the
/// initial-condition contribution in the first row. Only meaningful for
/// linear problems, where residual(u) = A u - rhs.
inline RealVector aaos_rhs(const AllAtOnceForm& form,
                           std::span<const double> ic) {
    if (!form.problem->is_linear())
        throw Error("aaos_rhs: defined for linear problems only");
    RealVector zero(form.size(), 0.0), r(form.size());
    aaos_residual(form, zero, ic, r);
    for (auto& v : r) v = -v;
    return r;
}

/// Matrix-free action of the all-at-once Jacobian, with the per-timestep
/// spatial Jacobians frozen at a linearization state. Linear problems share
/// one stiffness block across all steps.
class AaosJacobian {
public:
    /// Linear problem: constant spatial Jacobian.
    explicit AaosJacobian(const AllAtOnceForm& form) : form_(&form) {
        if (!form.problem->is_linear())
            throw Error("AaosJacobian: nonlinear problem needs a state");
        RealVector zero(static_cast<std::size_t>(form.nx()), 0.0);
        blocks_.push_back(form.problem->jacobian(zero, form.t0));
        shared_block_ = true;
    }

    /// Nonlinear problem: blocks evaluated at u_lin (length nt*nx).
    AaosJacobian(const AllAtOnceForm& form, std::span<const double> u_lin)
        : form_(&form) {
        blocks_.reserve(static_cast<std::size_t>(form.nt));
        for (int n = 0; n < form.nt; ++n)
            blocks_.push_back(form.problem->jacobian(
                detail::slice(u_lin, n, form.nx()), form.time_of(n)));
        shared_block_ = false;
    }

    const CsrMatrix& block(int n) const {
        return shared_block_ ? blocks_[0] : blocks_[static_cast<std::size_t>(n)];
    }

    /// w = J v. The derivative is with respect to the unknown steps only,
    /// so the lookback of the first row is zero.
    void apply(std::span<const double> v, std::span<double> w,
               Timings* timings = nullptr) const {
        std::optional<ScopedTimer> timer;
        if (timings) timer.emplace(timings->t_jac);
        const AllAtOnceForm& form = *form_;
        const int nx = form.nx();
        const int nt = form.nt;
        const double dt = form.scheme.dt;
        const double th = form.scheme.theta;
        const auto nxs = static_cast<std::size_t>(nx);
        const CsrMatrix& m = form.problem->mass();

        RealVector jv(nxs);
        for (int n = 0; n < nt; ++n) {
            auto vn = detail::slice(v, n, nx);
            auto wn = detail::slice(w, n, nx);
            m.matvec(vn, wn);
            if (n > 0) m.matvec_add(detail::slice(v, n - 1, nx), wn, -1.0);
            for (std::size_t i = 0; i < nxs; ++i) wn[i] /= dt;
            block(n).matvec(vn, jv);
            axpy(th, jv, wn);
            if (n > 0) {
                block(n - 1).matvec(detail::slice(v, n - 1, nx), jv);
                axpy(1.0 - th, jv, wn);
            }
        }
    }

private:
    const AllAtOnceForm* form_;
    std::vector<CsrMatrix> blocks_;
    bool shared_block_ = false;
};

}  // namespace paradiag
