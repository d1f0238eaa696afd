#pragma once

#include <cmath>
#include <mutex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "paradiag/aaos.hpp"
#include "paradiag/complex_proxy.hpp"
#include "paradiag/errors.hpp"
#include "paradiag/solve_report.hpp"
#include "paradiag/threading.hpp"
#include "paradiag/timeseries.hpp"
#include "paradiag/weighted_dft.hpp"

namespace paradiag {

/// Eigenvalues of the alpha-circulant time matrices C1 (the discrete time
/// derivative, with its wraparound entry scaled by -alpha) and C2 (the
/// theta weighting, wraparound scaled by +alpha). Both are diagonalized by
/// the same weighted DFT, so the k-th complex block of the preconditioner
/// is lambda1[k]*M + lambda2[k]*Jhat.
struct CirculantEigenvalues {
    int nt = 0;
    double dt = 0.0, theta = 0.0, alpha = 0.0;
    ComplexVector lambda1, lambda2;
    std::vector<int> degenerate;  // k where both coefficients vanish
};

/// Eigenvalues as the weighted forward transform of the first columns,
/// c1 = (1/dt)(1, -1, 0, ...) and c2 = (theta, 1-theta, 0, ...).
/// For Nt = 1 the diagonal and wraparound coincide.
inline CirculantEigenvalues circulant_eigenvalues(int nt, double dt,
                                                  double theta, double alpha) {
    if (nt < 1) throw Error("circulant_eigenvalues: Nt must be >= 1");
    if (!(dt > 0.0)) throw Error("circulant_eigenvalues: dt must be > 0");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw Error("circulant_eigenvalues: alpha must be in (0, 1]");

    CirculantEigenvalues out;
    out.nt = nt;
    out.dt = dt;
    out.theta = theta;
    out.alpha = alpha;
    if (nt == 1) {
        out.lambda1 = {Complex((1.0 - alpha) / dt, 0.0)};
        out.lambda2 = {Complex(theta + (1.0 - theta) * alpha, 0.0)};
    } else {
        WeightedDftPlan plan(nt, alpha);
        ComplexVector c1(static_cast<std::size_t>(nt), Complex(0.0, 0.0));
        ComplexVector c2(static_cast<std::size_t>(nt), Complex(0.0, 0.0));
        c1[0] = Complex(1.0 / dt, 0.0);
        c1[1] = Complex(-1.0 / dt, 0.0);
        c2[0] = Complex(theta, 0.0);
        c2[1] = Complex(1.0 - theta, 0.0);
        plan.forward(std::span<Complex>(c1));
        plan.forward(std::span<Complex>(c2));
        out.lambda1 = std::move(c1);
        out.lambda2 = std::move(c2);
    }
    for (int k = 0; k < nt; ++k) {
        // lambda1 is scaled by 1/dt, so compare against its natural scale
        if (std::abs(out.lambda1[static_cast<std::size_t>(k)]) * dt < 1e-14 &&
            std::abs(out.lambda2[static_cast<std::size_t>(k)]) < 1e-14)
            out.degenerate.push_back(k);
    }
    return out;
}

/// Block-coefficient ratios psi_k = (lambda1_k / lambda2_k) * dt * theta,
/// the per-frequency mass coefficient relative to the serial block's.
inline ComplexVector psi_ratios(const CirculantEigenvalues& eigs) {
    ComplexVector psi(eigs.lambda1.size());
    for (std::size_t k = 0; k < psi.size(); ++k) {
        if (std::abs(eigs.lambda2[k]) < 1e-14)
            throw DivisionByZeroError("psi ratio undefined: lambda2 is zero",
                                      static_cast<int>(k));
        psi[k] = eigs.lambda1[k] / eigs.lambda2[k] * eigs.dt * eigs.theta;
    }
    return psi;
}

enum class ReferenceMode { time_average, initial, user, linear };

/// Constant-in-time state the preconditioner blocks are linearized around.
struct ReferenceState {
    ReferenceMode mode = ReferenceMode::time_average;
    std::optional<RealVector> user_state;
    std::optional<double> reference_time;
};

struct ResolvedReference {
    RealVector u_hat;
    double t_hat = 0.0;
};

/// time_average: u_hat = mean over the window's steps, t_hat = window
/// midpoint. initial: the initial condition at t0. user: as given.
/// linear: the state is irrelevant because the Jacobian is constant.
inline ResolvedReference resolve_reference(const AllAtOnceForm& form,
                                           std::span<const double> u,
                                           std::span<const double> ic,
                                           const ReferenceState& ref) {
    const int nx = form.nx();
    const auto nxs = static_cast<std::size_t>(nx);
    ResolvedReference out;
    switch (ref.mode) {
        case ReferenceMode::time_average: {
            out.u_hat.assign(nxs, 0.0);
            for (int n = 0; n < form.nt; ++n)
                axpy(1.0 / form.nt, detail::slice(u, n, nx), out.u_hat);
            out.t_hat = ref.reference_time.value_or(
                form.t0 + 0.5 * form.nt * form.scheme.dt);
            break;
        }
        case ReferenceMode::initial:
            out.u_hat.assign(ic.begin(), ic.end());
            out.t_hat = ref.reference_time.value_or(form.t0);
            break;
        case ReferenceMode::user:
            if (!ref.user_state)
                throw ConfigError("reference state: user mode needs a state");
            out.u_hat = *ref.user_state;
            out.t_hat = ref.reference_time.value_or(form.t0);
            break;
        case ReferenceMode::linear:
            out.u_hat.assign(nxs, 0.0);
            out.t_hat = form.t0;
            break;
    }
    return out;
}

inline ResolvedReference resolve_reference(const AllAtOnceForm& form,
                                           const Timeseries& u,
                                           const ReferenceState& ref) {
    return resolve_reference(form, u.data, u.initial_condition, ref);
}

struct BlockStats {
    std::vector<int> iterations;  // per frequency, last apply
    int k_p_max = 0;              // across all applies
    int k_p_min = 0;
};

/// The alpha-circulant preconditioner, applied in three steps:
///   1. weighted forward FFT along time at every spatial DoF,
///   2. independent complex block solve per frequency,
///   3. weighted inverse FFT along time.
/// Steps 1 and 3 need time-aligned data, step 2 space-aligned; the layout
/// changes are in-memory transposes here and are timed as such. Block
/// factorizations are built once per instance and reused across applies,
/// so for nonlinear problems a new instance is built whenever the
/// reference state moves.
class CirculantPreconditioner {
public:
    CirculantPreconditioner(const AllAtOnceForm& form,
                            CirculantEigenvalues eigs,
                            const CsrMatrix& jac_ref, BlockOptions block_opts,
                            int threads = 1)
        : form_(&form), eigs_(std::move(eigs)), threads_(std::max(1, threads)),
          plan_(form.nt, eigs_.alpha) {
        if (eigs_.nt != form.nt)
            throw Error("CirculantPreconditioner: eigenvalue length mismatch");
        const CsrMatrix& m = form.problem->mass();
        blocks_.reserve(static_cast<std::size_t>(form.nt));
        // factorization cost is block-solve work
        ScopedTimer timer(timings_.t_blocks);
        std::vector<std::optional<ComplexBlockSolver>> built(
            static_cast<std::size_t>(form.nt));
        std::optional<SingularBlockError> failure;
        std::mutex failure_mutex;
        parallel_for(form.nt, threads_, [&](int k) {
            try {
                built[static_cast<std::size_t>(k)].emplace(
                    jac_ref, m, eigs_.lambda1[static_cast<std::size_t>(k)],
                    eigs_.lambda2[static_cast<std::size_t>(k)], block_opts, k);
            } catch (const SingularBlockError& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure.emplace(e.what(), k);
            }
        });
        if (failure) throw *failure;
        for (auto& b : built) blocks_.push_back(std::move(*b));
        stats_.iterations.assign(static_cast<std::size_t>(form.nt), 0);
    }

    int nt() const { return form_->nt; }
    int nx() const { return form_->nx(); }

    /// x = P^{-1} rhs for a real space-time vector (length nt*nx).
    void apply(std::span<const double> rhs, std::span<double> x) {
        const int nt = form_->nt;
        const int nx = form_->nx();
        const auto nts = static_cast<std::size_t>(nt);
        const auto nxs = static_cast<std::size_t>(nx);

        ComplexVector tbuf(nts * nxs);  // [x][k], time-contiguous per DoF
        {
            ScopedTimer timer(timings_.t_transpose);
            for (std::size_t n = 0; n < nts; ++n)
                for (std::size_t i = 0; i < nxs; ++i)
                    tbuf[i * nts + n] = Complex(rhs[n * nxs + i], 0.0);
        }
        {
            ScopedTimer timer(timings_.t_fft);
            parallel_for(nx, threads_, [&](int i) {
                plan_.forward(std::span<Complex>(tbuf).subspan(
                    static_cast<std::size_t>(i) * nts, nts));
            });
        }
        // space-aligned split storage for the block solves
        RealVector z_re(nts * nxs), z_im(nts * nxs);
        {
            ScopedTimer timer(timings_.t_transpose);
            for (std::size_t i = 0; i < nxs; ++i)
                for (std::size_t k = 0; k < nts; ++k) {
                    z_re[k * nxs + i] = tbuf[i * nts + k].real();
                    z_im[k * nxs + i] = tbuf[i * nts + k].imag();
                }
        }
        {
            ScopedTimer timer(timings_.t_blocks);
            RealVector y_re(nts * nxs), y_im(nts * nxs);
            std::optional<MaxIterationsError> failure;
            std::mutex failure_mutex;
            parallel_for(nt, threads_, [&](int k) {
                const auto ks = static_cast<std::size_t>(k);
                auto re_in = std::span<const double>(z_re).subspan(ks * nxs, nxs);
                auto im_in = std::span<const double>(z_im).subspan(ks * nxs, nxs);
                auto re_out = std::span<double>(y_re).subspan(ks * nxs, nxs);
                auto im_out = std::span<double>(y_im).subspan(ks * nxs, nxs);
                try {
                    stats_.iterations[ks] =
                        blocks_[ks].solve(re_in, im_in, re_out, im_out);
                } catch (const MaxIterationsError& e) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure)
                        failure.emplace(e.what(), e.history, k);
                }
            });
            if (failure) throw *failure;
            z_re.swap(y_re);
            z_im.swap(y_im);
        }
        {
            ScopedTimer timer(timings_.t_transpose);
            for (std::size_t i = 0; i < nxs; ++i)
                for (std::size_t k = 0; k < nts; ++k)
                    tbuf[i * nts + k] =
                        Complex(z_re[k * nxs + i], z_im[k * nxs + i]);
        }
        {
            ScopedTimer timer(timings_.t_fft);
            parallel_for(nx, threads_, [&](int i) {
                plan_.inverse(std::span<Complex>(tbuf).subspan(
                    static_cast<std::size_t>(i) * nts, nts));
            });
        }
        {
            ScopedTimer timer(timings_.t_transpose);
            // input is real and the spectrum conjugate-symmetric, so the
            // imaginary part is pure roundoff
            for (std::size_t n = 0; n < nts; ++n)
                for (std::size_t i = 0; i < nxs; ++i)
                    x[n * nxs + i] = tbuf[i * nts + n].real();
        }
        ++applies_;
        int kmax = 0, kmin = stats_.iterations.empty() ? 0 : stats_.iterations[0];
        for (int it : stats_.iterations) {
            kmax = std::max(kmax, it);
            kmin = std::min(kmin, it);
        }
        stats_.k_p_max = std::max(stats_.k_p_max, kmax);
        stats_.k_p_min = applies_ == 1 ? kmin : std::min(stats_.k_p_min, kmin);
    }

    const BlockStats& stats() const { return stats_; }
    const Timings& timings() const { return timings_; }
    int applies() const { return applies_; }
    const CirculantEigenvalues& eigenvalues() const { return eigs_; }

private:
    const AllAtOnceForm* form_;
    CirculantEigenvalues eigs_;
    int threads_;
    WeightedDftPlan plan_;
    std::vector<ComplexBlockSolver> blocks_;
    BlockStats stats_;
    Timings timings_;
    int applies_ = 0;
};

/// One-shot three-step apply: resolves the reference state, builds the
/// blocks, applies the inverse once.
inline std::pair<RealVector, BlockStats> apply_circulant_inverse(
    const AllAtOnceForm& form, const CirculantEigenvalues& eigs,
    const ReferenceState& ref, const Timeseries& rhs,
    BlockOptions block_opts = {}, int threads = 1) {
    const ResolvedReference res = resolve_reference(form, rhs, ref);
    const CsrMatrix jac_ref = form.problem->jacobian(res.u_hat, res.t_hat);
    CirculantPreconditioner pc(form, eigs, jac_ref, block_opts, threads);
    RealVector x(form.size());
    pc.apply(rhs.data, x);
    return {std::move(x), pc.stats()};
}

}  // namespace paradiag
