#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "paradiag/errors.hpp"
#include "paradiag/vec.hpp"

namespace paradiag {

/// y = Op(x); x and y never alias.
using ApplyOp = std::function<void(std::span<const double>, std::span<double>)>;

struct KrylovOptions {
    double rtol = 1e-8;
    double atol = 0.0;
    int max_iter = 200;
    bool flexible = false;  // store one preconditioned basis vector per iteration
    int fixed_iters = 0;    // > 0: run exactly this many iterations, no tolerance test
};

struct KrylovResult {
    int iterations = 0;
    int pc_applies = 0;
    bool converged = false;
    double initial_residual = 0.0;
    double final_residual = 0.0;
    std::vector<double> history;  // residual norm per iteration, starting at r0
};

/// Right-preconditioned GMRES. The residual estimate maintained by the
/// Givens-rotation least squares is the true unpreconditioned residual norm.
/// With flexible=false the correction is formed as P^{-1}(V y), costing one
/// extra preconditioner application; with flexible=true the preconditioned
/// vectors are stored and reused, costing one application per iteration.
/// A null preconditioner means unpreconditioned GMRES.
inline KrylovResult gmres(const ApplyOp& apply_a, const ApplyOp* apply_pinv,
                          std::span<const double> rhs, std::span<double> x,
                          const KrylovOptions& opts) {
    const std::size_t n = rhs.size();
    KrylovResult res;

    RealVector r(n), w(n);
    apply_a(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    double beta = norm2(r);
    res.initial_residual = beta;
    res.history.push_back(beta);
    const double target = std::max(opts.atol, opts.rtol * beta);
    if (beta == 0.0 || (opts.fixed_iters <= 0 && beta <= target)) {
        res.converged = true;
        res.final_residual = beta;
        return res;
    }

    const int m = opts.fixed_iters > 0 ? opts.fixed_iters : opts.max_iter;
    std::vector<RealVector> basis;   // v_0 .. v_j
    std::vector<RealVector> pre;     // z_j = P^{-1} v_j (flexible only)
    std::vector<RealVector> hess;    // column j holds h(0..j+1, j)
    std::vector<double> cs, sn;
    RealVector g(static_cast<std::size_t>(m) + 1, 0.0);

    basis.emplace_back(r);
    scale(1.0 / beta, basis[0]);
    g[0] = beta;

    const double breakdown_tol = 1e-14 * std::max(1.0, beta);
    int j = 0;
    bool happy = false;
    for (; j < m; ++j) {
        RealVector z;
        const RealVector* zv = &basis[static_cast<std::size_t>(j)];
        if (apply_pinv) {
            z.resize(n);
            (*apply_pinv)(basis[static_cast<std::size_t>(j)], z);
            ++res.pc_applies;
            zv = &z;
        }
        if (opts.flexible) pre.push_back(apply_pinv ? *zv : basis[static_cast<std::size_t>(j)]);
        apply_a(*zv, w);

        hess.emplace_back(static_cast<std::size_t>(j) + 2, 0.0);
        auto& h = hess.back();
        for (int i = 0; i <= j; ++i) {
            h[static_cast<std::size_t>(i)] = dot(w, basis[static_cast<std::size_t>(i)]);
            axpy(-h[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(i)], w);
        }
        const double hnext = norm2(w);
        h[static_cast<std::size_t>(j) + 1] = hnext;

        // apply accumulated rotations to the new column
        for (int i = 0; i < j; ++i) {
            const double t = cs[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)] +
                             sn[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i) + 1];
            h[static_cast<std::size_t>(i) + 1] =
                -sn[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)] +
                cs[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i) + 1];
            h[static_cast<std::size_t>(i)] = t;
        }
        const double denom = std::hypot(h[static_cast<std::size_t>(j)], hnext);
        const double c = denom == 0.0 ? 1.0 : h[static_cast<std::size_t>(j)] / denom;
        const double s = denom == 0.0 ? 0.0 : hnext / denom;
        cs.push_back(c);
        sn.push_back(s);
        h[static_cast<std::size_t>(j)] = c * h[static_cast<std::size_t>(j)] + s * hnext;
        h[static_cast<std::size_t>(j) + 1] = 0.0;
        g[static_cast<std::size_t>(j) + 1] = -s * g[static_cast<std::size_t>(j)];
        g[static_cast<std::size_t>(j)] = c * g[static_cast<std::size_t>(j)];

        const double rho = std::abs(g[static_cast<std::size_t>(j) + 1]);
        res.history.push_back(rho);
        res.iterations = j + 1;

        if (hnext <= breakdown_tol) {
            happy = true;
            ++j;
            break;
        }
        if (opts.fixed_iters > 0) {
            if (j + 1 >= opts.fixed_iters) {
                ++j;
                break;
            }
        } else if (rho <= target) {
            ++j;
            break;
        }
        basis.emplace_back(w);
        scale(1.0 / hnext, basis.back());
    }

    const int k = res.iterations;
    if (k > 0) {
        // back-substitute the triangular system
        RealVector y(static_cast<std::size_t>(k), 0.0);
        for (int i = k - 1; i >= 0; --i) {
            double s = g[static_cast<std::size_t>(i)];
            for (int l = i + 1; l < k; ++l)
                s -= hess[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] *
                     y[static_cast<std::size_t>(l)];
            y[static_cast<std::size_t>(i)] =
                s / hess[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        }
        if (opts.flexible || !apply_pinv) {
            const auto& zs = opts.flexible ? pre : basis;
            for (int l = 0; l < k; ++l)
                axpy(y[static_cast<std::size_t>(l)], zs[static_cast<std::size_t>(l)], x);
        } else {
            RealVector u(n, 0.0), z(n);
            for (int l = 0; l < k; ++l)
                axpy(y[static_cast<std::size_t>(l)], basis[static_cast<std::size_t>(l)], u);
            (*apply_pinv)(u, z);
            ++res.pc_applies;
            for (std::size_t i = 0; i < n; ++i) x[i] += z[i];
        }
    }

    res.final_residual = res.history.back();
    res.converged = opts.fixed_iters > 0 || res.final_residual <= target;
    if (happy && !res.converged)
        throw BreakdownError("GMRES: Arnoldi norm underflow without convergence");
    return res;
}

}  // namespace paradiag
