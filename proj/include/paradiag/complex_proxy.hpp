#pragma once

#include <optional>
#include <span>
#include <utility>

#include "paradiag/dense.hpp"
#include "paradiag/errors.hpp"
#include "paradiag/krylov.hpp"
#include "paradiag/sparse.hpp"
#include "paradiag/vec.hpp"

namespace paradiag {

enum class BlockMethod { dense_lu, gmres };

struct BlockOptions {
    BlockMethod method = BlockMethod::dense_lu;
    double tol = 1e-12;   // relative tolerance for iterative solves
    int max_iters = 500;
    int fixed_iters = 0;  // > 0: run exactly this many iterations per solve
};

/// a*A + b*B for same-sized sparse matrices.
inline CsrMatrix csr_combine(double a, const CsrMatrix& A, double b,
                             const CsrMatrix& B) {
    std::vector<Triplet> t;
    t.reserve(A.nnz() + B.nnz());
    auto push = [&t](const CsrMatrix& m, double s) {
        const auto& off = m.row_offsets();
        const auto& cols = m.col_indices();
        const auto& vals = m.values();
        for (int r = 0; r < m.rows(); ++r)
            for (std::size_t k = off[static_cast<std::size_t>(r)];
                 k < off[static_cast<std::size_t>(r) + 1]; ++k)
                t.push_back({r, cols[k], s * vals[k]});
    };
    push(A, a);
    push(B, b);
    return CsrMatrix::from_triplets(A.rows(), std::move(t));
}

/// Solver for one complex block (l1*M + l2*A) x = b with real M, A.
///
/// The complex system is embedded as the 2Nx real system
///   [ R  -S ] [x_re]   [b_re]        R = Re(l1) M + Re(l2) A,
///   [ S   R ] [x_im] = [b_im],       S = Im(l1) M + Im(l2) A.
/// Dense LU factors the embedding once and is reusable across solves;
/// the GMRES method applies the embedding matrix-free from R and S.
class ComplexBlockSolver {
public:
    ComplexBlockSolver(const CsrMatrix& a, const CsrMatrix& m, Complex l1,
                       Complex l2, BlockOptions opts, int frequency_tag = -1)
        : nx_(a.rows()), opts_(opts), tag_(frequency_tag) {
        if (a.rows() != m.rows())
            throw Error("ComplexBlockSolver: dimension mismatch");
        if (std::abs(l1) == 0.0 && std::abs(l2) == 0.0)
            throw SingularBlockError("block coefficients are both zero", tag_);
        r_ = csr_combine(l1.real(), m, l2.real(), a);
        s_ = csr_combine(l1.imag(), m, l2.imag(), a);
        if (opts_.method == BlockMethod::dense_lu) {
            DenseMatrix e(2 * nx_, 2 * nx_);
            auto place = [&e, this](const CsrMatrix& src, int ro, int co,
                                    double scale_v) {
                const auto& off = src.row_offsets();
                const auto& cols = src.col_indices();
                const auto& vals = src.values();
                for (int r = 0; r < nx_; ++r)
                    for (std::size_t k = off[static_cast<std::size_t>(r)];
                         k < off[static_cast<std::size_t>(r) + 1]; ++k)
                        e(ro + r, co + cols[k]) += scale_v * vals[k];
            };
            place(r_, 0, 0, 1.0);
            place(r_, nx_, nx_, 1.0);
            place(s_, 0, nx_, -1.0);
            place(s_, nx_, 0, 1.0);
            try {
                lu_.emplace(std::move(e));
            } catch (const SingularBlockError&) {
                throw SingularBlockError("singular complex block embedding",
                                         tag_);
            }
        }
    }

    int nx() const { return nx_; }

    /// Solves for one right-hand side; returns the iteration count
    /// (1 for the direct method).
    int solve(std::span<const double> b_re, std::span<const double> b_im,
              std::span<double> x_re, std::span<double> x_im) const {
        const auto nxs = static_cast<std::size_t>(nx_);
        RealVector xy(2 * nxs);
        for (std::size_t i = 0; i < nxs; ++i) {
            xy[i] = b_re[i];
            xy[nxs + i] = b_im[i];
        }
        if (opts_.method == BlockMethod::dense_lu) {
            lu_->solve(xy);
            for (std::size_t i = 0; i < nxs; ++i) {
                x_re[i] = xy[i];
                x_im[i] = xy[nxs + i];
            }
            return 1;
        }
        ApplyOp apply = [this, nxs](std::span<const double> v,
                                    std::span<double> out) {
            auto v_re = v.subspan(0, nxs);
            auto v_im = v.subspan(nxs, nxs);
            auto o_re = out.subspan(0, nxs);
            auto o_im = out.subspan(nxs, nxs);
            r_.matvec(v_re, o_re);
            s_.matvec_add(v_im, o_re, -1.0);
            s_.matvec(v_re, o_im);
            r_.matvec_add(v_im, o_im, 1.0);
        };
        RealVector sol(2 * nxs, 0.0);
        KrylovOptions kopts;
        kopts.rtol = opts_.tol;
        kopts.max_iter = opts_.max_iters;
        kopts.fixed_iters = opts_.fixed_iters;
        const KrylovResult kr = gmres(apply, nullptr, xy, sol, kopts);
        if (!kr.converged)
            throw MaxIterationsError("complex block GMRES hit iteration cap",
                                     kr.history, tag_);
        for (std::size_t i = 0; i < nxs; ++i) {
            x_re[i] = sol[i];
            x_im[i] = sol[nxs + i];
        }
        return std::max(kr.iterations, 1);
    }

private:
    int nx_;
    BlockOptions opts_;
    int tag_;
    CsrMatrix r_, s_;
    std::optional<LuFactorization> lu_;
};

/// One-shot solve of (l1*M + l2*A) x = rhs through the real embedding.
inline ComplexVector complex_proxy_solve(const CsrMatrix& a,
                                         const CsrMatrix& m, Complex l1,
                                         Complex l2, const ComplexVector& rhs,
                                         BlockMethod method = BlockMethod::dense_lu,
                                         double tol = 1e-12) {
    BlockOptions opts;
    opts.method = method;
    opts.tol = tol;
    ComplexBlockSolver solver(a, m, l1, l2, opts);
    const auto n = rhs.size();
    RealVector b_re(n), b_im(n), x_re(n), x_im(n);
    for (std::size_t i = 0; i < n; ++i) {
        b_re[i] = rhs[i].real();
        b_im[i] = rhs[i].imag();
    }
    solver.solve(b_re, b_im, x_re, x_im);
    ComplexVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = Complex(x_re[i], x_im[i]);
    return x;
}

}  // namespace paradiag
