#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "paradiag/errors.hpp"
#include "paradiag/sparse.hpp"
#include "paradiag/vec.hpp"

namespace paradiag {

/// Row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols)
        : rows_(rows), cols_(cols),
          a_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) {
        return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
                  static_cast<std::size_t>(j)];
    }
    double operator()(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
                  static_cast<std::size_t>(j)];
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    /// y = A x
    void matvec(std::span<const double> x, std::span<double> y) const {
        for (int i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = s;
        }
    }

    /// A += a * S for sparse S (same dimension).
    void add_sparse(const CsrMatrix& s, double a) {
        const auto& off = s.row_offsets();
        const auto& cols = s.col_indices();
        const auto& vals = s.values();
        for (int r = 0; r < s.rows(); ++r)
            for (std::size_t k = off[static_cast<std::size_t>(r)];
                 k < off[static_cast<std::size_t>(r) + 1]; ++k)
                (*this)(r, cols[k]) += a * vals[k];
    }

    std::vector<double>& data() { return a_; }
    const std::vector<double>& data() const { return a_; }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

inline DenseMatrix to_dense(const CsrMatrix& s) {
    DenseMatrix d(s.rows(), s.cols());
    d.add_sparse(s, 1.0);
    return d;
}

/// LU factorization with partial pivoting. The pivot tolerance is relative
/// to the largest entry of the input matrix.
class LuFactorization {
public:
    explicit LuFactorization(DenseMatrix a, double rel_pivot_tol = 1e-14)
        : lu_(std::move(a)), piv_(static_cast<std::size_t>(lu_.rows())) {
        const int n = lu_.rows();
        if (n != lu_.cols()) throw Error("LuFactorization: matrix not square");
        const double tol = rel_pivot_tol * std::max(lu_.max_abs(), 1e-300);
        for (int i = 0; i < n; ++i) piv_[static_cast<std::size_t>(i)] = i;
        for (int k = 0; k < n; ++k) {
            int p = k;
            double pmax = std::abs(lu_(k, k));
            for (int i = k + 1; i < n; ++i) {
                const double v = std::abs(lu_(i, k));
                if (v > pmax) {
                    pmax = v;
                    p = i;
                }
            }
            if (pmax < tol)
                throw SingularBlockError("LU pivot below tolerance", -1);
            if (p != k) {
                for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
                std::swap(piv_[static_cast<std::size_t>(k)],
                          piv_[static_cast<std::size_t>(p)]);
            }
            const double inv_piv = 1.0 / lu_(k, k);
            for (int i = k + 1; i < n; ++i) {
                const double f = lu_(i, k) * inv_piv;
                lu_(i, k) = f;
                if (f == 0.0) continue;
                for (int j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    int size() const { return lu_.rows(); }

    /// Solves A x = b; writes the solution over x.
    void solve(std::span<double> x) const {
        const int n = lu_.rows();
        RealVector b(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            b[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(piv_[static_cast<std::size_t>(i)])];
        // forward substitution, unit lower triangle
        for (int i = 1; i < n; ++i) {
            double s = b[static_cast<std::size_t>(i)];
            for (int j = 0; j < i; ++j) s -= lu_(i, j) * b[static_cast<std::size_t>(j)];
            b[static_cast<std::size_t>(i)] = s;
        }
        // back substitution
        for (int i = n - 1; i >= 0; --i) {
            double s = b[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < n; ++j) s -= lu_(i, j) * b[static_cast<std::size_t>(j)];
            b[static_cast<std::size_t>(i)] = s / lu_(i, i);
        }
        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)];
    }

private:
    DenseMatrix lu_;
    std::vector<int> piv_;
};

/// One-shot dense solve.
inline RealVector lu_solve(DenseMatrix a, RealVector b) {
    LuFactorization f(std::move(a));
    f.solve(b);
    return b;
}

}  // namespace paradiag
