#include <catch2/catch.hpp>

#include "paradiag/complex_proxy.hpp"
#include "support/oracles.hpp"

using paradiag::BlockMethod;
using paradiag::Complex;
using paradiag::ComplexVector;
using paradiag::complex_proxy_solve;
using paradiag::CsrMatrix;
using paradiag::RealVector;
using paradiag::Triplet;

namespace {

CsrMatrix random_sparse(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t.push_back({i, j, val(rng)});
    return CsrMatrix::from_triplets(n, std::move(t));
}

/// Native complex-arithmetic reference for (l1 M + l2 A) x = b.
ComplexVector native_solve(const CsrMatrix& a, const CsrMatrix& m, Complex l1,
                           Complex l2, const ComplexVector& b) {
    const int n = a.rows();
    oracles::CMat c(n);
    const auto da = paradiag::to_dense(a);
    const auto dm = paradiag::to_dense(m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            c(i, j) = l1 * dm(i, j) + l2 * da(i, j);
    return oracles::complex_lu_solve(c, b);
}

}  // namespace

TEST_CASE("identity system returns the right-hand side") {
    const CsrMatrix eye = CsrMatrix::identity(4);
    const ComplexVector rhs = {{1, 2}, {3, -4}, {0, 0.5}, {-1, 0}};
    const ComplexVector x =
        complex_proxy_solve(eye, eye, Complex(1, 0), Complex(0, 0), rhs);
    REQUIRE(oracles::rel_err(x, rhs) < 1e-14);
}

TEST_CASE("purely real coefficients reduce to a real solve") {
    std::mt19937_64 rng(21);
    const int n = 6;
    const CsrMatrix a = random_sparse(rng, n);
    const CsrMatrix m = CsrMatrix::identity(n);
    const Complex l1(2.5, 0.0), l2(0.7, 0.0);
    ComplexVector rhs(n);
    RealVector rhs_r(n);
    for (int i = 0; i < n; ++i) {
        rhs_r[static_cast<std::size_t>(i)] = std::sin(1.0 + i);
        rhs[static_cast<std::size_t>(i)] = Complex(rhs_r[static_cast<std::size_t>(i)], 0.0);
    }
    const ComplexVector x = complex_proxy_solve(a, m, l1, l2, rhs);

    paradiag::DenseMatrix d(n, n);
    d.add_sparse(m, l1.real());
    d.add_sparse(a, l2.real());
    const RealVector xr = paradiag::lu_solve(d, rhs_r);
    for (int i = 0; i < n; ++i) {
        REQUIRE(std::abs(x[static_cast<std::size_t>(i)].imag()) < 1e-12);
        REQUIRE(x[static_cast<std::size_t>(i)].real() ==
                Approx(xr[static_cast<std::size_t>(i)]).margin(1e-12));
    }
}

TEST_CASE("matches the native complex solve oracle") {
    std::mt19937_64 rng(22);
    SECTION("4x4 example coefficients") {
        const CsrMatrix a = random_sparse(rng, 4);
        const CsrMatrix m = CsrMatrix::identity(4);
        const ComplexVector rhs = oracles::random_complex_vector(rng, 4);
        const Complex l1(1, 2), l2(3, -1);
        const ComplexVector x = complex_proxy_solve(a, m, l1, l2, rhs);
        const ComplexVector want = native_solve(a, m, l1, l2, rhs);
        REQUIRE(oracles::rel_err(x, want) < 1e-10);
    }
    SECTION("random systems up to 32 unknowns") {
        for (int n : {2, 9, 32}) {
            const CsrMatrix a = random_sparse(rng, n);
            const CsrMatrix m = random_sparse(rng, n);
            const ComplexVector rhs = oracles::random_complex_vector(
                rng, static_cast<std::size_t>(n));
            const Complex l1(0.3, 1.9), l2(1.1, -0.4);
            const ComplexVector x = complex_proxy_solve(a, m, l1, l2, rhs);
            const ComplexVector want = native_solve(a, m, l1, l2, rhs);
            INFO("n = " << n);
            REQUIRE(oracles::rel_err(x, want) < 1e-10);
        }
    }
}

TEST_CASE("inner GMRES path reaches the requested tolerance") {
    std::mt19937_64 rng(23);
    const int n = 10;
    const CsrMatrix a = random_sparse(rng, n);
    const CsrMatrix m = CsrMatrix::identity(n);
    const ComplexVector rhs = oracles::random_complex_vector(rng, n);
    const Complex l1(4.0, 1.0), l2(0.5, -0.2);
    const ComplexVector x =
        complex_proxy_solve(a, m, l1, l2, rhs, BlockMethod::gmres, 1e-10);
    const ComplexVector want = native_solve(a, m, l1, l2, rhs);
    REQUIRE(oracles::rel_err(x, want) < 1e-8);
}

TEST_CASE("singular embedding is reported") {
    const CsrMatrix zero = CsrMatrix::from_triplets(2, {{0, 0, 0.0}});
    const CsrMatrix m = CsrMatrix::identity(2);
    const ComplexVector rhs = {{1, 0}, {1, 0}};
    // l1 = 0 and A = 0 makes the block identically zero
    REQUIRE_THROWS_AS(
        complex_proxy_solve(zero, m, Complex(0, 0), Complex(1, 0), rhs),
        paradiag::SingularBlockError);
}

TEST_CASE("iterative blocks report a hit iteration cap with the frequency") {
    std::mt19937_64 rng(24);
    const int n = 12;
    const CsrMatrix a = random_sparse(rng, n);
    const CsrMatrix m = CsrMatrix::identity(n);
    paradiag::BlockOptions opts;
    opts.method = BlockMethod::gmres;
    opts.tol = 1e-14;
    opts.max_iters = 2;  // far too few
    paradiag::ComplexBlockSolver solver(a, m, Complex(0.1, 1.0),
                                        Complex(1.0, 0.3), opts, 7);
    RealVector br(n, 1.0), bi(n, 0.0), xr(n), xi(n);
    try {
        solver.solve(br, bi, xr, xi);
        FAIL("expected MaxIterationsError");
    } catch (const paradiag::MaxIterationsError& e) {
        REQUIRE(e.frequency == 7);
        REQUIRE_FALSE(e.history.empty());
    }
}

TEST_CASE("both coefficients zero is rejected up front") {
    const CsrMatrix eye = CsrMatrix::identity(2);
    const ComplexVector rhs = {{1, 0}, {1, 0}};
    REQUIRE_THROWS_AS(
        complex_proxy_solve(eye, eye, Complex(0, 0), Complex(0, 0), rhs),
        paradiag::SingularBlockError);
}
