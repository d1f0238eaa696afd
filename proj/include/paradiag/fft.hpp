#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>

#include "paradiag/errors.hpp"
#include "paradiag/vec.hpp"

namespace paradiag {

namespace detail {

constexpr bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace detail

/// Discrete Fourier transform of a fixed length N >= 1.
///
/// Convention: forward is X[k] = sum_n v[n] exp(-2*pi*i*k*n/N), unnormalized;
/// inverse divides by N so the pair composes to the identity.
/// Power-of-two lengths use iterative radix-2; everything else goes through
/// Bluestein's chirp-z reduction to a power-of-two convolution.
/// Plans are immutable after construction and safe to share across threads.
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        if (n_ == 0) throw Error("FftPlan: length must be >= 1");
        if (detail::is_pow2(n_)) {
            init_radix2(n_, twiddle_, bitrev_);
        } else {
            init_bluestein();
        }
    }

    std::size_t size() const { return n_; }

    void forward(std::span<Complex> v) const {
        if (v.size() != n_) throw Error("FftPlan: length mismatch");
        if (n_ == 1) return;
        if (detail::is_pow2(n_)) {
            radix2(v, twiddle_, bitrev_);
        } else {
            bluestein(v);
        }
    }

    void inverse(std::span<Complex> v) const {
        // ifft(v) = conj(fft(conj(v))) / N
        for (auto& z : v) z = std::conj(z);
        forward(v);
        const double inv_n = 1.0 / static_cast<double>(n_);
        for (auto& z : v) z = std::conj(z) * inv_n;
    }

private:
    static void init_radix2(std::size_t n, ComplexVector& twiddle,
                            std::vector<std::size_t>& bitrev) {
        twiddle.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) /
                               static_cast<double>(n);
            twiddle[k] = Complex(std::cos(ang), std::sin(ang));
        }
        bitrev.resize(n);
        std::size_t log2n = 0;
        while ((std::size_t{1} << log2n) < n) ++log2n;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
            bitrev[i] = r;
        }
    }

    static void radix2(std::span<Complex> v, const ComplexVector& twiddle,
                       const std::vector<std::size_t>& bitrev) {
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i)
            if (bitrev[i] > i) std::swap(v[i], v[bitrev[i]]);
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t half = len >> 1;
            const std::size_t step = n / len;
            for (std::size_t start = 0; start < n; start += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    const Complex w = twiddle[j * step];
                    const Complex a = v[start + j];
                    const Complex b = v[start + j + half] * w;
                    v[start + j] = a + b;
                    v[start + j + half] = a - b;
                }
            }
        }
    }

    void init_bluestein() {
        // chirp_[k] = exp(-i*pi*k^2/N), with k^2 reduced mod 2N so the angle
        // stays well inside the accurate range of sin/cos.
        chirp_.resize(n_);
        const auto two_n = static_cast<std::uint64_t>(2 * n_);
        for (std::size_t k = 0; k < n_; ++k) {
            const std::uint64_t sq =
                (static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(k)) %
                two_n;
            const double ang = -std::numbers::pi * static_cast<double>(sq) /
                               static_cast<double>(n_);
            chirp_[k] = Complex(std::cos(ang), std::sin(ang));
        }
        conv_len_ = detail::next_pow2(2 * n_ - 1);
        init_radix2(conv_len_, conv_twiddle_, conv_bitrev_);
        chirp_fft_.assign(conv_len_, Complex(0.0, 0.0));
        chirp_fft_[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n_; ++k) {
            chirp_fft_[k] = std::conj(chirp_[k]);
            chirp_fft_[conv_len_ - k] = std::conj(chirp_[k]);
        }
        radix2(chirp_fft_, conv_twiddle_, conv_bitrev_);
    }

    void bluestein(std::span<Complex> v) const {
        ComplexVector a(conv_len_, Complex(0.0, 0.0));
        for (std::size_t k = 0; k < n_; ++k) a[k] = v[k] * chirp_[k];
        radix2(a, conv_twiddle_, conv_bitrev_);
        for (std::size_t k = 0; k < conv_len_; ++k) a[k] *= chirp_fft_[k];
        for (auto& z : a) z = std::conj(z);
        radix2(a, conv_twiddle_, conv_bitrev_);
        const double inv_l = 1.0 / static_cast<double>(conv_len_);
        for (std::size_t k = 0; k < n_; ++k)
            v[k] = std::conj(a[k]) * inv_l * chirp_[k];
    }

    std::size_t n_;
    ComplexVector twiddle_;
    std::vector<std::size_t> bitrev_;
    // Bluestein state
    std::size_t conv_len_ = 0;
    ComplexVector chirp_;
    ComplexVector chirp_fft_;
    ComplexVector conv_twiddle_;
    std::vector<std::size_t> conv_bitrev_;
};

/// One-shot forward transform, X[k] = sum_n v[n] exp(-2*pi*i*k*n/N).
inline ComplexVector fft_forward(ComplexVector v) {
    FftPlan plan(v.size());
    plan.forward(v);
    return v;
}

/// One-shot inverse transform, 1/N normalized.
inline ComplexVector fft_inverse(ComplexVector v) {
    FftPlan plan(v.size());
    plan.inverse(v);
    return v;
}

}  // namespace paradiag
