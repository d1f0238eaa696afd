#pragma once

#include <cmath>

#include "paradiag/errors.hpp"
#include "paradiag/fft.hpp"

namespace paradiag {

/// Geometrically weighted DFT over the time axis.
///
/// The weights gamma[n] = alpha^(n/Nt), n = 0..Nt-1, scale the sequence
/// before a forward FFT and after an inverse FFT:
///   forward(v) = fft(gamma .* v)
///   inverse(v) = gamma^{-1} .* ifft(v)
/// so the pair composes to the identity. This is the transform that
/// diagonalizes every alpha-circulant matrix of the same length.
class WeightedDftPlan {
public:
    WeightedDftPlan(int nt, double alpha)
        : nt_(nt), alpha_(alpha), fft_(static_cast<std::size_t>(std::max(nt, 1))) {
        if (nt < 1) throw Error("WeightedDftPlan: Nt must be >= 1");
        if (!(alpha > 0.0) || alpha > 1.0)
            throw Error("WeightedDftPlan: alpha must be in (0, 1]");
        gamma_.resize(static_cast<std::size_t>(nt));
        inv_gamma_.resize(static_cast<std::size_t>(nt));
        for (int n = 0; n < nt; ++n) {
            const double e = static_cast<double>(n) / static_cast<double>(nt);
            gamma_[static_cast<std::size_t>(n)] = std::pow(alpha, e);
            inv_gamma_[static_cast<std::size_t>(n)] = std::pow(alpha, -e);
        }
    }

    int nt() const { return nt_; }
    double alpha() const { return alpha_; }
    const std::vector<double>& gamma() const { return gamma_; }

    void forward(std::span<Complex> v) const {
        check(v);
        for (int n = 0; n < nt_; ++n)
            v[static_cast<std::size_t>(n)] *= gamma_[static_cast<std::size_t>(n)];
        fft_.forward(v);
    }

    void inverse(std::span<Complex> v) const {
        check(v);
        fft_.inverse(v);
        for (int n = 0; n < nt_; ++n)
            v[static_cast<std::size_t>(n)] *= inv_gamma_[static_cast<std::size_t>(n)];
    }

private:
    void check(std::span<const Complex> v) const {
        if (static_cast<int>(v.size()) != nt_)
            throw Error("WeightedDftPlan: length mismatch");
    }

    int nt_;
    double alpha_;
    std::vector<double> gamma_, inv_gamma_;
    FftPlan fft_;
};

inline ComplexVector weighted_forward(const WeightedDftPlan& plan,
                                      ComplexVector v) {
    plan.forward(std::span<Complex>(v));
    return v;
}

inline ComplexVector weighted_inverse(const WeightedDftPlan& plan,
                                      ComplexVector v) {
    plan.inverse(std::span<Complex>(v));
    return v;
}

}  // namespace paradiag
