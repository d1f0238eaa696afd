#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace paradiag {

using RealVector = std::vector<double>;
using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline double norm_inf(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

/// y += a*x
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scale(double a, std::span<double> x) {
    for (double& v : x) v *= a;
}

inline void fill(std::span<double> x, double v) {
    for (double& e : x) e = v;
}

inline void copy(std::span<const double> src, std::span<double> dst) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i];
}

inline bool all_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace paradiag
