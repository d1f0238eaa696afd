#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "paradiag/problem.hpp"

namespace paradiag {

enum class MassType { identity, consistent };

namespace builtin {

/// 1D heat equation on (0,1), homogeneous Dirichlet rows eliminated.
/// Unknowns are the interior points x_i = i*h, h = 1/(nx+1).
/// K is the standard 3-point Laplacian scaled by the diffusivity; the
/// consistent mass option is the tridiagonal (h/6)(1,4,1) matrix.
class Heat1d final : public Problem {
public:
    Heat1d(int nx, double nu, MassType mass_type, double length = 1.0)
        : nx_(nx), nu_(nu), length_(length), h_(length / (nx + 1)),
          mass_type_(mass_type) {
        if (!(length > 0.0)) throw ConfigError("heat1d: length must be > 0");
        if (nx < 1) throw ConfigError("heat1d: nx must be >= 1");
        if (!(nu > 0.0)) throw ConfigError("heat1d: nu must be > 0");
        std::vector<Triplet> kt, mt;
        const double s = nu / (h_ * h_);
        for (int i = 0; i < nx; ++i) {
            kt.push_back({i, i, 2.0 * s});
            if (i > 0) kt.push_back({i, i - 1, -s});
            if (i + 1 < nx) kt.push_back({i, i + 1, -s});
            if (mass_type == MassType::identity) {
                mt.push_back({i, i, 1.0});
            } else {
                mt.push_back({i, i, 4.0 * h_ / 6.0});
                if (i > 0) mt.push_back({i, i - 1, h_ / 6.0});
                if (i + 1 < nx) mt.push_back({i, i + 1, h_ / 6.0});
            }
        }
        k_ = CsrMatrix::from_triplets(nx, std::move(kt));
        m_ = CsrMatrix::from_triplets(nx, std::move(mt));
    }

    int nx() const override { return nx_; }
    const CsrMatrix& mass() const override { return m_; }
    const CsrMatrix& stiffness() const { return k_; }
    void apply_f(std::span<const double> u, double, std::span<double> out) const override {
        k_.matvec(u, out);
    }
    CsrMatrix jacobian(std::span<const double>, double) const override { return k_; }
    bool is_linear() const override { return true; }
    RealVector default_initial_condition() const override {
        RealVector u(static_cast<std::size_t>(nx_));
        for (int i = 0; i < nx_; ++i)
            u[static_cast<std::size_t>(i)] =
                std::sin(std::numbers::pi * (i + 1) * h_ / length_);
        return u;
    }
    std::string fingerprint() const override {
        std::ostringstream os;
        os << "heat1d nx=" << nx_ << " nu=" << nu_ << " mass="
           << (mass_type_ == MassType::identity ? "identity" : "consistent")
           << " L=" << length_;
        return os.str();
    }
    double dx() const override { return h_; }
    double nu() const { return nu_; }

private:
    int nx_;
    double nu_, length_, h_;
    MassType mass_type_;
    CsrMatrix k_, m_;
};

/// 1D constant-speed advection on the periodic unit interval with
/// first-order upwind differences and identity mass.
class Advection1d final : public Problem {
public:
    Advection1d(int nx, double c, double length = 1.0)
        : nx_(nx), c_(c), length_(length), h_(length / nx) {
        if (nx < 2) throw ConfigError("advection1d: nx must be >= 2");
        if (c == 0.0) throw ConfigError("advection1d: wave speed must be nonzero");
        if (!(length > 0.0)) throw ConfigError("advection1d: length must be > 0");
        std::vector<Triplet> kt;
        const double s = c / h_;
        for (int i = 0; i < nx; ++i) {
            if (c > 0.0) {
                kt.push_back({i, i, s});
                kt.push_back({i, (i + nx - 1) % nx, -s});
            } else {
                kt.push_back({i, (i + 1) % nx, s});
                kt.push_back({i, i, -s});
            }
        }
        k_ = CsrMatrix::from_triplets(nx, std::move(kt));
        m_ = CsrMatrix::identity(nx);
    }

    int nx() const override { return nx_; }
    const CsrMatrix& mass() const override { return m_; }
    void apply_f(std::span<const double> u, double, std::span<double> out) const override {
        k_.matvec(u, out);
    }
    CsrMatrix jacobian(std::span<const double>, double) const override { return k_; }
    bool is_linear() const override { return true; }
    RealVector default_initial_condition() const override {
        // Gaussian bump centred in the domain
        RealVector u(static_cast<std::size_t>(nx_));
        for (int i = 0; i < nx_; ++i) {
            const double x = i * h_;
            const double d = (x - 0.5 * length_) / (0.1 * length_);
            u[static_cast<std::size_t>(i)] = std::exp(-0.5 * d * d);
        }
        return u;
    }
    std::string fingerprint() const override {
        std::ostringstream os;
        os << "advection1d nx=" << nx_ << " c=" << c_ << " L=" << length_;
        return os.str();
    }
    double dx() const override { return h_; }
    double courant(double dt) const override { return std::abs(c_) * dt / h_; }
    double speed() const { return c_; }

private:
    int nx_;
    double c_, length_, h_;
    CsrMatrix k_, m_;
};

/// 1D viscous Burgers equation on the periodic unit interval,
/// u_t + (u^2/2)_x = nu u_xx, with a central quadratic flux so the
/// nonlinearity is exactly quadratic and the spatial Jacobian is linear
/// in the state.
class Burgers1d final : public Problem {
public:
    Burgers1d(int nx, double nu, double length = 1.0)
        : nx_(nx), nu_(nu), length_(length), h_(length / nx) {
        if (nx < 3) throw ConfigError("burgers1d: nx must be >= 3");
        if (!(nu > 0.0)) throw ConfigError("burgers1d: nu must be > 0");
        if (!(length > 0.0)) throw ConfigError("burgers1d: length must be > 0");
        m_ = CsrMatrix::identity(nx);
    }

    int nx() const override { return nx_; }
    const CsrMatrix& mass() const override { return m_; }
    void apply_f(std::span<const double> u, double, std::span<double> out) const override {
        const double d = nu_ / (h_ * h_);
        for (int i = 0; i < nx_; ++i) {
            const double up = u[static_cast<std::size_t>((i + 1) % nx_)];
            const double um = u[static_cast<std::size_t>((i + nx_ - 1) % nx_)];
            const double ui = u[static_cast<std::size_t>(i)];
            out[static_cast<std::size_t>(i)] =
                (up * up - um * um) / (4.0 * h_) - d * (up - 2.0 * ui + um);
        }
    }
    CsrMatrix jacobian(std::span<const double> u, double) const override {
        const double d = nu_ / (h_ * h_);
        std::vector<Triplet> t;
        t.reserve(static_cast<std::size_t>(3 * nx_));
        for (int i = 0; i < nx_; ++i) {
            const int ip = (i + 1) % nx_;
            const int im = (i + nx_ - 1) % nx_;
            t.push_back({i, ip, u[static_cast<std::size_t>(ip)] / (2.0 * h_) - d});
            t.push_back({i, i, 2.0 * d});
            t.push_back({i, im, -u[static_cast<std::size_t>(im)] / (2.0 * h_) - d});
        }
        return CsrMatrix::from_triplets(nx_, std::move(t));
    }
    bool is_linear() const override { return false; }
    RealVector default_initial_condition() const override {
        RealVector u(static_cast<std::size_t>(nx_));
        for (int i = 0; i < nx_; ++i)
            u[static_cast<std::size_t>(i)] =
                std::sin(2.0 * std::numbers::pi * i * h_ / length_);
        return u;
    }
    std::string fingerprint() const override {
        std::ostringstream os;
        os << "burgers1d nx=" << nx_ << " nu=" << nu_ << " L=" << length_;
        return os.str();
    }
    double dx() const override { return h_; }
    double courant(double dt) const override {
        const RealVector u0 = default_initial_condition();
        return norm_inf(u0) * dt / h_;
    }
    double nu() const { return nu_; }

private:
    int nx_;
    double nu_, length_, h_;
    CsrMatrix m_;
};

/// 2D heat equation on the unit square, 5-point stencil, Dirichlet rows
/// eliminated. Unknown ordering is row-major over the interior grid.
class Heat2d final : public Problem {
public:
    Heat2d(int nx, int ny, double nu)
        : nx_(nx), ny_(ny), nu_(nu), hx_(1.0 / (nx + 1)), hy_(1.0 / (ny + 1)) {
        if (nx < 1 || ny < 1) throw ConfigError("heat2d: nx, ny must be >= 1");
        if (!(nu > 0.0)) throw ConfigError("heat2d: nu must be > 0");
        const int n = nx * ny;
        const double sx = nu / (hx_ * hx_);
        const double sy = nu / (hy_ * hy_);
        std::vector<Triplet> kt;
        kt.reserve(static_cast<std::size_t>(5 * n));
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const int p = j * nx + i;
                kt.push_back({p, p, 2.0 * sx + 2.0 * sy});
                if (i > 0) kt.push_back({p, p - 1, -sx});
                if (i + 1 < nx) kt.push_back({p, p + 1, -sx});
                if (j > 0) kt.push_back({p, p - nx, -sy});
                if (j + 1 < ny) kt.push_back({p, p + nx, -sy});
            }
        }
        k_ = CsrMatrix::from_triplets(n, std::move(kt));
        m_ = CsrMatrix::identity(n);
    }

    int nx() const override { return nx_ * ny_; }
    const CsrMatrix& mass() const override { return m_; }
    void apply_f(std::span<const double> u, double, std::span<double> out) const override {
        k_.matvec(u, out);
    }
    CsrMatrix jacobian(std::span<const double>, double) const override { return k_; }
    bool is_linear() const override { return true; }
    RealVector default_initial_condition() const override {
        RealVector u(static_cast<std::size_t>(nx_ * ny_));
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i)
                u[static_cast<std::size_t>(j * nx_ + i)] =
                    std::sin(std::numbers::pi * (i + 1) * hx_) *
                    std::sin(std::numbers::pi * (j + 1) * hy_);
        return u;
    }
    std::string fingerprint() const override {
        std::ostringstream os;
        os << "heat2d nx=" << nx_ << " ny=" << ny_ << " nu=" << nu_;
        return os.str();
    }
    double dx() const override { return hx_; }

private:
    int nx_, ny_;
    double nu_, hx_, hy_;
    CsrMatrix k_, m_;
};

}  // namespace builtin

inline ProblemPtr make_heat1d(int nx, double nu,
                              MassType mass = MassType::identity,
                              double length = 1.0) {
    return std::make_shared<builtin::Heat1d>(nx, nu, mass, length);
}

inline ProblemPtr make_advection1d(int nx, double c, double length = 1.0) {
    return std::make_shared<builtin::Advection1d>(nx, c, length);
}

inline ProblemPtr make_burgers1d(int nx, double nu, double length = 1.0) {
    return std::make_shared<builtin::Burgers1d>(nx, nu, length);
}

inline ProblemPtr make_heat2d(int nx, int ny, double nu) {
    return std::make_shared<builtin::Heat2d>(nx, ny, nu);
}

}  // namespace paradiag
