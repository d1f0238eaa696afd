#pragma once

#include <memory>
#include <span>
#include <string>

#include "paradiag/errors.hpp"
#include "paradiag/sparse.hpp"
#include "paradiag/vec.hpp"

namespace paradiag {

/// Implicit theta method parameters. theta = 1 is backward Euler,
/// theta = 0.5 the trapezium rule.
struct ThetaScheme {
    double dt;
    double theta;
    ThetaScheme(double dt_, double theta_) : dt(dt_), theta(theta_) {
        if (!(dt > 0.0)) throw ConfigError("ThetaScheme: dt must be > 0");
        if (theta < 0.0 || theta > 1.0)
            throw ConfigError("ThetaScheme: theta must be in [0, 1]");
    }
};

/// A spatial semi-discretization of M du/dt + f(u, t) = b(t).
///
/// Instances are immutable after construction and safe to share across
/// threads. For linear problems f(u, t) = K u with K = jacobian(.,.)
/// independent of the state, and b(t) is the optional forcing.
class Problem {
public:
    virtual ~Problem() = default;

    virtual int nx() const = 0;
    virtual const CsrMatrix& mass() const = 0;
    virtual void apply_f(std::span<const double> u, double t,
                         std::span<double> out) const = 0;
    virtual CsrMatrix jacobian(std::span<const double> u, double t) const = 0;
    virtual bool is_linear() const = 0;

    /// Forcing b(t); zero unless overridden.
    virtual void forcing(double t, std::span<double> out) const {
        (void)t;
        fill(out, 0.0);
    }
    virtual bool has_forcing() const { return false; }

    virtual RealVector default_initial_condition() const = 0;
    virtual std::string fingerprint() const = 0;

    /// Mesh spacing (first direction for 2D problems).
    virtual double dx() const = 0;

    /// Courant number for a given timestep; 0 for problems without a
    /// transport speed.
    virtual double courant(double dt) const {
        (void)dt;
        return 0.0;
    }
};

using ProblemPtr = std::shared_ptr<const Problem>;

}  // namespace paradiag
