#pragma once

#include <numeric>
#include <span>
#include <vector>

#include "paradiag/errors.hpp"
#include "paradiag/vec.hpp"

namespace paradiag {

/// The all-at-once unknown: Nt timesteps of an Nx-vector plus the initial
/// condition, which lives separately. Step n stores the solution at
/// t0 + (n+1)*dt. The partition records how the window is sliced; slicing
/// never changes any computed value, it only mirrors the layout contract.
class Timeseries {
public:
    Timeseries() = default;
    Timeseries(int nt, int nx, double t0_ = 0.0)
        : t0(t0_),
          data(static_cast<std::size_t>(nt) * static_cast<std::size_t>(nx), 0.0),
          initial_condition(static_cast<std::size_t>(nx), 0.0),
          partition{nt}, nt_(nt), nx_(nx) {
        if (nt < 1 || nx < 1)
            throw Error("Timeseries: nt and nx must be >= 1");
    }

    int nt() const { return nt_; }
    int nx() const { return nx_; }

    std::span<double> step(int n) {
        return std::span<double>(data).subspan(
            static_cast<std::size_t>(n) * static_cast<std::size_t>(nx_),
            static_cast<std::size_t>(nx_));
    }
    std::span<const double> step(int n) const {
        return std::span<const double>(data).subspan(
            static_cast<std::size_t>(n) * static_cast<std::size_t>(nx_),
            static_cast<std::size_t>(nx_));
    }

    /// Sets every timestep to the same spatial vector.
    void assign_all(std::span<const double> v) {
        for (int n = 0; n < nt_; ++n) copy(v, step(n));
    }

    void set_partition(std::vector<int> p) {
        if (p.empty()) throw Error("Timeseries: partition must be nonempty");
        int sum = 0;
        for (int s : p) {
            if (s < 1) throw Error("Timeseries: partition entries must be >= 1");
            sum += s;
        }
        if (sum != nt_)
            throw Error("Timeseries: partition must sum to Nt");
        partition = std::move(p);
    }

    double t0 = 0.0;
    RealVector data;               // nt*nx, step-major
    RealVector initial_condition;  // nx
    std::vector<int> partition;

private:
    int nt_ = 0, nx_ = 0;
};

/// Copy of the final timestep, used to seed the next window.
inline RealVector bcast_final_step(const Timeseries& u) {
    const auto last = u.step(u.nt() - 1);
    return RealVector(last.begin(), last.end());
}

}  // namespace paradiag
