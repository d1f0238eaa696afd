#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

namespace paradiag {

/// Wallclock breakdown of one solve. The parts never sum above t_total;
/// the remainder is orchestration overhead.
struct Timings {
    double t_total = 0.0;
    double t_blocks = 0.0;     // complex (or real, serial) block solves
    double t_transpose = 0.0;  // layout changes between time- and space-major
    double t_fft = 0.0;
    double t_residual = 0.0;
    double t_jac = 0.0;

    void add(const Timings& o) {
        t_total += o.t_total;
        t_blocks += o.t_blocks;
        t_transpose += o.t_transpose;
        t_fft += o.t_fft;
        t_residual += o.t_residual;
        t_jac += o.t_jac;
    }
};

/// Accumulates elapsed seconds into a slot on destruction. The slot must
/// outlive the timer; do not point it at an object that may be moved from
/// before the timer fires.
class ScopedTimer {
public:
    explicit ScopedTimer(double& slot)
        : slot_(&slot), start_(std::chrono::steady_clock::now()) {}
    ScopedTimer(const ScopedTimer&) = delete;
    ScopedTimer& operator=(const ScopedTimer&) = delete;
    ~ScopedTimer() {
        const auto end = std::chrono::steady_clock::now();
        *slot_ += std::chrono::duration<double>(end - start_).count();
    }

private:
    double* slot_;
    std::chrono::steady_clock::time_point start_;
};

/// Seconds since an explicit start point.
inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

struct SolveReport {
    // outer iteration bookkeeping
    int m_p = 0;          // outer Krylov iterations (summed over Newton steps)
    int pc_applies = 0;   // total preconditioner applications
    std::vector<double> residual_history;
    std::vector<double> contraction_rates;  // history[i]/history[i-1]
    int newton_iterations = 0;

    // per-frequency block iteration counts: extremes across all applies,
    // plus the last apply's full vector
    int k_p_max = 0;
    int k_p_min = 0;
    std::vector<int> block_iterations;

    // serial-in-time bookkeeping
    int steps = 0;
    double m_s_mean = 0.0;  // Newton iterations per timestep
    double k_s_mean = 0.0;  // Krylov iterations per real block solve
    std::vector<int> newton_per_step;

    Timings timings;
    std::string fingerprint;
    std::string stop_rule;
    bool converged = false;

    /// Mean contraction rate as the total residual drop per iteration,
    /// (h_last / h_first)^(1/iterations); the geometric mean over every
    /// recorded rate.
    double eta_mean() const {
        if (residual_history.size() < 2 || residual_history.front() <= 0.0)
            return 0.0;
        const double drop = residual_history.back() / residual_history.front();
        return std::pow(drop,
                        1.0 / static_cast<double>(residual_history.size() - 1));
    }

    /// Mean contraction over iterations 2..end, skipping the first rate
    /// (it carries the startup transient).
    double eta_tail_mean() const {
        if (contraction_rates.empty()) return 0.0;
        const std::size_t begin = contraction_rates.size() > 1 ? 1 : 0;
        double s = 0.0;
        std::size_t n = 0;
        for (std::size_t i = begin; i < contraction_rates.size(); ++i) {
            if (contraction_rates[i] <= 0.0) continue;
            s += std::log(contraction_rates[i]);
            ++n;
        }
        return n == 0 ? 0.0 : std::exp(s / static_cast<double>(n));
    }
};

}  // namespace paradiag
