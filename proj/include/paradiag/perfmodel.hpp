#pragma once

#include <algorithm>
#include <cmath>

#include "paradiag/errors.hpp"
#include "paradiag/solve_report.hpp"

namespace paradiag {

/// Inputs to the speedup estimate. K are Krylov iterations per block
/// solve (serial / parallel-in-time), M the number of block-solve rounds
/// (Newton steps per serial timestep / total preconditioner applications),
/// q the spatial-solver work exponent, T_c and T_b the transpose and
/// block-solve times, and core_penalty the processor-allocation factor
/// (2 when the complex blocks run on the same cores as the real ones,
/// 1 when they get twice as many; generalized for other resource splits).
struct PerfInputs {
    double k_s = 1.0;
    double k_p = 1.0;
    double m_s = 1.0;
    double m_p = 1.0;
    int nx = 1;
    int nt = 1;
    double q = 1.0;
    double t_c = 0.0;
    double t_b = 0.0;
    double core_penalty = 2.0;
};

struct PerfEstimate {
    double gamma = 0.0;      // K_p / K_s
    double omega = 0.0;      // M_p / M_s
    double speedup = 0.0;    // S
    double efficiency = 0.0; // E = S / (core_penalty * Nt)
    double t_s_rel = 0.0;    // K_s M_s Nx^(q-1) Nt
    double t_p_rel = 0.0;    // K_p M_p Nx^(q-1) + T_c
    bool comm_bound = false; // T_c / T_b > 0.1
};

/// S = (Nt / (gamma*omega)) * 1/(1 + T_c/T_b) * 1/core_penalty, with
/// T_c/T_b taken as 0 when both times are zero.
inline PerfEstimate predict(const PerfInputs& in) {
    if (in.k_s <= 0.0 || in.m_s <= 0.0)
        throw InvalidInputError("predict: K_s and M_s must be positive");
    if (in.k_p <= 0.0 || in.m_p <= 0.0)
        throw InvalidInputError("predict: K_p and M_p must be positive");
    if (in.nt < 1 || in.nx < 1)
        throw InvalidInputError("predict: Nt and Nx must be >= 1");
    if (in.q < 1.0) throw InvalidInputError("predict: q must be >= 1");
    if (in.core_penalty < 1.0)
        throw InvalidInputError("predict: core_penalty must be >= 1");
    if (in.t_c < 0.0 || in.t_b < 0.0)
        throw InvalidInputError("predict: times must be nonnegative");

    PerfEstimate out;
    out.gamma = in.k_p / in.k_s;
    out.omega = in.m_p / in.m_s;
    double comm_ratio = 0.0;
    if (in.t_c > 0.0) {
        if (in.t_b <= 0.0)
            throw InvalidInputError("predict: T_c > 0 requires T_b > 0");
        comm_ratio = in.t_c / in.t_b;
    }
    out.comm_bound = comm_ratio > 0.1;
    const double nxq = std::pow(static_cast<double>(in.nx), in.q - 1.0);
    out.speedup = (static_cast<double>(in.nt) / (out.gamma * out.omega)) /
                  (1.0 + comm_ratio) / in.core_penalty;
    out.efficiency = out.speedup / (in.core_penalty * in.nt);
    out.t_s_rel = in.k_s * in.m_s * nxq * in.nt;
    out.t_p_rel = in.k_p * in.m_p * nxq + in.t_c;
    return out;
}

/// Extracts measured quantities from a serial and a parallel report for
/// the same problem and runs predict. M_p is taken as the total number of
/// preconditioner applications, which includes the extra initial apply of
/// Richardson iterations.
inline PerfEstimate measure_and_predict(const SolveReport& serial,
                                        const SolveReport& parallel, int nt,
                                        double core_penalty = 2.0,
                                        int nx = 1, double q = 1.0) {
    if (serial.fingerprint != parallel.fingerprint)
        throw MismatchedReportsError(
            "measure_and_predict: reports from different problems");
    PerfInputs in;
    in.k_s = std::max(serial.k_s_mean, 1.0);
    in.m_s = std::max(serial.m_s_mean, 1.0);
    in.k_p = std::max(static_cast<double>(parallel.k_p_max), 1.0);
    in.m_p = std::max(static_cast<double>(parallel.pc_applies), 1.0);
    in.nt = nt;
    in.nx = nx;
    in.q = q;
    in.t_c = parallel.timings.t_transpose;
    in.t_b = parallel.timings.t_blocks;
    in.core_penalty = core_penalty;
    return predict(in);
}

/// Desk-run processor penalty. Both t_blocks entries are wall-clock, so
/// the worker-pool speedup of the parallel blocks is already inside the
/// measured per-solve time; the penalty is then Nt times the wall-time
/// ratio of one complex block solve to one real block solve (the model's
/// nominal value of 2 corresponds to Nt-way block parallelism at twice the
/// per-block cost).
inline double desk_core_penalty(const SolveReport& serial,
                                const SolveReport& parallel, int nt) {
    const double serial_solves =
        std::max(1.0, static_cast<double>(serial.steps) *
                          std::max(serial.m_s_mean, 1.0));
    const double parallel_solves =
        std::max(1.0, static_cast<double>(parallel.pc_applies) *
                          static_cast<double>(nt));
    const double t_rb = serial.timings.t_blocks / serial_solves;
    const double t_cb = parallel.timings.t_blocks / parallel_solves;
    if (t_rb <= 0.0 || t_cb <= 0.0) return 2.0;
    return std::max(1.0, (t_cb / t_rb) * static_cast<double>(nt));
}

}  // namespace paradiag
