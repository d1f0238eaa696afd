#pragma once

#include <nlohmann/json.hpp>

#include "paradiag/perfmodel.hpp"
#include "paradiag/solve_report.hpp"

namespace paradiag {

inline nlohmann::json to_json(const Timings& t, bool include_values = true) {
    return nlohmann::json{
        {"t_total", include_values ? t.t_total : 0.0},
        {"t_blocks", include_values ? t.t_blocks : 0.0},
        {"t_transpose", include_values ? t.t_transpose : 0.0},
        {"t_fft", include_values ? t.t_fft : 0.0},
        {"t_residual", include_values ? t.t_residual : 0.0},
        {"t_jac", include_values ? t.t_jac : 0.0},
    };
}

inline nlohmann::json to_json(const SolveReport& r, bool include_timings = true) {
    return nlohmann::json{
        {"m_p", r.m_p},
        {"pc_applies", r.pc_applies},
        {"residuals", r.residual_history},
        {"eta", r.contraction_rates},
        {"eta_mean", r.eta_mean()},
        {"k_p_max", r.k_p_max},
        {"k_p_min", r.k_p_min},
        {"newton_its", r.newton_iterations},
        {"steps", r.steps},
        {"m_s_mean", r.m_s_mean},
        {"k_s_mean", r.k_s_mean},
        {"converged", r.converged},
        {"fingerprint", r.fingerprint},
        {"stop_rule", r.stop_rule},
        {"timings", to_json(r.timings, include_timings)},
    };
}

inline nlohmann::json to_json(const PerfEstimate& e) {
    return nlohmann::json{
        {"gamma", e.gamma},         {"omega", e.omega},
        {"speedup", e.speedup},     {"efficiency", e.efficiency},
        {"t_s_rel", e.t_s_rel},     {"t_p_rel", e.t_p_rel},
        {"comm_bound", e.comm_bound},
    };
}

inline PerfInputs perf_inputs_from_json(const nlohmann::json& j) {
    PerfInputs in;
    in.k_s = j.value("k_s", in.k_s);
    in.k_p = j.value("k_p", in.k_p);
    in.m_s = j.value("m_s", in.m_s);
    in.m_p = j.value("m_p", in.m_p);
    in.nx = j.value("nx", in.nx);
    in.nt = j.value("nt", in.nt);
    in.q = j.value("q", in.q);
    in.t_c = j.value("t_c", in.t_c);
    in.t_b = j.value("t_b", in.t_b);
    in.core_penalty = j.value("core_penalty", in.core_penalty);
    return in;
}

}  // namespace paradiag
