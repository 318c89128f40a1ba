#pragma once

#include <chrono>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "dcnet/dc.hpp"
#include "dcnet/lp_build.hpp"
#include "dcnet/model.hpp"
#include "dcnet/simplex.hpp"

namespace dcnet {

struct DcaConfig {
    int max_iters = 200;
    double eps_objective = 1e-6;
    bool relative_eps = false;  // scale the stopping test by 1 + |p|
    double time_budget_secs = 1800.0;
    double trust_radius = 1e3;
    std::uint64_t seed = 0;
    double init_scale = 0.5;
    SolverConfig solver;
    std::ostream* log = nullptr;
};

enum class DcaStatus { Converged, IterLimit, TimeBudget, LpFailure };

inline const char* dca_status_str(DcaStatus s) {
    switch (s) {
        case DcaStatus::Converged: return "Converged";
        case DcaStatus::IterLimit: return "IterLimit";
        case DcaStatus::TimeBudget: return "TimeBudget";
        default: return "LpFailure";
    }
}

struct DcaIterRecord {
    int iter = 0;
    double p_value = 0.0;
    double lp_value = 0.0;  // NaN on the initial record
    LpStatus lp_status = LpStatus::Optimal;
    bool has_lp = false;
    double wall_ms = 0.0;
    int active_trust_bounds = 0;
};

struct DcaTrace {
    std::vector<DcaIterRecord> records;
    DcaStatus status = DcaStatus::IterLimit;
    Weights best_weights;
    double best_p = kInf;
    std::string note;

    /// CSV: iter,p,lp_value,lp_status,wall_ms,active_trust_bounds
    void write_csv(std::ostream& os) const {
        os << "iter,p,lp_value,lp_status,wall_ms,active_trust_bounds\n";
        for (const auto& r : records) {
            os << r.iter << ',' << format_double(r.p_value) << ',';
            if (r.has_lp)
                os << format_double(r.lp_value) << ',' << lp_status_str(r.lp_status);
            else
                os << "nan,none";
            os << ',' << format_double(r.wall_ms) << ',' << r.active_trust_bounds << '\n';
        }
    }
};

inline Weights init_weights(int n, int d, const DcaConfig& cfg) {
    return random_weights(n, d, cfg.seed, cfg.init_scale);
}

/// Generic DCA: linearize h at the current point, minimize the convex
/// surrogate exactly by LP, repeat until the objective decrease falls below
/// eps (or iteration/time limits trip).
inline DcaTrace run_dca(const Dataset& data, int n, const Activation& act, Norm norm,
                        const DcaConfig& cfg) {
    if (data.size() == 0) throw std::invalid_argument("run_dca: empty dataset");
    if (n < 1) throw std::invalid_argument("run_dca: n >= 1");

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto elapsed_s = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

    DcaTrace trace;
    Weights w = init_weights(n, data.d, cfg);
    double p = eval_dc(w, act, norm, data).p;

    DcaIterRecord rec0;
    rec0.iter = 0;
    rec0.p_value = p;
    rec0.lp_value = std::nan("");
    rec0.has_lp = false;
    rec0.wall_ms = elapsed_s() * 1e3;
    trace.records.push_back(rec0);
    trace.best_weights = w;
    trace.best_p = p;

    if (cfg.log) *cfg.log << "dca: initial p = " << format_double(p) << "\n";

    trace.status = DcaStatus::IterLimit;
    for (int k = 1; k <= cfg.max_iters; ++k) {
        if (elapsed_s() > cfg.time_budget_secs) {
            trace.status = DcaStatus::TimeBudget;
            return trace;
        }
        const auto it0 = clock::now();

        const Subgradient y = subgrad_h(w, act, norm, data);
        const LpProblem lp = build_step2_lp(w, y, act, norm, data, cfg.trust_radius);
        SolverConfig scfg = cfg.solver;
        scfg.log = cfg.log;
        LpSolution sol = solve_lp(lp, scfg);
        if (sol.status == LpStatus::IterLimit) {
            // one retry with a doubled pivot budget before giving up
            scfg.max_pivots *= 2;
            sol = solve_lp(lp, scfg);
        }
        if (sol.status != LpStatus::Optimal) {
            trace.status = DcaStatus::LpFailure;
            trace.note = std::string("step-2 LP ended ") + lp_status_str(sol.status) +
                         (sol.note.empty() ? "" : ": " + sol.note);
            DcaIterRecord rec;
            rec.iter = k;
            rec.p_value = p;
            rec.lp_value = sol.objective_value;
            rec.lp_status = sol.status;
            rec.has_lp = true;
            rec.wall_ms = std::chrono::duration<double>(clock::now() - it0).count() * 1e3;
            rec.active_trust_bounds = sol.active_trust_bounds;
            trace.records.push_back(rec);
            return trace;
        }

        const Weights w_next = extract_weights(sol, n, data.d);
        const double p_next = eval_dc(w_next, act, norm, data).p;

        DcaIterRecord rec;
        rec.iter = k;
        rec.p_value = p_next;
        rec.lp_value = sol.objective_value;
        rec.lp_status = sol.status;
        rec.has_lp = true;
        rec.wall_ms = std::chrono::duration<double>(clock::now() - it0).count() * 1e3;
        rec.active_trust_bounds = sol.active_trust_bounds;
        trace.records.push_back(rec);

        if (cfg.log) {
            *cfg.log << "dca iter " << k << ": p = " << format_double(p_next)
                     << ", lp = " << format_double(sol.objective_value);
            if (sol.active_trust_bounds > 0)
                *cfg.log << "  [warning: " << sol.active_trust_bounds
                         << " weight(s) at the trust bound]";
            *cfg.log << "\n";
        }

        if (p_next < trace.best_p) {
            trace.best_p = p_next;
            trace.best_weights = w_next;
        }

        const double decrease = p - p_next;
        const double eps = cfg.relative_eps ? cfg.eps_objective * (1.0 + std::fabs(p))
                                            : cfg.eps_objective;
        w = w_next;
        p = p_next;
        if (decrease <= eps) {
            trace.status = DcaStatus::Converged;
            return trace;
        }
    }
    return trace;
}

}  // namespace dcnet
