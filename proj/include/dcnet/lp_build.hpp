#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dcnet/dc.hpp"
#include "dcnet/dataset.hpp"
#include "dcnet/lp.hpp"
#include "dcnet/model.hpp"

namespace dcnet {

/// Variable layout of the surrogate LP:
///   [ w (2dn, boxed by the trust radius) | z block (1 or N, free) |
///     z+ (N*n) | z- (N*n) ]
struct Step2Layout {
    int n = 0, d = 0, N = 0;
    Norm norm = Norm::Uniform;

    int w_count() const { return 2 * n * d; }
    int z_count() const { return norm == Norm::Uniform ? 1 : N; }
    int w_a(int j, int c) const { return j * d + c; }
    int w_b(int j, int c) const { return (n + j) * d + c; }
    int z(int i) const { return w_count() + (norm == Norm::Uniform ? 0 : i); }
    int zp(int i, int j) const { return w_count() + z_count() + i * n + j; }
    int zm(int i, int j) const { return w_count() + z_count() + N * n + i * n + j; }
    int num_vars() const { return w_count() + z_count() + 2 * N * n; }
};

/// Builds the DCA Step-2 LP: minimize the linearized convex majorant
/// g(w) - y.w over the trust box, with epigraph variables for the per-point
/// maxima and z+/z- variables standing in for the activations.
///
/// Uniform keeps -y.w inside every epigraph row (single epigraph variable z
/// absorbs it once); Manhattan carries -y.w in the objective so that the sum
/// of the per-point epigraph variables is offset exactly once.
inline LpProblem build_step2_lp(const Weights& w_k, const Subgradient& y, const Activation& act,
                                Norm norm, const Dataset& data, double trust_radius) {
    const int n = w_k.n, d = w_k.d;
    const int N = static_cast<int>(data.size());
    if (N == 0) throw std::invalid_argument("build_step2_lp: empty dataset");
    if (data.d != d) throw std::invalid_argument("build_step2_lp: dimension mismatch");
    if (static_cast<int>(y.y.size()) != 2 * n * d)
        throw std::invalid_argument("build_step2_lp: subgradient length mismatch");
    if (!(trust_radius > 0.0)) throw std::invalid_argument("build_step2_lp: trust_radius > 0");

    Step2Layout L{n, d, N, norm};
    LpProblem lp;
    lp.num_vars = L.num_vars();
    lp.objective.assign(lp.num_vars, 0.0);
    lp.lower.assign(lp.num_vars, 0.0);
    lp.upper.assign(lp.num_vars, 0.0);
    lp.var_names.resize(lp.num_vars);

    for (int j = 0; j < n; ++j)
        for (int c = 0; c < d; ++c) {
            lp.var_names[L.w_a(j, c)] = "a" + std::to_string(j) + "_" + std::to_string(c);
            lp.var_names[L.w_b(j, c)] = "b" + std::to_string(j) + "_" + std::to_string(c);
        }
    for (int v = 0; v < L.w_count(); ++v) {
        lp.lower[v] = -trust_radius;
        lp.upper[v] = trust_radius;
    }
    for (int i = 0; i < L.z_count(); ++i) {
        const int v = L.w_count() + i;
        lp.lower[v] = -kInf;
        lp.upper[v] = kInf;
        lp.var_names[v] = norm == Norm::Uniform ? "z" : "z_" + std::to_string(i);
        lp.objective[v] = 1.0;
    }
    const bool relu = act.kind == ActivationKind::ReLU;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < n; ++j) {
            const int vp = L.zp(i, j), vm = L.zm(i, j);
            lp.var_names[vp] = "zp_" + std::to_string(i) + "_" + std::to_string(j);
            lp.var_names[vm] = "zm_" + std::to_string(i) + "_" + std::to_string(j);
            lp.lower[vp] = relu ? 0.0 : -kInf;
            lp.lower[vm] = relu ? 0.0 : -kInf;
            lp.upper[vp] = kInf;
            lp.upper[vm] = kInf;
        }
    if (norm == Norm::Manhattan)
        for (int v = 0; v < L.w_count(); ++v) lp.objective[v] = -y.y[v];

    lp.rows.reserve(static_cast<std::size_t>(2) * N + static_cast<std::size_t>(2 * N * n) * (relu ? 1 : 2));

    // epigraph rows, two per sample, in sample order
    for (int i = 0; i < N; ++i) {
        const double fi = data.target(i);
        for (int fam = 0; fam < 2; ++fam) {
            LpRow row;
            row.rel = Rel::LE;
            row.rhs = fam == 0 ? -fi : fi;
            row.name = (fam == 0 ? "E1_" : "E2_") + std::to_string(i);
            if (norm == Norm::Uniform) {
                for (int v = 0; v < L.w_count(); ++v)
                    if (y.y[v] != 0.0) {
                        row.cols.push_back(v);
                        row.vals.push_back(-y.y[v]);
                    }
            }
            row.cols.push_back(L.z(i));
            row.vals.push_back(-1.0);
            if (norm == Norm::Uniform) {
                // own-point activations carry weight 2 on one side and 0 on
                // the other; every other point's h_k enters with weight 1
                for (int k = 0; k < N; ++k)
                    for (int j = 0; j < n; ++j) {
                        const double cp = (k == i) ? (fam == 0 ? 0.0 : 2.0) : 1.0;
                        if (cp != 0.0) {
                            row.cols.push_back(L.zp(k, j));
                            row.vals.push_back(cp);
                        }
                    }
                for (int k = 0; k < N; ++k)
                    for (int j = 0; j < n; ++j) {
                        const double cm = (k == i) ? (fam == 0 ? 2.0 : 0.0) : 1.0;
                        if (cm != 0.0) {
                            row.cols.push_back(L.zm(k, j));
                            row.vals.push_back(cm);
                        }
                    }
            } else {
                if (fam == 0) {
                    for (int j = 0; j < n; ++j) {
                        row.cols.push_back(L.zm(i, j));
                        row.vals.push_back(2.0);
                    }
                } else {
                    for (int j = 0; j < n; ++j) {
                        row.cols.push_back(L.zp(i, j));
                        row.vals.push_back(2.0);
                    }
                }
            }
            lp.rows.push_back(std::move(row));
        }
    }

    // activation bound rows, ordered by (i, j, sign)
    const double slopes_relu[1] = {1.0};
    const double slopes_leaky[2] = {act.alpha, 1.0};
    const double* slopes = relu ? slopes_relu : slopes_leaky;
    const int nslopes = relu ? 1 : 2;
    for (int i = 0; i < N; ++i) {
        const auto& t = data.features(i);
        for (int j = 0; j < n; ++j)
            for (int sign = 0; sign < 2; ++sign) {
                const int zvar = sign == 0 ? L.zp(i, j) : L.zm(i, j);
                for (int s = 0; s < nslopes; ++s) {
                    LpRow row;
                    row.rel = Rel::GE;
                    row.rhs = 0.0;
                    row.name = std::string(sign == 0 ? "Bp_" : "Bm_") + std::to_string(i) + "_" +
                               std::to_string(j) + (nslopes == 2 ? (s == 0 ? "_a" : "_u") : "");
                    for (int c = 0; c < d; ++c) {
                        const double coef = -slopes[s] * t[c];
                        if (coef != 0.0) {
                            row.cols.push_back(sign == 0 ? L.w_a(j, c) : L.w_b(j, c));
                            row.vals.push_back(coef);
                        }
                    }
                    row.cols.push_back(zvar);
                    row.vals.push_back(1.0);
                    lp.rows.push_back(std::move(row));
                }
            }
    }

    return lp;
}

inline Weights extract_weights(const LpSolution& sol, int n, int d) {
    if (sol.status != LpStatus::Optimal)
        throw std::runtime_error(std::string("extract_weights: solution status ") +
                                 lp_status_str(sol.status));
    if (static_cast<int>(sol.x.size()) < 2 * n * d)
        throw std::runtime_error("extract_weights: solution too short");
    std::vector<double> flat(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(2) * n * d);
    return Weights::from_flat(flat, n, d);
}

}  // namespace dcnet
