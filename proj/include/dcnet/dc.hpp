#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dcnet/dataset.hpp"
#include "dcnet/model.hpp"

namespace dcnet {

/// Value of the decomposition p = g - h at one point, with g and h convex.
struct DcValue {
    double g = 0.0;
    double h = 0.0;
    double p = 0.0;
};

/// Subgradient of h, aligned with the Weights flatten order
/// (y_1+..y_n+ then y_1-..y_n-, each block of length d).
struct Subgradient {
    std::vector<double> y;
};

namespace detail {

/// Per-sample convex terms. h_i is the sum of activations over both weight
/// groups; g_i is the larger of the two affine-in-activations branches whose
/// difference with h_i recovers |f(T_i) - forward(T_i)|.
struct PointTerms {
    double gi;
    double hi;
};

inline PointTerms point_terms(const Weights& w, const Activation& act,
                              const std::vector<double>& t, double target) {
    double sa = 0.0, sb = 0.0;
    for (int j = 0; j < w.n; ++j) {
        sa += activate(act, dot(&w.a[static_cast<std::size_t>(j) * w.d], t));
        sb += activate(act, dot(&w.b[static_cast<std::size_t>(j) * w.d], t));
    }
    const double gi = std::max(target + 2.0 * sb, 2.0 * sa - target);
    return {gi, sa + sb};
}

}  // namespace detail

inline double eval_hi(const Weights& w, const Activation& act, std::size_t i, const Dataset& data) {
    if (i >= data.size()) throw std::out_of_range("eval_hi: sample index");
    return detail::point_terms(w, act, data.features(i), data.target(i)).hi;
}

inline double eval_gi(const Weights& w, const Activation& act, std::size_t i, const Dataset& data) {
    if (i >= data.size()) throw std::out_of_range("eval_gi: sample index");
    return detail::point_terms(w, act, data.features(i), data.target(i)).gi;
}

/// Uniform: g = max_i { g_i + sum_{k != i} h_k }, h = sum_k h_k.
/// Manhattan: g = sum_i g_i, h = sum_i h_i.
/// p is accumulated from the per-sample differences g_i - h_i so that it does
/// not inherit cancellation error from the large g and h totals.
inline DcValue eval_dc(const Weights& w, const Activation& act, Norm norm, const Dataset& data) {
    if (data.size() == 0) throw std::invalid_argument("eval_dc: empty dataset");
    if (data.d != w.d) throw std::invalid_argument("eval_dc: dimension mismatch");

    const std::size_t N = data.size();
    std::vector<detail::PointTerms> terms(N);
    double hsum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        terms[i] = detail::point_terms(w, act, data.features(i), data.target(i));
        hsum += terms[i].hi;
    }

    DcValue v;
    v.h = hsum;
    if (norm == Norm::Uniform) {
        double best = -kInf;
        double p = -kInf;
        for (std::size_t i = 0; i < N; ++i) {
            best = std::max(best, terms[i].gi + (hsum - terms[i].hi));
            p = std::max(p, terms[i].gi - terms[i].hi);
        }
        v.g = best;
        v.p = p;
    } else {
        double gsum = 0.0, p = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            gsum += terms[i].gi;
            p += terms[i].gi - terms[i].hi;
        }
        v.g = gsum;
        v.p = p;
    }
    return v;
}

/// One element of the subdifferential of h at w; h is identical for both
/// norms, so norm does not change the result. ReLU sums T_i over strictly
/// positive inner products; LeakyReLU adds alpha times the complementary sum.
inline Subgradient subgrad_h(const Weights& w, const Activation& act, Norm /*norm*/,
                             const Dataset& data) {
    if (data.d != w.d) throw std::invalid_argument("subgrad_h: dimension mismatch");
    const int n = w.n, d = w.d;
    const double neg = act.kind == ActivationKind::ReLU ? 0.0 : act.alpha;

    Subgradient sg;
    sg.y.assign(static_cast<std::size_t>(2) * n * d, 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& t = data.features(i);
        for (int j = 0; j < n; ++j) {
            const double slope_a =
                dot(&w.a[static_cast<std::size_t>(j) * d], t) > 0.0 ? 1.0 : neg;
            const double slope_b =
                dot(&w.b[static_cast<std::size_t>(j) * d], t) > 0.0 ? 1.0 : neg;
            double* ya = &sg.y[static_cast<std::size_t>(j) * d];
            double* yb = &sg.y[static_cast<std::size_t>(n + j) * d];
            if (slope_a != 0.0)
                for (int c = 0; c < d; ++c) ya[c] += slope_a * t[c];
            if (slope_b != 0.0)
                for (int c = 0; c < d; ++c) yb[c] += slope_b * t[c];
        }
    }
    return sg;
}

}  // namespace dcnet
