#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dcnet/dataset.hpp"
#include "dcnet/model.hpp"

namespace dcnet {

enum class Optimizer { Adam, Adamax };

struct BaselineConfig {
    Optimizer optimizer = Optimizer::Adamax;
    double step_size = 0.0;  // 0 selects the optimizer default (2e-3 / 1e-3)
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;  // Adam only
    int max_epochs = 5000;
    std::uint64_t seed = 0;
    double init_scale = 0.5;

    double effective_step() const {
        if (step_size > 0.0) return step_size;
        return optimizer == Optimizer::Adamax ? 2e-3 : 1e-3;
    }
};

/// A subgradient of the loss at w, aligned with the Weights flatten order.
/// Uniform picks the lowest-index sample attaining the max; Manhattan sums
/// over all samples. Activation kinks take the x <= 0 branch.
inline std::vector<double> loss_subgradient(const Weights& w, const Activation& act, Norm norm,
                                            const Dataset& data) {
    if (data.d != w.d) throw std::invalid_argument("loss_subgradient: dimension mismatch");
    const int n = w.n, d = w.d;
    std::vector<double> g(static_cast<std::size_t>(2) * n * d, 0.0);

    auto accumulate = [&](std::size_t i) {
        const auto& t = data.features(i);
        const double r = data.target(i) - forward(w, act, t);
        const double s = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
        if (s == 0.0) return;
        for (int j = 0; j < n; ++j) {
            const double sl_a = activate_slope(act, dot(&w.a[static_cast<std::size_t>(j) * d], t));
            const double sl_b = activate_slope(act, dot(&w.b[static_cast<std::size_t>(j) * d], t));
            for (int c = 0; c < d; ++c) {
                g[static_cast<std::size_t>(j) * d + c] -= s * sl_a * t[c];
                g[static_cast<std::size_t>(n + j) * d + c] += s * sl_b * t[c];
            }
        }
    };

    if (norm == Norm::Uniform) {
        std::size_t arg = 0;
        double worst = -1.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double r = std::fabs(data.target(i) - forward(w, act, data.features(i)));
            if (r > worst) {
                worst = r;
                arg = i;
            }
        }
        accumulate(arg);
    } else {
        for (std::size_t i = 0; i < data.size(); ++i) accumulate(i);
    }
    return g;
}

struct BaselineResult {
    Weights final_weights;  // best seen
    double final_loss = 0.0;
    std::vector<double> loss_curve;  // index 0 is the initial loss
};

/// Full-batch subgradient descent with Adam or Adamax updates. Deterministic
/// given seed and config; returns the best loss seen over all epochs.
inline BaselineResult train_baseline(const Dataset& data, int n, const Activation& act, Norm norm,
                                     const BaselineConfig& cfg) {
    if (n < 1) throw std::invalid_argument("train_baseline: n >= 1");
    Weights w = random_weights(n, data.d, cfg.seed, cfg.init_scale);
    const std::size_t dim = static_cast<std::size_t>(w.flat_size());

    std::vector<double> m(dim, 0.0), v(dim, 0.0);
    const double eta = cfg.effective_step();
    const double one_minus_b1 = 1.0 - cfg.beta1;
    const double one_minus_b2 = 1.0 - cfg.beta2;
    double b1_pow = 1.0, b2_pow = 1.0;

    BaselineResult out;
    out.loss_curve.reserve(cfg.max_epochs + 1);
    double cur = loss(w, act, norm, data);
    out.loss_curve.push_back(cur);
    out.final_weights = w;
    out.final_loss = cur;

    std::vector<double> flat = w.flatten();
    for (int t = 1; t <= cfg.max_epochs; ++t) {
        const std::vector<double> g = loss_subgradient(w, act, norm, data);
        b1_pow *= cfg.beta1;
        const double bias1 = 1.0 - b1_pow;
        if (cfg.optimizer == Optimizer::Adamax) {
            for (std::size_t k = 0; k < dim; ++k) {
                m[k] = cfg.beta1 * m[k] + one_minus_b1 * g[k];
                v[k] = std::max(cfg.beta2 * v[k], std::fabs(g[k]));
                // grouping (bias1 * v) keeps the first step exactly
                // eta * sign(g)
                const double denom = bias1 * v[k];
                const double ratio = denom == 0.0 ? 0.0 : m[k] / denom;
                flat[k] -= eta * ratio;
            }
        } else {
            b2_pow *= cfg.beta2;
            const double bias2 = 1.0 - b2_pow;
            for (std::size_t k = 0; k < dim; ++k) {
                m[k] = cfg.beta1 * m[k] + one_minus_b1 * g[k];
                v[k] = cfg.beta2 * v[k] + one_minus_b2 * g[k] * g[k];
                const double mhat = m[k] / bias1;
                const double vhat = v[k] / bias2;
                flat[k] -= eta * mhat / (std::sqrt(vhat) + cfg.epsilon);
            }
        }
        w = Weights::from_flat(flat, n, data.d);
        cur = loss(w, act, norm, data);
        out.loss_curve.push_back(cur);
        if (cur < out.final_loss) {
            out.final_loss = cur;
            out.final_weights = w;
        }
    }
    return out;
}

}  // namespace dcnet
