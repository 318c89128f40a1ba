#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcnet/dataset.hpp"
#include "dcnet/util.hpp"

namespace dcnet {

enum class ActivationKind { ReLU, LeakyReLU };

struct Activation {
    ActivationKind kind = ActivationKind::ReLU;
    double alpha = 0.01;  // LeakyReLU slope for x <= 0

    static Activation relu() { return {ActivationKind::ReLU, 0.0}; }
    static Activation leaky(double a = 0.01) { return {ActivationKind::LeakyReLU, a}; }

    std::string str() const {
        if (kind == ActivationKind::ReLU) return "relu";
        return "leaky:" + format_double(alpha);
    }
};

inline double activate(const Activation& act, double x) {
    if (act.kind == ActivationKind::ReLU) return std::max(0.0, x);
    return std::max(act.alpha * x, x);
}

/// Derivative branch used at nonsmooth points: the x <= 0 side.
inline double activate_slope(const Activation& act, double x) {
    const double neg = act.kind == ActivationKind::ReLU ? 0.0 : act.alpha;
    return x > 0.0 ? 1.0 : neg;
}

enum class Norm { Uniform, Manhattan };

inline std::string norm_str(Norm n) { return n == Norm::Uniform ? "uniform" : "l1"; }

/// Network parameters in pair form: n "plus" rows A and n "minus" rows B,
/// each of width d. The flattened decision vector is a_1..a_n then b_1..b_n,
/// row-major; every vector indexed against weights elsewhere (subgradients,
/// LP columns) follows this order.
struct Weights {
    int n = 0;
    int d = 0;
    std::vector<double> a;  // n*d, row-major
    std::vector<double> b;  // n*d, row-major

    Weights() = default;
    Weights(int n_, int d_) : n(n_), d(d_), a(static_cast<std::size_t>(n_) * d_, 0.0), b(a) {}

    double& A(int j, int c) { return a[static_cast<std::size_t>(j) * d + c]; }
    double A(int j, int c) const { return a[static_cast<std::size_t>(j) * d + c]; }
    double& B(int j, int c) { return b[static_cast<std::size_t>(j) * d + c]; }
    double B(int j, int c) const { return b[static_cast<std::size_t>(j) * d + c]; }

    int flat_size() const { return 2 * n * d; }

    std::vector<double> flatten() const {
        std::vector<double> w(a);
        w.insert(w.end(), b.begin(), b.end());
        return w;
    }

    static Weights from_flat(const std::vector<double>& w, int n, int d) {
        if (static_cast<int>(w.size()) != 2 * n * d)
            throw std::invalid_argument("from_flat: size mismatch");
        Weights out(n, d);
        std::copy(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n) * d, out.a.begin());
        std::copy(w.begin() + static_cast<std::ptrdiff_t>(n) * d, w.end(), out.b.begin());
        return out;
    }
};

inline double dot(const double* row, const std::vector<double>& t) {
    double s = 0.0;
    for (std::size_t c = 0; c < t.size(); ++c) s += row[c] * t[c];
    return s;
}

/// Pair-form network output: sum_j s(a_j.t) - sum_j s(b_j.t).
inline double forward(const Weights& w, const Activation& act, const std::vector<double>& t) {
    if (static_cast<int>(t.size()) != w.d) throw std::invalid_argument("forward: dimension mismatch");
    double plus = 0.0, minus = 0.0;
    for (int j = 0; j < w.n; ++j) {
        plus += activate(act, dot(&w.a[static_cast<std::size_t>(j) * w.d], t));
        minus += activate(act, dot(&w.b[static_cast<std::size_t>(j) * w.d], t));
    }
    return plus - minus;
}

/// Uniform: max_i |f(T_i) - forward(T_i)|.  Manhattan: sum_i of the same.
/// Reduction runs in sample-index order for bit-stable results.
inline double loss(const Weights& w, const Activation& act, Norm norm, const Dataset& data) {
    if (data.d != w.d) throw std::invalid_argument("loss: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = std::fabs(data.target(i) - forward(w, act, data.features(i)));
        acc = norm == Norm::Uniform ? std::max(acc, r) : acc + r;
    }
    return acc;
}

/// Entries iid uniform on [-scale, scale] from a deterministic generator.
inline Weights random_weights(int n, int d, std::uint64_t seed, double scale) {
    Weights w(n, d);
    Rng rng(seed);
    for (auto& v : w.a) v = scale == 0.0 ? 0.0 : rng.uniform(-scale, scale);
    for (auto& v : w.b) v = scale == 0.0 ? 0.0 : rng.uniform(-scale, scale);
    return w;
}

// ---- weight file format -------------------------------------------------
// Header line: `n d activation alpha`, then 2n lines of d space-separated
// values (A rows then B rows), shortest round-trippable decimals.

inline void save_weights(const std::string& path, const Weights& w, const Activation& act) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << w.n << ' ' << w.d << ' '
        << (act.kind == ActivationKind::ReLU ? "relu" : "leaky") << ' '
        << format_double(act.alpha) << '\n';
    auto write_rows = [&](const std::vector<double>& m) {
        for (int j = 0; j < w.n; ++j) {
            for (int c = 0; c < w.d; ++c) {
                if (c) out << ' ';
                out << format_double(m[static_cast<std::size_t>(j) * w.d + c]);
            }
            out << '\n';
        }
    };
    write_rows(w.a);
    write_rows(w.b);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline std::pair<Weights, Activation> load_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    int n, d;
    std::string act_name;
    double alpha;
    if (!(in >> n >> d >> act_name >> alpha) || n < 1 || d < 1)
        throw ParseError(path + ": bad weight file header");
    Activation act;
    if (act_name == "relu") {
        act = Activation::relu();
    } else if (act_name == "leaky") {
        act = Activation::leaky(alpha);
    } else {
        throw ParseError(path + ": unknown activation '" + act_name + "'");
    }
    Weights w(n, d);
    auto read_rows = [&](std::vector<double>& m) {
        for (std::size_t k = 0; k < m.size(); ++k) {
            std::string tok;
            if (!(in >> tok) || !parse_double(tok, m[k]))
                throw ParseError(path + ": truncated or non-numeric weight row");
        }
    };
    read_rows(w.a);
    read_rows(w.b);
    return {std::move(w), act};
}

}  // namespace dcnet
