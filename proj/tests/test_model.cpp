#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dcnet/model.hpp"
#include "test_support.hpp"

using namespace dcnet;

TEST_CASE("activation values", "[model]") {
    CHECK(activate(Activation::relu(), -3.0) == 0.0);
    CHECK(activate(Activation::relu(), 2.0) == 2.0);
    CHECK(activate(Activation::leaky(0.01), -3.0) == Catch::Approx(-0.03));
    CHECK(activate(Activation::leaky(0.01), 2.0) == 2.0);
}

TEST_CASE("leaky with alpha 0 equals relu everywhere", "[model]") {
    Rng rng(7);
    const Activation lk = Activation::leaky(0.0);
    const Activation re = Activation::relu();
    for (int k = 0; k < 200; ++k) {
        const double x = rng.uniform(-10.0, 10.0);
        CHECK(activate(lk, x) == activate(re, x));
    }
    CHECK(activate(lk, 0.0) == 0.0);
}

TEST_CASE("forward pair form", "[model]") {
    Weights w(1, 2);
    w.A(0, 0) = 2.0;
    w.A(0, 1) = 0.0;
    w.B(0, 0) = 1.0;
    w.B(0, 1) = 1.0;
    CHECK(forward(w, Activation::relu(), {1.0, -1.0}) == 2.0);

    const Weights zero(2, 2);
    CHECK(forward(zero, Activation::relu(), {0.3, 0.7}) == 0.0);

    CHECK_THROWS_AS(forward(w, Activation::relu(), {1.0}), std::invalid_argument);
}

TEST_CASE("relu forward is positively homogeneous", "[model]") {
    Rng rng(11);
    for (int k = 0; k < 200; ++k) {
        const int n = 1 + static_cast<int>(rng.below(3));
        const int d = 1 + static_cast<int>(rng.below(3));
        const Weights w = testsup::random_w(rng, n, d);
        std::vector<double> t(d);
        for (auto& v : t) v = rng.uniform(-2.0, 2.0);
        const double lambda = rng.uniform(0.0, 4.0);

        Weights ws(n, d);
        for (std::size_t i = 0; i < w.a.size(); ++i) ws.a[i] = lambda * w.a[i];
        for (std::size_t i = 0; i < w.b.size(); ++i) ws.b[i] = lambda * w.b[i];

        const double lhs = forward(ws, Activation::relu(), t);
        const double rhs = lambda * forward(w, Activation::relu(), t);
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * (1.0 + std::fabs(rhs)));
    }
}

TEST_CASE("loss with zero weights", "[model]") {
    const Dataset grid = make_grid({50, -1.0, 1.0}, phi2);
    const Weights zero(1, 2);

    double max_abs = 0.0, sum_abs = 0.0;
    for (const auto& s : grid.samples) {
        max_abs = std::max(max_abs, std::fabs(s.target));
        sum_abs += std::fabs(s.target);
    }
    CHECK(loss(zero, Activation::relu(), Norm::Uniform, grid) == max_abs);
    CHECK(loss(zero, Activation::relu(), Norm::Manhattan, grid) == sum_abs);
    // frozen from an independent enumeration
    CHECK(sum_abs == Catch::Approx(2004.6746332929947).epsilon(1e-12));
}

TEST_CASE("exact interpolant on one point has zero loss", "[model]") {
    Dataset ds;
    ds.d = 1;
    ds.samples.push_back(Sample{{1.0}, 2.0});
    Weights w(1, 1);
    w.A(0, 0) = 2.0;  // s(2*1) - s(0) = 2
    for (Norm norm : {Norm::Uniform, Norm::Manhattan})
        CHECK(loss(w, Activation::relu(), norm, ds) == 0.0);
}

TEST_CASE("uniform <= manhattan <= N * uniform", "[model]") {
    Rng rng(23);
    for (int k = 0; k < 300; ++k) {
        const Dataset ds = testsup::random_dataset(rng);
        const Weights w = testsup::random_w(rng, 1 + static_cast<int>(rng.below(2)), ds.d);
        const Activation act = rng.below(2) ? Activation::relu() : Activation::leaky(0.01);
        const double lu = loss(w, act, Norm::Uniform, ds);
        const double lm = loss(w, act, Norm::Manhattan, ds);
        CHECK(lu <= lm + 1e-12);
        CHECK(lm <= ds.size() * lu + 1e-12);
    }
}

TEST_CASE("weight file round trip is exact", "[model]") {
    testsup::TempDir tmp;
    Rng rng(31);
    const Weights w = testsup::random_w(rng, 3, 4, 17.3);
    const Activation act = Activation::leaky(0.01);
    const auto p = tmp.file("w.txt");
    save_weights(p.string(), w, act);

    const auto [w2, act2] = load_weights(p.string());
    CHECK(w2.n == w.n);
    CHECK(w2.d == w.d);
    CHECK(w2.a == w.a);
    CHECK(w2.b == w.b);
    CHECK(act2.kind == act.kind);
    CHECK(act2.alpha == act.alpha);
}

TEST_CASE("random_weights is deterministic and ranged", "[model]") {
    const Weights w1 = random_weights(2, 3, 42, 0.5);
    const Weights w2 = random_weights(2, 3, 42, 0.5);
    CHECK(w1.a == w2.a);
    CHECK(w1.b == w2.b);
    CHECK(w1.flat_size() == 12);
    for (double v : w1.flatten()) {
        CHECK(v >= -0.5);
        CHECK(v <= 0.5);
    }
    const Weights wz = random_weights(2, 3, 42, 0.0);
    for (double v : wz.flatten()) CHECK(v == 0.0);

    const Weights w3 = random_weights(2, 3, 43, 0.5);
    CHECK(w1.a != w3.a);
}
