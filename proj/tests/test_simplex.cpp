#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "dcnet/oracle.hpp"
#include "dcnet/simplex.hpp"
#include "test_support.hpp"

using namespace dcnet;

namespace {

LpProblem single_var_lp() {
    // minimize x subject to x >= 3, x <= 10 (both as rows; x itself free)
    LpProblem lp;
    lp.num_vars = 1;
    lp.objective = {1.0};
    lp.lower = {-kInf};
    lp.upper = {kInf};
    lp.var_names = {"x"};
    lp.rows.push_back({{0}, {1.0}, Rel::GE, 3.0, "lb"});
    lp.rows.push_back({{0}, {1.0}, Rel::LE, 10.0, "ub"});
    return lp;
}

bool rows_satisfied(const LpProblem& lp, const std::vector<double>& x, double tol) {
    for (const auto& r : lp.rows) {
        double act = 0.0;
        for (std::size_t k = 0; k < r.cols.size(); ++k) act += r.vals[k] * x[r.cols[k]];
        if (r.rel == Rel::LE && act > r.rhs + tol) return false;
        if (r.rel == Rel::GE && act < r.rhs - tol) return false;
        if (r.rel == Rel::EQ && std::fabs(act - r.rhs) > tol) return false;
    }
    for (int j = 0; j < lp.num_vars; ++j)
        if (x[j] < lp.lower[j] - tol || x[j] > lp.upper[j] + tol) return false;
    return true;
}

}  // namespace

TEST_CASE("minimize x with x in [3, 10]", "[simplex]") {
    const LpSolution sol = solve_lp(single_var_lp());
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective_value == Catch::Approx(3.0).margin(1e-9));
    CHECK(sol.x[0] == Catch::Approx(3.0).margin(1e-9));
}

TEST_CASE("unbounded free minimization", "[simplex]") {
    LpProblem lp;
    lp.num_vars = 1;
    lp.objective = {-1.0};
    lp.lower = {-kInf};
    lp.upper = {kInf};
    lp.var_names = {"x"};
    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Unbounded);
    REQUIRE(sol.ray.size() == 1);
    CHECK(sol.ray[0] > 0.0);  // objective -x improves along +x
    CHECK_FALSE(sol.note.empty());
}

TEST_CASE("infeasible rows are reported with a witness", "[simplex]") {
    LpProblem lp;
    lp.num_vars = 1;
    lp.objective = {1.0};
    lp.lower = {-kInf};
    lp.upper = {kInf};
    lp.var_names = {"x"};
    lp.rows.push_back({{0}, {1.0}, Rel::GE, 3.0, "atleast3"});
    lp.rows.push_back({{0}, {1.0}, Rel::LE, 2.0, "atmost2"});
    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Infeasible);
    CHECK(sol.note.find("infeasible") != std::string::npos);
}

TEST_CASE("equalities and fixed variables", "[simplex]") {
    // min x + y  s.t.  x + y = 2, x - y = 0  ->  x = y = 1
    LpProblem lp;
    lp.num_vars = 2;
    lp.objective = {1.0, 1.0};
    lp.lower = {-kInf, -kInf};
    lp.upper = {kInf, kInf};
    lp.var_names = {"x", "y"};
    lp.rows.push_back({{0, 1}, {1.0, 1.0}, Rel::EQ, 2.0, "sum"});
    lp.rows.push_back({{0, 1}, {1.0, -1.0}, Rel::EQ, 0.0, "diff"});
    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x[0] == Catch::Approx(1.0).margin(1e-8));
    CHECK(sol.x[1] == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("box-only problems", "[simplex]") {
    LpProblem lp;
    lp.num_vars = 3;
    lp.objective = {1.0, -2.0, 0.5};
    lp.lower = {-1.0, -1.0, -1.0};
    lp.upper = {2.0, 2.0, 2.0};
    lp.var_names = {"a", "b", "c"};
    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x[0] == -1.0);
    CHECK(sol.x[1] == 2.0);
    CHECK(sol.x[2] == -1.0);
    CHECK(sol.objective_value == Catch::Approx(-5.5));
    CHECK(sol.active_trust_bounds == 3);
}

TEST_CASE("duplicate rows do not change the optimum", "[simplex]") {
    LpProblem lp = single_var_lp();
    lp.rows.push_back(lp.rows[0]);
    lp.rows.push_back(lp.rows[1]);
    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective_value == Catch::Approx(3.0).margin(1e-9));
}

TEST_CASE("resolving is bit-identical", "[simplex]") {
    Rng rng(101);
    const LpProblem lp = testsup::random_boxed_lp(rng);
    const LpSolution first = solve_lp(lp);
    for (int k = 0; k < 4; ++k) {
        const LpSolution again = solve_lp(lp);
        REQUIRE(again.status == first.status);
        REQUIRE(again.x == first.x);
        CHECK(again.objective_value == first.objective_value);
    }
}

TEST_CASE("random boxed LPs agree with the vertex oracle", "[simplex][property]") {
    Rng rng(2024);
    int optimal_seen = 0, infeasible_seen = 0;
    for (int k = 0; k < 500; ++k) {
        const LpProblem lp = testsup::random_boxed_lp(rng);
        const auto ref = oracle::oracle_vertex_lp(lp);
        const LpSolution sol = solve_lp(lp);
        INFO("case " << k);
        if (ref.feasible) {
            ++optimal_seen;
            REQUIRE(sol.status == LpStatus::Optimal);
            CHECK(std::fabs(sol.objective_value - ref.value) <=
                  1e-6 * (1.0 + std::fabs(ref.value)));
            CHECK(rows_satisfied(lp, sol.x, 1e-7));
        } else {
            ++infeasible_seen;
            REQUIRE(sol.status == LpStatus::Infeasible);
        }
    }
    // the generator must exercise both outcomes
    CHECK(optimal_seen > 100);
    CHECK(infeasible_seen > 10);
}

TEST_CASE("phase log is emitted when requested", "[simplex]") {
    std::ostringstream log;
    SolverConfig cfg;
    cfg.log = &log;
    const LpSolution sol = solve_lp(single_var_lp(), cfg);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(log.str().find("phase 1") != std::string::npos);
    CHECK(log.str().find("phase 2") != std::string::npos);
}

TEST_CASE("iteration limit is reported", "[simplex]") {
    Rng rng(77);
    LpProblem lp = testsup::random_boxed_lp(rng);
    SolverConfig cfg;
    cfg.max_pivots = 0;
    const LpSolution sol = solve_lp(lp, cfg);
    CHECK(sol.status == LpStatus::IterLimit);
}
