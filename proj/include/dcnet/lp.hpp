#pragma once

#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcnet/util.hpp"

namespace dcnet {

enum class Rel { LE, GE, EQ };

inline const char* rel_str(Rel r) { return r == Rel::LE ? "<=" : r == Rel::GE ? ">=" : "="; }

/// One general constraint row in sparse form. Column indices are strictly
/// increasing within a row.
struct LpRow {
    std::vector<int> cols;
    std::vector<double> vals;
    Rel rel = Rel::LE;
    double rhs = 0.0;
    std::string name;
};

/// Bounded-variable LP in explicit row form: minimize c.x subject to the
/// rows and elementwise bounds (+-inf allowed).
struct LpProblem {
    int num_vars = 0;
    std::vector<double> objective;
    std::vector<LpRow> rows;
    std::vector<double> lower;  // -inf allowed
    std::vector<double> upper;  // +inf allowed
    std::vector<std::string> var_names;

    void check() const {
        if (static_cast<int>(objective.size()) != num_vars ||
            static_cast<int>(lower.size()) != num_vars ||
            static_cast<int>(upper.size()) != num_vars)
            throw std::invalid_argument("LpProblem: vector sizes disagree with num_vars");
        for (int j = 0; j < num_vars; ++j)
            if (!(lower[j] <= upper[j]))
                throw std::invalid_argument("LpProblem: lower > upper for variable " +
                                            std::to_string(j));
        for (const auto& r : rows) {
            if (r.cols.size() != r.vals.size())
                throw std::invalid_argument("LpProblem: row index/value size mismatch");
            int prev = -1;
            for (int c : r.cols) {
                if (c <= prev || c >= num_vars)
                    throw std::invalid_argument("LpProblem: bad column index in row " + r.name);
                prev = c;
            }
        }
    }
};

enum class LpStatus { Optimal, Unbounded, Infeasible, IterLimit };

inline const char* lp_status_str(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "Optimal";
        case LpStatus::Unbounded: return "Unbounded";
        case LpStatus::Infeasible: return "Infeasible";
        default: return "IterLimit";
    }
}

struct LpSolution {
    LpStatus status = LpStatus::IterLimit;
    double objective_value = 0.0;
    std::vector<double> x;
    /// Variables with two finite bounds sitting at one of them at the optimum
    /// (for the training LPs these are exactly the trust-boxed weights).
    int active_trust_bounds = 0;
    /// Diagnostics: infeasible-row witness, unbounded ray description, phase log.
    std::string note;
    /// Certified improving ray when status == Unbounded.
    std::vector<double> ray;
};

/// Human-readable dump, one row per line: name, relation, rhs, then sparse
/// coefficient pairs. Bounds and objective follow in their own sections.
inline void dump_lp(const LpProblem& lp, std::ostream& os) {
    os << "minimize";
    for (int j = 0; j < lp.num_vars; ++j)
        if (lp.objective[j] != 0.0)
            os << ' ' << (j < static_cast<int>(lp.var_names.size()) ? lp.var_names[j]
                                                                    : "x" + std::to_string(j))
               << ':' << format_double(lp.objective[j]);
    os << '\n';
    for (const auto& r : lp.rows) {
        os << r.name << ' ' << rel_str(r.rel) << ' ' << format_double(r.rhs);
        for (std::size_t k = 0; k < r.cols.size(); ++k)
            os << ' '
               << (r.cols[k] < static_cast<int>(lp.var_names.size())
                       ? lp.var_names[r.cols[k]]
                       : "x" + std::to_string(r.cols[k]))
               << ':' << format_double(r.vals[k]);
        os << '\n';
    }
    for (int j = 0; j < lp.num_vars; ++j) {
        os << "bound "
           << (j < static_cast<int>(lp.var_names.size()) ? lp.var_names[j]
                                                         : "x" + std::to_string(j))
           << " [" << format_double(lp.lower[j]) << ", " << format_double(lp.upper[j]) << "]\n";
    }
}

}  // namespace dcnet
