#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcnet/lp.hpp"

namespace dcnet {

struct SolverConfig {
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-7;
    int max_pivots = 200000;
    bool anti_cycling = true;       // Bland's rule after a degenerate stall
    int refactor_interval = 100;    // pivots between basis refactorizations
    int bland_stall_threshold = 50;
    std::ostream* log = nullptr;    // phase/pivot log (optional)
};

namespace detail {

/// Sparse LU of a basis matrix, stored as an elimination sequence usable for
/// both Bx = v and B^T y = v solves. Pivots are chosen by singleton peeling
/// with a Markowitz-style fallback; fill happens only in the fallback.
class BasisLU {
public:
    // columns[slot] = sparse basis column (sorted by row). Returns false and
    // fills `unpivoted_slots`/`unpivoted_rows` when the basis is singular.
    bool factorize(const std::vector<std::vector<std::pair<int, double>>>& columns,
                   std::vector<int>& unpivoted_slots, std::vector<int>& unpivoted_rows) {
        m_ = static_cast<int>(columns.size());
        piv_row_.assign(m_, -1);
        piv_slot_.assign(m_, -1);
        piv_val_.assign(m_, 0.0);
        lcols_.assign(m_, {});
        urows_.assign(m_, {});
        step_of_row_.assign(m_, -1);
        step_of_slot_.assign(m_, -1);

        // working copy
        cols_ = columns;
        rows_.assign(m_, {});
        col_count_.assign(m_, 0);
        row_count_.assign(m_, 0);
        row_alive_.assign(m_, true);
        col_alive_.assign(m_, true);
        for (int j = 0; j < m_; ++j) {
            col_count_[j] = static_cast<int>(cols_[j].size());
            for (const auto& [r, v] : cols_[j]) {
                rows_[r].push_back(j);
                ++row_count_[r];
            }
        }

        int step = 0;
        while (step < m_) {
            int r = -1, c = -1;
            if (!pick_pivot(r, c)) break;
            const double piv = value_at(c, r);
            piv_row_[step] = r;
            piv_slot_[step] = c;
            piv_val_[step] = piv;
            step_of_row_[r] = step;
            step_of_slot_[c] = step;

            // U entries: pivot-row values in other alive columns (pre-update).
            std::vector<int> urow_slots;
            for (int j : rows_[r])
                if (j != c && col_alive_[j] && has_row(j, r)) urow_slots.push_back(j);
            std::sort(urow_slots.begin(), urow_slots.end());
            for (int j : urow_slots) urows_[step].push_back({j, value_at(j, r)});

            // L multipliers: pivot-column values in other alive rows.
            for (const auto& [i, v] : cols_[c])
                if (i != r && row_alive_[i]) lcols_[step].push_back({i, v / piv});

            row_alive_[r] = false;
            col_alive_[c] = false;
            for (int j : urow_slots) --col_count_[j];
            for (const auto& [i, v] : cols_[c])
                if (row_alive_[i]) --row_count_[i];

            // Schur update only when both the pivot row and column had
            // off-pivot entries (general Markowitz step; peeled singletons
            // skip this entirely).
            if (!lcols_[step].empty() && !urow_slots.empty())
                for (int j : urow_slots) eliminate_into(j, step, value_at_dead(j, r));
            ++step;
        }

        unpivoted_slots.clear();
        unpivoted_rows.clear();
        if (step < m_) {
            for (int j = 0; j < m_; ++j)
                if (col_alive_[j]) unpivoted_slots.push_back(j);
            for (int i = 0; i < m_; ++i)
                if (row_alive_[i]) unpivoted_rows.push_back(i);
            return false;
        }

        // convert U slot references to elimination steps
        for (auto& row : urows_)
            for (auto& e : row) e.first = step_of_slot_[e.first];
        release_working();
        return true;
    }

    int dim() const { return m_; }

    /// x := B^{-1} x, both indexed by row on input and by basis slot on output.
    void ftran(std::vector<double>& x, std::vector<double>& scratch) const {
        scratch.assign(m_, 0.0);
        for (int k = 0; k < m_; ++k) {
            const double zk = x[piv_row_[k]];
            scratch[k] = zk;
            if (zk != 0.0)
                for (const auto& [i, mult] : lcols_[k]) x[i] -= mult * zk;
        }
        for (int k = m_ - 1; k >= 0; --k) {
            double t = scratch[k];
            for (const auto& [k2, val] : urows_[k]) t -= val * scratch[k2];
            scratch[k] = t / piv_val_[k];
        }
        for (int k = 0; k < m_; ++k) x[piv_slot_[k]] = scratch[k];
    }

    /// y := B^{-T} y, indexed by basis slot on input and by row on output.
    void btran(std::vector<double>& y, std::vector<double>& scratch) const {
        scratch.assign(m_, 0.0);
        for (int k = 0; k < m_; ++k) scratch[k] = y[piv_slot_[k]];
        for (int k = 0; k < m_; ++k) {
            const double uk = scratch[k] / piv_val_[k];
            scratch[k] = uk;
            if (uk != 0.0)
                for (const auto& [k2, val] : urows_[k]) scratch[k2] -= val * uk;
        }
        for (int k = m_ - 1; k >= 0; --k) {
            double t = scratch[k];
            for (const auto& [i, mult] : lcols_[k]) t -= mult * y[i];  // y[i] already final
            y[piv_row_[k]] = t;
        }
        // rows fully overwritten above; nothing else to clear
    }

private:
    static constexpr double kPivTol = 1e-11;
    static constexpr double kRelPivTol = 0.01;

    bool pick_pivot(int& r_out, int& c_out) {
        // singleton columns first, then singleton rows, then smallest
        // Markowitz-count column with a threshold-stable entry
        int best_c = -1, best_count = 1 << 30;
        for (int j = 0; j < m_; ++j) {
            if (!col_alive_[j]) continue;
            if (col_count_[j] < best_count) {
                best_count = col_count_[j];
                best_c = j;
                if (best_count <= 1) break;
            }
        }
        if (best_c < 0) return false;
        if (best_count == 1) {
            compact(best_c);
            if (cols_[best_c].empty() || std::fabs(cols_[best_c][0].second) < kPivTol)
                return false;  // numerically singular column
            r_out = cols_[best_c][0].first;
            c_out = best_c;
            return true;
        }
        // singleton row?
        for (int i = 0; i < m_; ++i) {
            if (!row_alive_[i] || row_count_[i] != 1) continue;
            for (int j : rows_[i]) {
                if (!col_alive_[j] || !has_row(j, i)) continue;
                if (std::fabs(value_at(j, i)) >= kPivTol) {
                    r_out = i;
                    c_out = j;
                    return true;
                }
            }
        }
        // Markowitz fallback within the min-count column
        compact(best_c);
        double colmax = 0.0;
        for (const auto& [i, v] : cols_[best_c]) colmax = std::max(colmax, std::fabs(v));
        if (colmax < kPivTol) return false;
        int best_r = -1, best_rc = 1 << 30;
        for (const auto& [i, v] : cols_[best_c]) {
            if (std::fabs(v) < kRelPivTol * colmax) continue;
            if (row_count_[i] < best_rc) {
                best_rc = row_count_[i];
                best_r = i;
            }
        }
        if (best_r < 0) return false;
        r_out = best_r;
        c_out = best_c;
        return true;
    }

    void compact(int j) {
        auto& col = cols_[j];
        col.erase(std::remove_if(col.begin(), col.end(),
                                 [&](const auto& e) { return !row_alive_[e.first]; }),
                  col.end());
    }

    bool has_row(int j, int r) const {
        const auto& col = cols_[j];
        auto it = std::lower_bound(col.begin(), col.end(), r,
                                   [](const auto& e, int row) { return e.first < row; });
        return it != col.end() && it->first == r;
    }

    double value_at(int j, int r) const {
        const auto& col = cols_[j];
        auto it = std::lower_bound(col.begin(), col.end(), r,
                                   [](const auto& e, int row) { return e.first < row; });
        return (it != col.end() && it->first == r) ? it->second : 0.0;
    }
    // same lookup; name documents that the row was just retired
    double value_at_dead(int j, int r) const { return value_at(j, r); }

    /// col_j -= (a_rj / piv) * col_pivot over the alive submatrix (fill-in
    /// allowed); a_rj is the pre-update pivot-row entry of column j.
    void eliminate_into(int j, int step, double a_rj) {
        if (a_rj == 0.0) return;
        const double mult = a_rj / piv_val_[step];
        const auto& pcol = cols_[piv_slot_[step]];
        auto& col = cols_[j];
        std::vector<std::pair<int, double>> merged;
        merged.reserve(col.size() + pcol.size());
        std::size_t ia = 0, ib = 0;
        while (ia < col.size() || ib < pcol.size()) {
            // skip dead rows in the pivot column (they belong to L/U already)
            while (ib < pcol.size() && !row_alive_[pcol[ib].first]) ++ib;
            if (ib == pcol.size()) {
                while (ia < col.size()) merged.push_back(col[ia++]);
                break;
            }
            if (ia == col.size() || pcol[ib].first < col[ia].first) {
                // fill-in
                const int r = pcol[ib].first;
                merged.push_back({r, -mult * pcol[ib].second});
                rows_[r].push_back(j);
                ++row_count_[r];
                ++col_count_[j];
                ++ib;
            } else if (col[ia].first < pcol[ib].first) {
                merged.push_back(col[ia++]);
            } else {
                merged.push_back({col[ia].first, col[ia].second - mult * pcol[ib].second});
                ++ia;
                ++ib;
            }
        }
        col = std::move(merged);
    }

    void release_working() {
        cols_.clear();
        cols_.shrink_to_fit();
        rows_.clear();
        rows_.shrink_to_fit();
    }

    int m_ = 0;
    std::vector<int> piv_row_, piv_slot_;
    std::vector<double> piv_val_;
    std::vector<std::vector<std::pair<int, double>>> lcols_;  // per step: (row, mult)
    std::vector<std::vector<std::pair<int, double>>> urows_;  // per step: (step', val)
    std::vector<int> step_of_row_, step_of_slot_;

    // factorization workspace
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<std::vector<int>> rows_;
    std::vector<int> col_count_, row_count_;
    std::vector<char> row_alive_, col_alive_;
};

}  // namespace detail

/// Deterministic bounded-variable primal simplex. Two phases (feasibility,
/// optimality) over the row matrix extended with one logical column per row;
/// the basis inverse is a sparse LU plus product-form eta updates, rebuilt
/// every `refactor_interval` pivots.
class SimplexSolver {
public:
    SimplexSolver(const LpProblem& lp, const SolverConfig& cfg) : lp_(lp), cfg_(cfg) {
        lp.check();
        n_ = lp.num_vars;
        m_ = static_cast<int>(lp.rows.size());
        build_columns();
    }

    LpSolution solve() {
        LpSolution out;
        init_state();

        // Phase 1: drive basic variables inside their bounds.
        const Outcome ph1 = run_phase(true);
        if (cfg_.log)
            *cfg_.log << "phase 1: " << pivots_ << " pivots, infeasibility "
                      << format_double(total_infeasibility()) << "\n";
        if (ph1 == Outcome::IterLimit) return finish(out, LpStatus::IterLimit);
        if (total_infeasibility() > phase1_exit_tol()) {
            out.note = infeasibility_witness();
            return finish(out, LpStatus::Infeasible);
        }

        const int ph1_pivots = pivots_;
        const Outcome ph2 = run_phase(false);
        if (cfg_.log)
            *cfg_.log << "phase 2: " << (pivots_ - ph1_pivots) << " pivots, objective "
                      << format_double(objective_value()) << "\n";
        if (ph2 == Outcome::IterLimit) return finish(out, LpStatus::IterLimit);
        if (ph2 == Outcome::Unbounded) {
            out.ray = unbounded_ray_;
            out.note = unbounded_note_;
            return finish(out, LpStatus::Unbounded);
        }
        return finish(out, LpStatus::Optimal);
    }

private:
    enum class Outcome { Done, IterLimit, Unbounded };
    enum class VState : char { Basic, AtLower, AtUpper, FreeZero };

    static constexpr double kAlphaTol = 1e-11;
    static constexpr double kDegenTol = 1e-10;

    const LpProblem& lp_;
    SolverConfig cfg_;
    int n_ = 0, m_ = 0, total_ = 0;

    // column-major structural matrix
    std::vector<int> col_ptr_, col_row_;
    std::vector<double> col_val_;
    std::vector<double> rhs_;

    std::vector<double> lo_, up_, cost_;
    std::vector<VState> state_;
    std::vector<double> xval_;
    std::vector<int> basic_;           // slot -> column
    std::vector<int> slot_of_;         // column -> slot or -1
    detail::BasisLU lu_;
    struct Eta {
        int pslot;
        double pval;
        std::vector<std::pair<int, double>> others;  // (slot, alpha)
    };
    std::vector<Eta> etas_;
    int pivots_ = 0, pivots_since_refactor_ = 0, degen_streak_ = 0;
    bool bland_ = false;
    std::vector<double> work_, scratch_, alpha_;
    std::vector<double> unbounded_ray_;
    std::string unbounded_note_;

    void build_columns() {
        total_ = n_ + m_;
        col_ptr_.assign(n_ + 1, 0);
        std::vector<std::vector<std::pair<int, double>>> cols(n_);
        rhs_.resize(m_);
        for (int r = 0; r < m_; ++r) {
            const auto& row = lp_.rows[r];
            rhs_[r] = row.rhs;
            for (std::size_t k = 0; k < row.cols.size(); ++k)
                if (row.vals[k] != 0.0) cols[row.cols[k]].push_back({r, row.vals[k]});
        }
        std::size_t nnz = 0;
        for (const auto& c : cols) nnz += c.size();
        col_row_.reserve(nnz);
        col_val_.reserve(nnz);
        for (int j = 0; j < n_; ++j) {
            col_ptr_[j] = static_cast<int>(col_row_.size());
            for (const auto& [r, v] : cols[j]) {
                col_row_.push_back(r);
                col_val_.push_back(v);
            }
        }
        col_ptr_[n_] = static_cast<int>(col_row_.size());

        lo_.assign(total_, 0.0);
        up_.assign(total_, 0.0);
        cost_.assign(total_, 0.0);
        for (int j = 0; j < n_; ++j) {
            lo_[j] = lp_.lower[j];
            up_[j] = lp_.upper[j];
            cost_[j] = lp_.objective[j];
        }
        for (int r = 0; r < m_; ++r) {
            const int j = n_ + r;
            switch (lp_.rows[r].rel) {
                case Rel::LE: lo_[j] = 0.0; up_[j] = kInf; break;
                case Rel::GE: lo_[j] = -kInf; up_[j] = 0.0; break;
                case Rel::EQ: lo_[j] = 0.0; up_[j] = 0.0; break;
            }
        }
    }

    bool is_logical(int j) const { return j >= n_; }

    void column_into_work(int j) {
        std::fill(work_.begin(), work_.end(), 0.0);
        if (is_logical(j)) {
            work_[j - n_] = 1.0;
        } else {
            for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) work_[col_row_[k]] = col_val_[k];
        }
    }

    double col_dot_y(int j, const std::vector<double>& y) const {
        if (is_logical(j)) return y[j - n_];
        double s = 0.0;
        for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) s += col_val_[k] * y[col_row_[k]];
        return s;
    }

    void init_state() {
        state_.assign(total_, VState::AtLower);
        xval_.assign(total_, 0.0);
        slot_of_.assign(total_, -1);
        basic_.resize(m_);
        for (int j = 0; j < n_; ++j) {
            if (lo_[j] > -kInf) {
                state_[j] = VState::AtLower;
                xval_[j] = lo_[j];
            } else if (up_[j] < kInf) {
                state_[j] = VState::AtUpper;
                xval_[j] = up_[j];
            } else {
                state_[j] = VState::FreeZero;
                xval_[j] = 0.0;
            }
        }
        for (int r = 0; r < m_; ++r) {
            const int j = n_ + r;
            basic_[r] = j;
            slot_of_[j] = r;
            state_[j] = VState::Basic;
        }
        work_.assign(m_, 0.0);
        scratch_.assign(m_, 0.0);
        alpha_.assign(m_, 0.0);
        etas_.clear();
        pivots_ = pivots_since_refactor_ = degen_streak_ = 0;
        bland_ = false;
        refactorize();
        recompute_basics();
    }

    void refactorize() {
        std::vector<std::vector<std::pair<int, double>>> cols(m_);
        for (int s = 0; s < m_; ++s) {
            const int j = basic_[s];
            if (is_logical(j)) {
                cols[s] = {{j - n_, 1.0}};
            } else {
                for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k)
                    cols[s].push_back({col_row_[k], col_val_[k]});
            }
        }
        std::vector<int> bad_slots, bad_rows;
        for (int attempt = 0; attempt < 3; ++attempt) {
            if (lu_.factorize(cols, bad_slots, bad_rows)) {
                etas_.clear();
                pivots_since_refactor_ = 0;
                return;
            }
            // basis repair: give the unpivoted rows their logical columns
            if (cfg_.log)
                *cfg_.log << "basis repair: " << bad_slots.size() << " singular slot(s)\n";
            for (std::size_t k = 0; k < bad_slots.size(); ++k) {
                const int s = bad_slots[k];
                const int r = bad_rows[k];
                const int out = basic_[s];
                slot_of_[out] = -1;
                set_nonbasic_state(out);
                const int j = n_ + r;
                if (slot_of_[j] >= 0) throw std::runtime_error("simplex: repair clash");
                basic_[s] = j;
                slot_of_[j] = s;
                state_[j] = VState::Basic;
                cols[s] = {{r, 1.0}};
            }
        }
        throw std::runtime_error("simplex: basis factorization failed");
    }

    void set_nonbasic_state(int j) {
        if (lo_[j] > -kInf) {
            state_[j] = VState::AtLower;
            xval_[j] = lo_[j];
        } else if (up_[j] < kInf) {
            state_[j] = VState::AtUpper;
            xval_[j] = up_[j];
        } else {
            state_[j] = VState::FreeZero;
            xval_[j] = 0.0;
        }
    }

    void recompute_basics() {
        std::fill(work_.begin(), work_.end(), 0.0);
        for (int r = 0; r < m_; ++r) work_[r] = rhs_[r];
        for (int j = 0; j < total_; ++j) {
            if (state_[j] == VState::Basic || xval_[j] == 0.0) continue;
            if (is_logical(j)) {
                work_[j - n_] -= xval_[j];
            } else {
                for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k)
                    work_[col_row_[k]] -= col_val_[k] * xval_[j];
            }
        }
        ftran_inplace(work_);
        for (int s = 0; s < m_; ++s) xval_[basic_[s]] = work_[s];
    }

    void ftran_inplace(std::vector<double>& v) {
        lu_.ftran(v, scratch_);
        for (const auto& e : etas_) {
            const double t = v[e.pslot] / e.pval;
            if (t != 0.0)
                for (const auto& [s, a] : e.others) v[s] -= a * t;
            v[e.pslot] = t;
        }
    }

    void btran_inplace(std::vector<double>& v) {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double t = v[it->pslot];
            for (const auto& [s, a] : it->others) t -= a * v[s];
            v[it->pslot] = t / it->pval;
        }
        lu_.btran(v, scratch_);
    }

    double infeas_below(int j) const { return lo_[j] - xval_[j]; }
    double infeas_above(int j) const { return xval_[j] - up_[j]; }

    double total_infeasibility() const {
        double s = 0.0;
        for (int slot = 0; slot < m_; ++slot) {
            const int j = basic_[slot];
            s += std::max(0.0, infeas_below(j)) + std::max(0.0, infeas_above(j));
        }
        return s;
    }

    double phase1_exit_tol() const { return cfg_.feasibility_tol * (1.0 + m_); }

    double objective_value() const {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += cost_[j] * xval_[j];
        return s;
    }

    std::string infeasibility_witness() const {
        int worst = -1;
        double amount = 0.0;
        for (int slot = 0; slot < m_; ++slot) {
            const int j = basic_[slot];
            const double v = std::max(infeas_below(j), infeas_above(j));
            if (v > amount) {
                amount = v;
                worst = j;
            }
        }
        std::ostringstream os;
        os << "infeasible: ";
        if (worst >= n_)
            os << "row " << (lp_.rows[worst - n_].name.empty()
                                 ? std::to_string(worst - n_)
                                 : lp_.rows[worst - n_].name);
        else
            os << "variable " << worst;
        os << " violated by " << format_double(amount);
        return os.str();
    }

    /// Phase-1 cost of a basic variable under the current point.
    double phase1_cost(int j) const {
        if (infeas_below(j) > cfg_.feasibility_tol) return -1.0;
        if (infeas_above(j) > cfg_.feasibility_tol) return +1.0;
        return 0.0;
    }

    Outcome run_phase(bool phase1) {
        std::vector<double> y(m_);
        while (true) {
            if (pivots_ >= cfg_.max_pivots) return Outcome::IterLimit;
            if (pivots_since_refactor_ >= cfg_.refactor_interval) {
                refactorize();
                recompute_basics();
            }
            if (phase1 && total_infeasibility() <= phase1_exit_tol()) return Outcome::Done;

            // duals for the current (phase-dependent) cost vector
            for (int s = 0; s < m_; ++s)
                y[s] = phase1 ? phase1_cost(basic_[s]) : cost_[basic_[s]];
            btran_inplace(y);

            const int q = price(phase1, y);
            if (q < 0) {
                // confirm on a fresh factorization to rule out drift
                if (pivots_since_refactor_ == 0) return Outcome::Done;
                refactorize();
                recompute_basics();
                continue;
            }
            const double dq = (phase1 ? 0.0 : cost_[q]) - col_dot_y(q, y);
            const double dir = entering_direction(q, dq);

            column_into_work(q);
            ftran_inplace(work_);
            alpha_ = work_;

            const Outcome step = ratio_step(phase1, q, dir);
            if (step != Outcome::Done) return step;
        }
    }

    /// Returns the entering column, or -1 at phase optimality.
    int price(bool phase1, const std::vector<double>& y) {
        const double tol = cfg_.optimality_tol;
        int best = -1;
        double best_score = tol;
        for (int j = 0; j < total_; ++j) {
            if (state_[j] == VState::Basic) continue;
            if (lo_[j] == up_[j]) continue;  // fixed
            const double cj = phase1 ? 0.0 : cost_[j];
            const double dj = cj - col_dot_y(j, y);
            double score = 0.0;
            if (state_[j] == VState::AtLower && dj < -tol) score = -dj;
            else if (state_[j] == VState::AtUpper && dj > tol) score = dj;
            else if (state_[j] == VState::FreeZero && std::fabs(dj) > tol) score = std::fabs(dj);
            if (score > 0.0) {
                if (bland_ && cfg_.anti_cycling) return j;  // lowest index eligible
                if (score > best_score) {
                    best_score = score;
                    best = j;
                }
            }
        }
        return best;
    }

    static double entering_direction(int, double dq) { return dq < 0.0 ? +1.0 : -1.0; }

    Outcome ratio_step(bool phase1, int q, double dir) {
        const double ftol = cfg_.feasibility_tol;
        double t_best = kInf;
        int leave_slot = -1;
        bool leave_at_upper = false;
        double best_alpha = 0.0;

        // entering variable's own opposite bound
        double t_flip = kInf;
        if (lo_[q] > -kInf && up_[q] < kInf) t_flip = up_[q] - lo_[q];

        for (int s = 0; s < m_; ++s) {
            const double a = alpha_[s];
            if (std::fabs(a) <= kAlphaTol) continue;
            const int j = basic_[s];
            const double rate = -dir * a;  // d x_Bs / dt
            double t = kInf;
            bool at_upper = false;
            if (phase1 && infeas_below(j) > ftol) {
                if (rate > 0.0) {  // rising toward its violated lower bound
                    t = (lo_[j] - xval_[j]) / rate;
                    at_upper = false;
                } else {
                    continue;  // moving away; slope already priced
                }
            } else if (phase1 && infeas_above(j) > ftol) {
                if (rate < 0.0) {
                    t = (up_[j] - xval_[j]) / rate;
                    at_upper = true;
                } else {
                    continue;
                }
            } else if (rate > 0.0) {
                if (up_[j] >= kInf) continue;
                t = (up_[j] - xval_[j]) / rate;
                at_upper = true;
            } else {
                if (lo_[j] <= -kInf) continue;
                t = (lo_[j] - xval_[j]) / rate;
                at_upper = false;
            }
            t = std::max(t, 0.0);
            bool better;
            if (leave_slot < 0 || t < t_best - 1e-12) {
                better = true;
            } else if (t <= t_best + 1e-12) {
                // tie: Bland mode takes the lowest variable index (cycling
                // guarantee); otherwise prefer the more stable pivot
                better = bland_ ? basic_[s] < basic_[leave_slot]
                                : std::fabs(a) > std::fabs(best_alpha) + 1e-12;
            } else {
                better = false;
            }
            if (better) {
                t_best = t;
                leave_slot = s;
                leave_at_upper = at_upper;
                best_alpha = a;
            }
        }

        if (t_flip < t_best) {
            // bound flip, no basis change
            apply_move(q, dir, t_flip);
            xval_[q] = state_[q] == VState::AtLower ? up_[q] : lo_[q];
            state_[q] = state_[q] == VState::AtLower ? VState::AtUpper : VState::AtLower;
            ++pivots_;
            note_degeneracy(t_flip);
            return Outcome::Done;
        }

        if (leave_slot < 0) {
            if (phase1) {
                // cannot happen for a correctly priced phase-1 direction;
                // treat as numerical trouble
                refactorize();
                recompute_basics();
                ++pivots_;
                return Outcome::Done;
            }
            build_ray(q, dir);
            return Outcome::Unbounded;
        }

        if (std::fabs(best_alpha) < 1e-7 && pivots_since_refactor_ > 0) {
            // unstable pivot; rebuild and retry this iteration
            refactorize();
            recompute_basics();
            return Outcome::Done;
        }

        // pivot
        const int leaving = basic_[leave_slot];
        apply_move(q, dir, t_best);
        xval_[q] = xval_[q] + dir * t_best;
        state_[leaving] = leave_at_upper ? VState::AtUpper : VState::AtLower;
        xval_[leaving] = leave_at_upper ? up_[leaving] : lo_[leaving];
        slot_of_[leaving] = -1;
        basic_[leave_slot] = q;
        slot_of_[q] = leave_slot;
        state_[q] = VState::Basic;

        Eta e;
        e.pslot = leave_slot;
        e.pval = alpha_[leave_slot];
        for (int s = 0; s < m_; ++s)
            if (s != leave_slot && std::fabs(alpha_[s]) > 1e-13) e.others.push_back({s, alpha_[s]});
        etas_.push_back(std::move(e));

        ++pivots_;
        ++pivots_since_refactor_;
        note_degeneracy(t_best);
        return Outcome::Done;
    }

    void apply_move(int q, double dir, double t) {
        if (t == 0.0) return;
        for (int s = 0; s < m_; ++s)
            if (alpha_[s] != 0.0) xval_[basic_[s]] -= dir * t * alpha_[s];
        (void)q;
    }

    void note_degeneracy(double t) {
        if (t <= kDegenTol) {
            if (++degen_streak_ > cfg_.bland_stall_threshold && cfg_.anti_cycling && !bland_) {
                bland_ = true;
                if (cfg_.log) *cfg_.log << "anti-cycling: switching to Bland's rule\n";
            }
        } else {
            degen_streak_ = 0;
            bland_ = false;
        }
    }

    void build_ray(int q, double dir) {
        unbounded_ray_.assign(n_, 0.0);
        if (q < n_) unbounded_ray_[q] = dir;
        for (int s = 0; s < m_; ++s) {
            const int j = basic_[s];
            if (j < n_ && std::fabs(alpha_[s]) > kAlphaTol) unbounded_ray_[j] = -dir * alpha_[s];
        }
        std::ostringstream os;
        os << "unbounded: entering column " << q << " direction " << (dir > 0 ? "+" : "-");
        unbounded_note_ = os.str();
    }

    LpSolution finish(LpSolution& out, LpStatus status) {
        if (status == LpStatus::Optimal) {
            refactorize();
            recompute_basics();
        }
        out.status = status;
        out.x.assign(xval_.begin(), xval_.begin() + n_);
        out.objective_value = objective_value();
        out.active_trust_bounds = 0;
        for (int j = 0; j < n_; ++j) {
            if (lo_[j] > -kInf && up_[j] < kInf && lo_[j] < up_[j]) {
                if (std::fabs(xval_[j] - lo_[j]) <= cfg_.feasibility_tol ||
                    std::fabs(xval_[j] - up_[j]) <= cfg_.feasibility_tol)
                    ++out.active_trust_bounds;
            }
        }
        if (cfg_.log)
            *cfg_.log << "solve: " << lp_status_str(status) << ", " << pivots_ << " pivots\n";
        return out;
    }
};

inline LpSolution solve_lp(const LpProblem& lp, const SolverConfig& cfg = {}) {
    // empty or trivially contradictory rows are resolved up front
    bool any_empty = false;
    for (const auto& r : lp.rows) {
        bool empty = true;
        for (double v : r.vals)
            if (v != 0.0) empty = false;
        if (empty) {
            any_empty = true;
            const bool ok = (r.rel == Rel::LE && 0.0 <= r.rhs + 1e-12) ||
                            (r.rel == Rel::GE && 0.0 >= r.rhs - 1e-12) ||
                            (r.rel == Rel::EQ && std::fabs(r.rhs) <= 1e-12);
            if (!ok) {
                LpSolution s;
                s.status = LpStatus::Infeasible;
                s.note = "infeasible: empty row " + r.name + " with nonzero rhs";
                s.x.assign(lp.num_vars, 0.0);
                return s;
            }
        }
    }
    if (!any_empty) {
        SimplexSolver solver(lp, cfg);
        return solver.solve();
    }
    LpProblem reduced = lp;
    reduced.rows.erase(std::remove_if(reduced.rows.begin(), reduced.rows.end(),
                                      [](const LpRow& r) {
                                          for (double v : r.vals)
                                              if (v != 0.0) return false;
                                          return true;
                                      }),
                       reduced.rows.end());
    SimplexSolver solver(reduced, cfg);
    return solver.solve();
}

}  // namespace dcnet
