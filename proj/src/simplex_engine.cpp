#include "simplex_engine.hpp"

#include "drspp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

namespace drspp::detail {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-13;
constexpr double kStallTol = 1e-9;
constexpr double kBlandPivotTol = 1e-7;
// Stalled solves widen every finite bound by kPerturb * (1 + |bound|) * (1 + u), u in [0, 1).
constexpr double kPerturb = 1e-6;
constexpr long kPerturbTrigger = 50;
// Cost shift magnitude for the dual phase.
constexpr double kDualPerturb = 1e-6;
constexpr double kShiftLimit = 1e-5;

double unit_hash(std::uint64_t k) {
    k += 0x9e3779b97f4a7c15ULL;
    k = (k ^ (k >> 30)) * 0xbf58476d1ce4e5b9ULL;
    k = (k ^ (k >> 27)) * 0x94d049bb133111ebULL;
    k ^= k >> 31;
    return static_cast<double>(k >> 11) * 0x1.0p-53;
}

} // namespace

SimplexEngine::SimplexEngine(const LinearProgram& lp, const SolverOptions& options)
    : n_(lp.num_variables()), m_(lp.num_rows()), opt_(options) {
    const double flip = lp.sense == ObjectiveSense::Maximize ? -1.0 : 1.0;
    cost_.resize(n_);
    for (int j = 0; j < n_; ++j) {
        cost_[j] = flip * lp.variable(j).objective;
    }

    std::vector<int> count(n_ + 1, 0);
    for (const LinearRow& row : lp.rows()) {
        for (const Term& t : row.terms) {
            ++count[t.var + 1];
        }
    }
    for (int j = 0; j < n_; ++j) {
        count[j + 1] += count[j];
    }
    col_start_ = count;
    col_row_.resize(col_start_[n_]);
    col_val_.resize(col_start_[n_]);
    std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
    row_lower_.resize(m_);
    row_upper_.resize(m_);
    for (int i = 0; i < m_; ++i) {
        const LinearRow& row = lp.row(i);
        for (const Term& t : row.terms) {
            col_row_[fill[t.var]] = i;
            col_val_[fill[t.var]] = t.coef;
            ++fill[t.var];
        }
        row_lower_[i] = row.sense == RowSense::LessEqual ? -kInf : row.rhs;
        row_upper_[i] = row.sense == RowSense::GreaterEqual ? kInf : row.rhs;
        if (row.terms.empty() &&
            (row_lower_[i] > opt_.feasibility_tol || row_upper_[i] < -opt_.feasibility_tol)) {
            trivially_infeasible_ = true;
        }
    }
}

void SimplexEngine::place_nonbasic(int col) {
    if (lo_[col] == -kInf && up_[col] == kInf) {
        status_[col] = VarStatus::Free;
        x_[col] = 0.0;
    } else if (lo_[col] == -kInf) {
        status_[col] = VarStatus::AtUpper;
        x_[col] = up_[col];
    } else if (status_[col] == VarStatus::AtUpper && up_[col] != kInf) {
        x_[col] = up_[col];
    } else {
        status_[col] = VarStatus::AtLower;
        x_[col] = lo_[col];
    }
}

void SimplexEngine::cold_basis() {
    std::fill(position_.begin(), position_.end(), -1);
    for (int j = 0; j < n_; ++j) {
        status_[j] = VarStatus::AtLower;
        place_nonbasic(j);
    }
    for (int i = 0; i < m_; ++i) {
        head_[i] = n_ + i;
        position_[n_ + i] = i;
        status_[n_ + i] = VarStatus::Basic;
    }
}

bool SimplexEngine::load_basis(const Basis& warm) {
    if (static_cast<int>(warm.head.size()) != m_ || static_cast<int>(warm.status.size()) != n_ + m_) {
        return false;
    }
    std::fill(position_.begin(), position_.end(), -1);
    for (int i = 0; i < m_; ++i) {
        const int col = warm.head[i];
        if (col < 0 || col >= n_ + m_ || position_[col] >= 0) {
            return false;
        }
        head_[i] = col;
        position_[col] = i;
    }
    for (int j = 0; j < n_ + m_; ++j) {
        if (position_[j] >= 0) {
            status_[j] = VarStatus::Basic;
        } else {
            status_[j] = warm.status[j] == VarStatus::Basic ? VarStatus::AtLower : warm.status[j];
            place_nonbasic(j);
        }
    }
    return true;
}

bool SimplexEngine::refactor() {
    etas_.clear();
    kernel_cols_.clear();
    kernel_col_ids_.clear();
    kernel_rows_.clear();
    kernel_index_.assign(m_, -1);
    slack_position_.assign(m_, -1);
    for (int i = 0; i < m_; ++i) {
        slack_position_[i] = position_[n_ + i];
        if (position_[n_ + i] < 0) {
            kernel_index_[i] = static_cast<int>(kernel_rows_.size());
            kernel_rows_.push_back(i);
        }
    }
    for (int k = 0; k < m_; ++k) {
        if (head_[k] < n_) {
            kernel_cols_.push_back(k);
            kernel_col_ids_.push_back(head_[k]);
        }
    }
    const int size = static_cast<int>(kernel_cols_.size());
    if (size != static_cast<int>(kernel_rows_.size())) {
        return false;
    }
    if (size == 0) {
        lu_.reset();
        return true;
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(size) * 4);
    for (int c = 0; c < size; ++c) {
        const int col = kernel_col_ids_[c];
        for (int p = col_start_[col]; p < col_start_[col + 1]; ++p) {
            const int t = kernel_index_[col_row_[p]];
            if (t >= 0) {
                triplets.emplace_back(t, c, col_val_[p]);
            }
        }
    }
    Eigen::SparseMatrix<double> kernel(size, size);
    kernel.setFromTriplets(triplets.begin(), triplets.end());
    kernel.makeCompressed();
    lu_ = std::make_unique<Factor>();
    lu_->analyzePattern(kernel);
    lu_->factorize(kernel);
    if (lu_->info() != Eigen::Success) {
        return false;
    }
    // SparseLU reports rank-deficient matrices through tiny pivots rather than failure.
    const double logdet = lu_->logAbsDeterminant();
    return std::isfinite(logdet);
}

void SimplexEngine::base_solve(const std::vector<double>& rhs, std::vector<double>& out) const {
    out.assign(m_, 0.0);
    const int size = static_cast<int>(kernel_cols_.size());
    std::vector<double> activity(m_, 0.0);
    if (size > 0) {
        Eigen::VectorXd b(size);
        for (int t = 0; t < size; ++t) {
            b[t] = rhs[kernel_rows_[t]];
        }
        const Eigen::VectorXd xs = lu_->solve(b);
        for (int c = 0; c < size; ++c) {
            out[kernel_cols_[c]] = xs[c];
            if (xs[c] == 0.0) {
                continue;
            }
            const int col = kernel_col_ids_[c];
            for (int p = col_start_[col]; p < col_start_[col + 1]; ++p) {
                activity[col_row_[p]] += col_val_[p] * xs[c];
            }
        }
    }
    for (int i = 0; i < m_; ++i) {
        const int k = slack_position_[i];
        if (k >= 0) {
            out[k] = activity[i] - rhs[i];
        }
    }
}

void SimplexEngine::base_solve_transpose(const std::vector<double>& rhs, std::vector<double>& out) const {
    out.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
        const int k = slack_position_[i];
        if (k >= 0) {
            out[i] = -rhs[k];
        }
    }
    const int size = static_cast<int>(kernel_cols_.size());
    if (size == 0) {
        return;
    }
    Eigen::VectorXd b(size);
    for (int c = 0; c < size; ++c) {
        const int col = kernel_col_ids_[c];
        double v = rhs[kernel_cols_[c]];
        for (int p = col_start_[col]; p < col_start_[col + 1]; ++p) {
            if (kernel_index_[col_row_[p]] < 0) {
                v -= col_val_[p] * out[col_row_[p]];
            }
        }
        b[c] = v;
    }
    const Eigen::VectorXd y = lu_->transpose().solve(b);
    for (int t = 0; t < size; ++t) {
        out[kernel_rows_[t]] = y[t];
    }
}

void SimplexEngine::ftran(int col, std::vector<double>& out) const {
    std::vector<double> rhs(m_, 0.0);
    if (col >= n_) {
        rhs[col - n_] = -1.0;
    } else {
        for (int p = col_start_[col]; p < col_start_[col + 1]; ++p) {
            rhs[col_row_[p]] = col_val_[p];
        }
    }
    base_solve(rhs, out);
    for (const Eta& e : etas_) {
        const double vr = out[e.row] / e.pivot;
        out[e.row] = vr;
        if (vr != 0.0) {
            for (std::size_t k = 0; k < e.index.size(); ++k) {
                out[e.index[k]] -= e.value[k] * vr;
            }
        }
    }
}

void SimplexEngine::btran(std::vector<double>& v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        double s = v[it->row];
        for (std::size_t k = 0; k < it->index.size(); ++k) {
            s -= it->value[k] * v[it->index[k]];
        }
        v[it->row] = s / it->pivot;
    }
    std::vector<double> y;
    base_solve_transpose(v, y);
    v.swap(y);
}

double SimplexEngine::dot_column(int col, const std::vector<double>& v) const {
    if (col >= n_) {
        return -v[col - n_];
    }
    double s = 0.0;
    for (int p = col_start_[col]; p < col_start_[col + 1]; ++p) {
        s += col_val_[p] * v[col_row_[p]];
    }
    return s;
}

void SimplexEngine::recompute_basics() {
    if (m_ == 0) {
        return;
    }
    std::vector<double> rhs(m_, 0.0);
    for (int j = 0; j < n_ + m_; ++j) {
        if (status_[j] == VarStatus::Basic || x_[j] == 0.0) {
            continue;
        }
        if (j >= n_) {
            rhs[j - n_] += x_[j];
        } else {
            for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
                rhs[col_row_[p]] -= col_val_[p] * x_[j];
            }
        }
    }
    std::vector<double> sol;
    base_solve(rhs, sol);
    for (int k = 0; k < m_; ++k) {
        x_[head_[k]] = sol[k];
    }
}

SimplexEngine::DualExit SimplexEngine::dual_phase(long& iter, long budget) {
    const int total = n_ + m_;
    const double ftol = opt_.feasibility_tol;
    const double dtol = opt_.optimality_tol;
    std::vector<double> pi(m_);
    std::vector<double> rho(m_);
    std::vector<double> alpha(m_);
    std::vector<double> d(total, 0.0);
    std::vector<double> row(total, 0.0);

    // Costs are perturbed for the dual phase only: the objective usually touches few columns and
    // the resulting dual degeneracy stalls the ratio test. Primal iterations on the true costs
    // clean up afterwards.
    std::vector<double> c(total, 0.0);
    for (int j = 0; j < total; ++j) {
        const double base = j < n_ ? cost_[j] : 0.0;
        double shift = kDualPerturb * (1.0 + std::abs(base)) * (0.5 + unit_hash(static_cast<std::uint64_t>(j) + 0x5bd1e995ULL));
        if (status_[j] == VarStatus::AtUpper) {
            shift = -shift;
        }
        const bool keep = status_[j] == VarStatus::Basic || status_[j] == VarStatus::Free || lo_[j] == up_[j];
        c[j] = keep ? base : base + shift;
    }
    auto price = [&] {
        for (int k = 0; k < m_; ++k) {
            pi[k] = c[head_[k]];
        }
        btran(pi);
        for (int j = 0; j < total; ++j) {
            d[j] = status_[j] == VarStatus::Basic ? 0.0 : c[j] - dot_column(j, pi);
        }
    };

    price();
    bool flipped = false;
    for (int j = 0; j < total; ++j) {
        if (status_[j] == VarStatus::Basic || lo_[j] == up_[j]) {
            continue;
        }
        const bool wants_up = d[j] < -dtol;
        const bool wants_down = d[j] > dtol;
        if (status_[j] == VarStatus::Free) {
            if (wants_up || wants_down) {
                return DualExit::Abandoned;
            }
        } else if (status_[j] == VarStatus::AtLower && wants_up) {
            if (up_[j] == kInf) {
                return DualExit::Abandoned;
            }
            status_[j] = VarStatus::AtUpper;
            x_[j] = up_[j];
            flipped = true;
        } else if (status_[j] == VarStatus::AtUpper && wants_down) {
            if (lo_[j] == -kInf) {
                return DualExit::Abandoned;
            }
            status_[j] = VarStatus::AtLower;
            x_[j] = lo_[j];
            flipped = true;
        }
    }
    if (flipped) {
        recompute_basics();
    }

    // Dual pivots are cheap but may stall on dual degenerate bases; hand over to primal then.
    const long dual_budget = 5L * m_ + 1000;
    for (long it = 0;; ++it) {
        int r = -1;
        double worst = ftol;
        for (int k = 0; k < m_; ++k) {
            const int col = head_[k];
            const double v = std::max(lo_[col] - x_[col], x_[col] - up_[col]);
            if (v > worst) {
                worst = v;
                r = k;
            }
        }
        if (r < 0) {
            return DualExit::PrimalFeasible;
        }
        if (it >= dual_budget || iter >= budget) {
            return DualExit::Abandoned;
        }
        ++iter;
        const int out = head_[r];
        const bool raise = x_[out] < lo_[out];
        const double target = raise ? lo_[out] : up_[out];
        const double s = raise ? 1.0 : -1.0;
        std::fill(rho.begin(), rho.end(), 0.0);
        rho[r] = 1.0;
        btran(rho);

        // Harris two-pass dual ratio test over nonbasics that move x_out toward its bound.
        std::vector<std::pair<int, double>> eligible;
        double t_max = kInf;
        std::fill(row.begin(), row.end(), 0.0);
        for (int j = 0; j < total; ++j) {
            if (status_[j] == VarStatus::Basic || lo_[j] == up_[j]) {
                continue;
            }
            const double a = dot_column(j, rho);
            row[j] = a;
            if (std::abs(a) < kPivotTol) {
                continue;
            }
            const double sa = s * a;
            const bool ok = status_[j] == VarStatus::Free || (status_[j] == VarStatus::AtLower && sa < 0) ||
                            (status_[j] == VarStatus::AtUpper && sa > 0);
            if (!ok) {
                continue;
            }
            eligible.push_back({j, a});
            t_max = std::min(t_max, (std::abs(d[j]) + dtol) / std::abs(a));
        }
        if (eligible.empty()) {
            return DualExit::Infeasible;
        }
        int q = -1;
        double q_pivot = 0.0;
        for (const auto& [j, a] : eligible) {
            if (std::abs(d[j]) / std::abs(a) <= t_max && std::abs(a) > q_pivot) {
                q = j;
                q_pivot = std::abs(a);
            }
        }

        ftran(q, alpha);
        if (std::abs(alpha[r]) < kPivotTol) {
            return DualExit::Abandoned;
        }
        // Reduced costs follow the pivot row; the leaving column has row entry 1.
        const double theta_d = d[q] / row[q];
        for (int j = 0; j < total; ++j) {
            if (row[j] != 0.0) {
                d[j] -= theta_d * row[j];
            }
        }
        d[q] = 0.0;
        d[out] = -theta_d;
        const double delta = (x_[out] - target) / alpha[r];
        for (int k = 0; k < m_; ++k) {
            x_[head_[k]] -= delta * alpha[k];
        }
        x_[q] += delta;
        x_[out] = target;
        status_[out] = raise ? VarStatus::AtLower : VarStatus::AtUpper;
        position_[out] = -1;
        head_[r] = q;
        position_[q] = r;
        status_[q] = VarStatus::Basic;

        Eta eta;
        eta.row = r;
        eta.pivot = alpha[r];
        for (int k = 0; k < m_; ++k) {
            if (k != r && std::abs(alpha[k]) > kDropTol) {
                eta.index.push_back(k);
                eta.value.push_back(alpha[k]);
            }
        }
        etas_.push_back(std::move(eta));
        if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
            if (!refactor()) {
                return DualExit::Abandoned;
            }
            recompute_basics();
            price();
        }
    }
}

EngineResult SimplexEngine::solve(const std::vector<double>& lower, const std::vector<double>& upper,
                                  const Basis* warm, Basis* final_basis) {
    EngineResult result;
    const int total = n_ + m_;
    const double ftol = opt_.feasibility_tol;
    const double dtol = opt_.optimality_tol;

    lo_.assign(total, 0.0);
    up_.assign(total, 0.0);
    for (int j = 0; j < n_; ++j) {
        lo_[j] = lower[j];
        up_[j] = upper[j];
    }
    for (int i = 0; i < m_; ++i) {
        lo_[n_ + i] = row_lower_[i];
        up_[n_ + i] = row_upper_[i];
    }
    for (int j = 0; j < n_; ++j) {
        if (lo_[j] > up_[j] + ftol) {
            result.status = LpStatus::Infeasible;
            return result;
        }
    }
    if (trivially_infeasible_) {
        result.status = LpStatus::Infeasible;
        return result;
    }

    x_.assign(total, 0.0);
    status_.assign(total, VarStatus::AtLower);
    head_.assign(m_, -1);
    position_.assign(total, -1);

    bool ok = false;
    if (warm != nullptr && load_basis(*warm)) {
        ok = refactor();
    }
    if (!ok) {
        cold_basis();
        if (!refactor()) {
            throw NumericalFailure("slack basis could not be factorized");
        }
    }
    recompute_basics();

    const long budget = opt_.max_iterations > 0 ? opt_.max_iterations : 20L * total + 5000;
    long iter = 0;
    if (ok) {
        const DualExit exit = dual_phase(iter, budget);
        if (exit == DualExit::Infeasible) {
            result.status = LpStatus::Infeasible;
            result.iterations = iter;
            if (final_basis != nullptr) {
                final_basis->head = head_;
                final_basis->status = status_;
            }
            return result;
        }
        // recompute_basics reads the LU factors only, so the eta file must be folded in first.
        if (!refactor()) {
            cold_basis();
            if (!refactor()) {
                throw NumericalFailure("slack basis could not be factorized");
            }
        }
        recompute_basics();
    }
    const long bland_trigger = std::min(2L * total, 200L);
    long degenerate_run = 0;
    bool bland = false;
    bool fresh = true;
    int recoveries = 0;

    std::vector<double> pi(m_);
    std::vector<double> alpha(m_);
    std::vector<double> phase_cost(m_);

    // Refactorizes and recomputes basics; a singular basis restarts from the slack basis.
    auto refresh = [&] {
        if (!refactor()) {
            if (recoveries++ > 3) {
                throw NumericalFailure("basis became singular");
            }
            cold_basis();
            if (!refactor()) {
                throw NumericalFailure("slack basis could not be factorized");
            }
            degenerate_run = 0;
            bland = false;
        }
        recompute_basics();
    };

    // Bound perturbation against stalling; the original bounds come back before any status is final.
    bool perturbed = false;
    bool perturb_used = false;
    std::vector<double> lo_saved;
    std::vector<double> up_saved;
    auto replace_nonbasics = [&] {
        for (int j = 0; j < total; ++j) {
            if (status_[j] != VarStatus::Basic) {
                place_nonbasic(j);
            }
        }
        refresh();
        fresh = true;
        degenerate_run = 0;
        bland = false;
    };
    auto perturb = [&] {
        lo_saved = lo_;
        up_saved = up_;
        for (int j = 0; j < total; ++j) {
            const double u = 1.0 + unit_hash(static_cast<std::uint64_t>(j));
            if (lo_[j] != -kInf) {
                lo_[j] -= kPerturb * (1.0 + std::abs(lo_[j])) * u;
            }
            if (up_[j] != kInf) {
                up_[j] += kPerturb * (1.0 + std::abs(up_[j])) * u;
            }
        }
        perturbed = true;
        perturb_used = true;
        replace_nonbasics();
    };
    auto unperturb = [&] {
        lo_ = lo_saved;
        up_ = up_saved;
        perturbed = false;
        replace_nonbasics();
    };

    auto below = [&](int col) { return x_[col] < lo_[col] - ftol; };
    auto above = [&](int col) { return x_[col] > up_[col] + ftol; };

    for (;;) {
        bool phase1 = false;
        for (int k = 0; k < m_; ++k) {
            const int col = head_[k];
            if (perturbed) {
                // Drift past a perturbed bound is absorbed by shifting it; the original bounds
                // return before the solve ends.
                if (below(col) && lo_[col] - x_[col] <= kShiftLimit) {
                    lo_[col] = x_[col];
                } else if (above(col) && x_[col] - up_[col] <= kShiftLimit) {
                    up_[col] = x_[col];
                }
            }
            if (below(col)) {
                phase_cost[k] = -1.0;
                phase1 = true;
            } else if (above(col)) {
                phase_cost[k] = 1.0;
                phase1 = true;
            } else {
                phase_cost[k] = 0.0;
            }
        }
        if (!phase1) {
            for (int k = 0; k < m_; ++k) {
                phase_cost[k] = head_[k] < n_ ? cost_[head_[k]] : 0.0;
            }
        }
        pi = phase_cost;
        btran(pi);

        int entering = -1;
        int direction = 0;
        double best = 0.0;
        for (int j = 0; j < total; ++j) {
            const VarStatus st = status_[j];
            if (st == VarStatus::Basic || lo_[j] == up_[j]) {
                continue;
            }
            const double c = phase1 || j >= n_ ? 0.0 : cost_[j];
            const double d = c - dot_column(j, pi);
            int dir = 0;
            if (d < -dtol && (st == VarStatus::AtLower || st == VarStatus::Free)) {
                dir = 1;
            } else if (d > dtol && (st == VarStatus::AtUpper || st == VarStatus::Free)) {
                dir = -1;
            }
            if (dir == 0) {
                continue;
            }
            if (bland) {
                entering = j;
                direction = dir;
                best = std::abs(d);
                break;
            }
            if (std::abs(d) > best) {
                best = std::abs(d);
                entering = j;
                direction = dir;
            }
        }

        if (entering < 0) {
            if (!fresh) {
                refresh();
                fresh = true;
                continue;
            }
            if (perturbed) {
                unperturb();
                continue;
            }
            result.status = phase1 ? LpStatus::Infeasible : LpStatus::Optimal;
            break;
        }

        if (++iter > budget) {
            throw NumericalFailure("simplex iteration limit reached");
        }

        ftran(entering, alpha);

        // Ratio test: rate of change of basic k is -direction * alpha[k]. Returns the bound the
        // basic would hit, or nothing when it never blocks.
        auto blocking_target = [&](int k) -> std::optional<double> {
            if (std::abs(alpha[k]) < kPivotTol) {
                return std::nullopt;
            }
            const double rate = -direction * alpha[k];
            const int col = head_[k];
            double target;
            if (rate > 0) {
                if (above(col)) return std::nullopt;
                target = below(col) ? lo_[col] : up_[col];
                if (target == kInf) return std::nullopt;
            } else {
                if (below(col)) return std::nullopt;
                target = above(col) ? up_[col] : lo_[col];
                if (target == -kInf) return std::nullopt;
            }
            return target;
        };
        double theta_max = kInf;
        for (int k = 0; k < m_; ++k) {
            if (const auto target = blocking_target(k)) {
                const double rate = -direction * alpha[k];
                const double slack = rate > 0 ? ftol : -ftol;
                theta_max = std::min(theta_max, (*target + slack - x_[head_[k]]) / rate);
            }
        }
        int leave = -1;
        double leave_theta = kInf;
        double leave_target = 0.0;
        auto pick_leaving = [&](bool smallest_index) {
            double leave_pivot = 0.0;
            for (int k = 0; k < m_; ++k) {
                const auto target = blocking_target(k);
                if (!target) {
                    continue;
                }
                const double rate = -direction * alpha[k];
                const double t = std::max(0.0, (*target - x_[head_[k]]) / rate);
                if (t > theta_max) {
                    continue;
                }
                bool take;
                if (smallest_index) {
                    // Pivots too small to trust are left to the largest-pivot pass.
                    take = std::abs(alpha[k]) >= kBlandPivotTol && (leave < 0 || head_[k] < head_[leave]);
                } else {
                    take = std::abs(alpha[k]) > leave_pivot;
                }
                if (take) {
                    leave = k;
                    leave_theta = t;
                    leave_target = *target;
                    leave_pivot = std::abs(alpha[k]);
                }
            }
        };
        pick_leaving(bland);
        if (bland && leave < 0) {
            pick_leaving(false);
        }

        const double span = up_[entering] - lo_[entering];
        const bool bounded_entering = std::isfinite(span);
        if (leave < 0 && !bounded_entering) {
            if (phase1) {
                // Phase-one objective is bounded below; a missing block means numerical trouble.
                if (recoveries++ > 3) {
                    throw NumericalFailure("phase one ratio test failed");
                }
                refresh();
                fresh = true;
                continue;
            }
            if (perturbed) {
                unperturb();
                continue;
            }
            result.status = LpStatus::Unbounded;
            break;
        }

        double theta;
        if (bounded_entering && (leave < 0 || span <= leave_theta)) {
            theta = span;
            for (int k = 0; k < m_; ++k) {
                x_[head_[k]] -= theta * direction * alpha[k];
            }
            if (status_[entering] == VarStatus::AtLower) {
                status_[entering] = VarStatus::AtUpper;
                x_[entering] = up_[entering];
            } else {
                status_[entering] = VarStatus::AtLower;
                x_[entering] = lo_[entering];
            }
        } else {
            theta = leave_theta;
            for (int k = 0; k < m_; ++k) {
                x_[head_[k]] -= theta * direction * alpha[k];
            }
            x_[entering] += direction * theta;
            const int out = head_[leave];
            x_[out] = leave_target;
            status_[out] = leave_target == lo_[out] ? VarStatus::AtLower : VarStatus::AtUpper;
            position_[out] = -1;
            head_[leave] = entering;
            position_[entering] = leave;
            status_[entering] = VarStatus::Basic;

            Eta eta;
            eta.row = leave;
            eta.pivot = alpha[leave];
            for (int k = 0; k < m_; ++k) {
                if (k != leave && std::abs(alpha[k]) > kDropTol) {
                    eta.index.push_back(k);
                    eta.value.push_back(alpha[k]);
                }
            }
            etas_.push_back(std::move(eta));
            fresh = false;
            if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
                refresh();
                fresh = true;
            }
        }

        // Tiny steps within the Harris tolerance count as degenerate; judge by objective progress.
        if (theta * best <= kStallTol) {
            ++degenerate_run;
            if (!perturb_used && degenerate_run >= kPerturbTrigger) {
                perturb();
            } else if (degenerate_run >= bland_trigger) {
                bland = true;
            }
        } else {
            degenerate_run = 0;
            bland = false;
        }
    }

    result.iterations = iter;
    if (final_basis != nullptr) {
        final_basis->head = head_;
        final_basis->status = status_;
    }
    if (result.status != LpStatus::Optimal) {
        return result;
    }

    result.x.assign(x_.begin(), x_.begin() + n_);
    for (int j = 0; j < n_; ++j) {
        if (status_[j] != VarStatus::Basic) {
            continue;
        }
        // Clip basic values that sit within tolerance outside their bounds.
        result.x[j] = std::clamp(result.x[j], lo_[j], up_[j]);
    }
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) {
        obj += cost_[j] * result.x[j];
    }
    result.objective = obj;
    // pi holds B^{-T} c_B from the last pricing pass; logical reduced costs are the row duals.
    result.pi.resize(m_);
    for (int i = 0; i < m_; ++i) {
        result.pi[i] = pi[i];
    }
    result.reduced.resize(n_);
    for (int j = 0; j < n_; ++j) {
        result.reduced[j] = cost_[j] - dot_column(j, pi);
    }
    return result;
}

} // namespace drspp::detail
