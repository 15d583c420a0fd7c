#pragma once

#include "drspp/model.hpp"
#include "drspp/solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <memory>
#include <vector>

namespace drspp::detail {

enum class VarStatus : unsigned char { Basic, AtLower, AtUpper, Free };

/// Basis snapshot over structural columns followed by one logical column per row.
struct Basis {
    std::vector<int> head;
    std::vector<VarStatus> status;
};

struct EngineResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    /// Objective, duals and reduced costs in minimization form.
    double objective = 0.0;
    std::vector<double> pi;
    std::vector<double> reduced;
    long iterations = 0;
};

/// Bounded primal simplex on [A | -I] (x, r) = 0 with bounds on x and on the row activities r.
/// The basis is factorized with a sparse LU and updated in product form between refactorizations.
class SimplexEngine {
  public:
    SimplexEngine(const LinearProgram& lp, const SolverOptions& options);

    /// Solves with the given structural bounds. `warm` may be null. When `final_basis` is non-null
    /// it receives the terminal basis.
    EngineResult solve(const std::vector<double>& lower, const std::vector<double>& upper,
                       const Basis* warm, Basis* final_basis);

    [[nodiscard]] int num_structural() const { return n_; }
    [[nodiscard]] int num_rows() const { return m_; }
    /// Minimization-form cost of structural j.
    [[nodiscard]] double cost(int j) const { return cost_[j]; }

  private:
    struct Eta {
        int row = 0;
        double pivot = 1.0;
        std::vector<int> index;
        std::vector<double> value;
    };

    using Factor = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;

    void cold_basis();
    bool load_basis(const Basis& warm);
    bool refactor();
    void recompute_basics();
    /// Solves with the factorized basis only: rows in, basis positions out (and the transpose).
    void base_solve(const std::vector<double>& rhs, std::vector<double>& out) const;
    void base_solve_transpose(const std::vector<double>& rhs, std::vector<double>& out) const;
    void ftran(int col, std::vector<double>& out) const;
    void btran(std::vector<double>& v) const;
    [[nodiscard]] double dot_column(int col, const std::vector<double>& v) const;
    void place_nonbasic(int col);
    enum class DualExit { PrimalFeasible, Infeasible, Abandoned };
    /// Dual simplex from a dual feasible basis; flips boxed nonbasics to restore dual feasibility.
    DualExit dual_phase(long& iter, long budget);

    int n_ = 0;
    int m_ = 0;
    SolverOptions opt_;
    std::vector<double> cost_;
    std::vector<int> col_start_;
    std::vector<int> col_row_;
    std::vector<double> col_val_;
    std::vector<double> row_lower_;
    std::vector<double> row_upper_;
    bool trivially_infeasible_ = false;

    // Working state of one solve.
    std::vector<double> lo_;
    std::vector<double> up_;
    std::vector<double> x_;
    std::vector<VarStatus> status_;
    std::vector<int> head_;
    std::vector<int> position_;
    std::vector<Eta> etas_;
    // Basic slacks are unit columns, so only the kernel of basic structurals against rows whose
    // slack is nonbasic gets an LU factorization.
    std::unique_ptr<Factor> lu_;
    // Snapshot of the factorized basis: kernel basis positions and their columns, kernel rows,
    // row -> kernel index, and row -> position of its basic slack.
    std::vector<int> kernel_cols_;
    std::vector<int> kernel_col_ids_;
    std::vector<int> kernel_rows_;
    std::vector<int> kernel_index_;
    std::vector<int> slack_position_;
};

} // namespace drspp::detail
