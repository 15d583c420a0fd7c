#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace drspp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { LessEqual, GreaterEqual, Equal };
enum class ObjectiveSense { Minimize, Maximize };

struct Term {
    int var = 0;
    double coef = 0.0;
};

struct LinearRow {
    std::vector<Term> terms;
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
    std::string name;
};

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    double objective = 0.0;
};

/// Generic LP container: bounded variables, linear rows, one objective.
class LinearProgram {
  public:
    ObjectiveSense sense = ObjectiveSense::Minimize;

    int add_variable(std::string name, double lower, double upper, double objective = 0.0);
    int add_row(std::vector<Term> terms, RowSense sense, double rhs, std::string name = {});
    void set_objective(int var, double coef) { variables_.at(var).objective = coef; }

    [[nodiscard]] int num_variables() const { return static_cast<int>(variables_.size()); }
    [[nodiscard]] int num_rows() const { return static_cast<int>(rows_.size()); }
    [[nodiscard]] const std::vector<Variable>& variables() const { return variables_; }
    [[nodiscard]] const std::vector<LinearRow>& rows() const { return rows_; }
    [[nodiscard]] const Variable& variable(int j) const { return variables_.at(j); }
    [[nodiscard]] const LinearRow& row(int i) const { return rows_.at(i); }
    Variable& variable(int j) { return variables_.at(j); }

    /// Activity of row i at point x.
    [[nodiscard]] double activity(int i, const std::vector<double>& x) const;
    [[nodiscard]] double objective_value(const std::vector<double>& x) const;
    /// Largest bound or row violation of x.
    [[nodiscard]] double max_violation(const std::vector<double>& x) const;

  private:
    std::vector<Variable> variables_;
    std::vector<LinearRow> rows_;
};

/// LP plus integrality flags and a name registry for model symbols.
class MixedIntegerProgram {
  public:
    LinearProgram lp;

    int add_continuous(const std::string& name, double lower, double upper, double objective = 0.0);
    int add_binary(const std::string& name, double objective = 0.0);
    int add_integer(const std::string& name, double lower, double upper, double objective = 0.0);

    [[nodiscard]] bool is_integer(int j) const { return integer_.at(j); }
    [[nodiscard]] const std::vector<bool>& integer_flags() const { return integer_; }
    [[nodiscard]] int num_integer() const;
    /// Index of a registered symbol, or -1.
    [[nodiscard]] int find(const std::string& name) const;
    [[nodiscard]] int at(const std::string& name) const;

  private:
    int register_variable(const std::string& name, int index, bool integer);

    std::vector<bool> integer_;
    std::unordered_map<std::string, int> registry_;
};

/// Writes the model in CPLEX-style LP text format.
void write_lp_format(std::ostream& out, const LinearProgram& lp, const std::vector<bool>& integer = {});
void write_lp_format(std::ostream& out, const MixedIntegerProgram& mip);

} // namespace drspp
