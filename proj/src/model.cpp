#include "drspp/model.hpp"

#include "drspp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace drspp {

int LinearProgram::add_variable(std::string name, double lower, double upper, double objective) {
    if (lower > upper) {
        throw InvalidArgument("variable " + name + " has lower bound above upper bound");
    }
    variables_.push_back(Variable{std::move(name), lower, upper, objective});
    return num_variables() - 1;
}

int LinearProgram::add_row(std::vector<Term> terms, RowSense sense, double rhs, std::string name) {
    for (const Term& t : terms) {
        if (t.var < 0 || t.var >= num_variables()) {
            throw InvalidArgument("row references undeclared variable");
        }
        if (!std::isfinite(t.coef)) {
            throw InvalidArgument("row coefficient is not finite");
        }
    }
    if (!std::isfinite(rhs)) {
        throw InvalidArgument("row right-hand side is not finite");
    }
    if (name.empty()) {
        name = "r" + std::to_string(rows_.size());
    }
    rows_.push_back(LinearRow{std::move(terms), sense, rhs, std::move(name)});
    return num_rows() - 1;
}

double LinearProgram::activity(int i, const std::vector<double>& x) const {
    double s = 0.0;
    for (const Term& t : rows_.at(i).terms) {
        s += t.coef * x.at(t.var);
    }
    return s;
}

double LinearProgram::objective_value(const std::vector<double>& x) const {
    double s = 0.0;
    for (int j = 0; j < num_variables(); ++j) {
        s += variables_[j].objective * x.at(j);
    }
    return s;
}

double LinearProgram::max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (int j = 0; j < num_variables(); ++j) {
        worst = std::max({worst, variables_[j].lower - x[j], x[j] - variables_[j].upper});
    }
    for (int i = 0; i < num_rows(); ++i) {
        const double a = activity(i, x);
        const double b = rows_[i].rhs;
        switch (rows_[i].sense) {
        case RowSense::LessEqual:
            worst = std::max(worst, a - b);
            break;
        case RowSense::GreaterEqual:
            worst = std::max(worst, b - a);
            break;
        case RowSense::Equal:
            worst = std::max(worst, std::abs(a - b));
            break;
        }
    }
    return worst;
}

int MixedIntegerProgram::register_variable(const std::string& name, int index, bool integer) {
    if (!registry_.emplace(name, index).second) {
        throw InvalidArgument("duplicate model symbol " + name);
    }
    integer_.push_back(integer);
    return index;
}

int MixedIntegerProgram::add_continuous(const std::string& name, double lower, double upper,
                                        double objective) {
    return register_variable(name, lp.add_variable(name, lower, upper, objective), false);
}

int MixedIntegerProgram::add_binary(const std::string& name, double objective) {
    return register_variable(name, lp.add_variable(name, 0.0, 1.0, objective), true);
}

int MixedIntegerProgram::add_integer(const std::string& name, double lower, double upper,
                                     double objective) {
    return register_variable(name, lp.add_variable(name, lower, upper, objective), true);
}

int MixedIntegerProgram::num_integer() const {
    return static_cast<int>(std::count(integer_.begin(), integer_.end(), true));
}

int MixedIntegerProgram::find(const std::string& name) const {
    const auto it = registry_.find(name);
    return it == registry_.end() ? -1 : it->second;
}

int MixedIntegerProgram::at(const std::string& name) const {
    const int j = find(name);
    if (j < 0) {
        throw InvalidArgument("unknown model symbol " + name);
    }
    return j;
}

namespace {

void write_expression(std::ostream& out, const LinearProgram& lp, const std::vector<Term>& terms) {
    if (terms.empty()) {
        out << " 0 " << lp.variable(0).name;
        return;
    }
    for (const Term& t : terms) {
        out << (t.coef < 0 ? " - " : " + ") << std::abs(t.coef) << ' ' << lp.variable(t.var).name;
    }
}

} // namespace

void write_lp_format(std::ostream& out, const LinearProgram& lp, const std::vector<bool>& integer) {
    out.precision(17);
    out << (lp.sense == ObjectiveSense::Minimize ? "Minimize" : "Maximize") << "\n obj:";
    std::vector<Term> obj;
    for (int j = 0; j < lp.num_variables(); ++j) {
        if (lp.variable(j).objective != 0.0) {
            obj.push_back({j, lp.variable(j).objective});
        }
    }
    if (lp.num_variables() > 0) {
        write_expression(out, lp, obj);
    }
    out << "\nSubject To\n";
    for (const LinearRow& row : lp.rows()) {
        if (row.terms.empty()) {
            continue;
        }
        out << ' ' << row.name << ':';
        write_expression(out, lp, row.terms);
        switch (row.sense) {
        case RowSense::LessEqual:
            out << " <= ";
            break;
        case RowSense::GreaterEqual:
            out << " >= ";
            break;
        case RowSense::Equal:
            out << " = ";
            break;
        }
        out << row.rhs << '\n';
    }
    out << "Bounds\n";
    for (const Variable& v : lp.variables()) {
        if (v.lower == -kInf && v.upper == kInf) {
            out << ' ' << v.name << " free\n";
        } else if (v.lower == -kInf) {
            out << " -inf <= " << v.name << " <= " << v.upper << '\n';
        } else if (v.upper == kInf) {
            out << ' ' << v.name << " >= " << v.lower << '\n';
        } else {
            out << ' ' << v.lower << " <= " << v.name << " <= " << v.upper << '\n';
        }
    }
    bool any = false;
    for (std::size_t j = 0; j < integer.size(); ++j) {
        if (integer[j]) {
            if (!any) {
                out << "General\n";
                any = true;
            }
            out << ' ' << lp.variable(static_cast<int>(j)).name << '\n';
        }
    }
    out << "End\n";
}

void write_lp_format(std::ostream& out, const MixedIntegerProgram& mip) {
    write_lp_format(out, mip.lp, mip.integer_flags());
}

} // namespace drspp
