#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace clayems::ems {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// min c'z  s.t.  A z = b,  lower <= z <= upper.  A is stored row-wise as
// sparse triplets; bounds may be infinite.
class LinearProgram {
  public:
    struct Entry {
        std::size_t col;
        double value;
    };

    std::size_t add_variable(std::string name, double lower, double upper, double cost = 0.0);
    // Adds a row sum(coef * z) = rhs; entries with the same column are summed.
    std::size_t add_equality(std::string name, const std::vector<Entry>& row, double rhs);
    // lo <= sum(coef * z) <= hi, written as an equality with a bounded slack.
    std::size_t add_range(std::string name, const std::vector<Entry>& row, double lo, double hi);

    std::size_t num_variables() const noexcept { return cost_.size(); }
    std::size_t num_rows() const noexcept { return rows_.size(); }

    const std::vector<double>& cost() const noexcept { return cost_; }
    std::vector<double>& cost() noexcept { return cost_; }
    const std::vector<double>& lower() const noexcept { return lower_; }
    const std::vector<double>& upper() const noexcept { return upper_; }
    std::vector<double>& lower() noexcept { return lower_; }
    std::vector<double>& upper() noexcept { return upper_; }
    const std::vector<double>& rhs() const noexcept { return rhs_; }
    const std::vector<std::vector<Entry>>& rows() const noexcept { return rows_; }
    const std::vector<std::string>& variable_names() const noexcept { return names_; }
    const std::vector<std::string>& row_names() const noexcept { return row_names_; }

    std::size_t index_of(const std::string& name) const;  // throws StructuralError

    // Throws StructuralError on inconsistent dimensions, crossed bounds or
    // non-finite data.
    void validate() const;

    double objective(const std::vector<double>& z) const;
    // Largest |A z - b| and largest bound violation.
    double primal_infeasibility(const std::vector<double>& z) const;

  private:
    std::vector<double> cost_, lower_, upper_, rhs_;
    std::vector<std::vector<Entry>> rows_;
    std::vector<std::string> names_, row_names_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus s) noexcept;

struct LpOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    int max_iterations = 100000;
    int refactor_interval = 64;
    int degenerate_before_bland = 50;  // consecutive degenerate pivots before Bland's rule
};

struct LpResult {
    LpStatus status = LpStatus::IterationLimit;
    std::vector<double> z;
    double objective = 0.0;
    std::vector<double> duals;          // row multipliers y, c_B' B^-1
    std::vector<double> reduced_costs;  // c - A'y
    int iterations = 0;
    int bland_iterations = 0;
    // Infeasible: optimum of the phase-1 problem (sum of artificials, > 0)
    // and its row multipliers.
    double infeasibility = 0.0;
    std::vector<double> farkas;
    // Unbounded: a feasible point `z` and a direction with c'ray < 0 along
    // which A ray = 0 and the bounds stay satisfied.
    std::vector<double> ray;
};

// Bounded-variable revised simplex with a phase 1 on artificial variables,
// Dantzig pricing and Bland's rule after repeated degenerate pivots.
LpResult solve_lp(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace clayems::ems
