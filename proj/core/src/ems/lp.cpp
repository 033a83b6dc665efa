#include "clayems/ems/lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "clayems/error.hpp"

namespace clayems::ems {

std::size_t LinearProgram::add_variable(std::string name, double lower, double upper, double cost) {
    names_.push_back(std::move(name));
    lower_.push_back(lower);
    upper_.push_back(upper);
    cost_.push_back(cost);
    return cost_.size() - 1;
}

std::size_t LinearProgram::add_equality(std::string name, const std::vector<Entry>& row, double rhs) {
    std::map<std::size_t, double> merged;
    for (const auto& e : row) {
        if (e.col >= num_variables()) {
            throw StructuralError("linear program: row '" + name + "' references an unknown column");
        }
        merged[e.col] += e.value;
    }
    std::vector<Entry> clean;
    for (const auto& [col, v] : merged) {
        if (v != 0.0) {
            clean.push_back({col, v});
        }
    }
    rows_.push_back(std::move(clean));
    rhs_.push_back(rhs);
    row_names_.push_back(std::move(name));
    return rows_.size() - 1;
}

std::size_t LinearProgram::add_range(std::string name, const std::vector<Entry>& row, double lo, double hi) {
    // sum(coef z) - s = 0 with lo <= s <= hi
    const std::size_t s = add_variable(name + ".slack", lo, hi);
    std::vector<Entry> r = row;
    r.push_back({s, -1.0});
    return add_equality(std::move(name), r, 0.0);
}

std::size_t LinearProgram::index_of(const std::string& name) const {
    for (std::size_t j = 0; j < names_.size(); ++j) {
        if (names_[j] == name) {
            return j;
        }
    }
    throw StructuralError("linear program: no variable named '" + name + "'");
}

void LinearProgram::validate() const {
    const std::size_t n = num_variables();
    if (lower_.size() != n || upper_.size() != n || names_.size() != n) {
        throw StructuralError("linear program: inconsistent variable arrays");
    }
    if (rhs_.size() != rows_.size() || row_names_.size() != rows_.size()) {
        throw StructuralError("linear program: inconsistent row arrays");
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(cost_[j]) || std::isnan(lower_[j]) || std::isnan(upper_[j])) {
            throw StructuralError("linear program: non-finite data for variable '" + names_[j] + "'");
        }
        if (lower_[j] > upper_[j] || lower_[j] == kInf || upper_[j] == -kInf) {
            throw StructuralError("linear program: crossed bounds on variable '" + names_[j] + "'");
        }
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (!std::isfinite(rhs_[i])) {
            throw StructuralError("linear program: non-finite right-hand side in row '" + row_names_[i] + "'");
        }
        for (const auto& e : rows_[i]) {
            if (e.col >= n || !std::isfinite(e.value)) {
                throw StructuralError("linear program: bad entry in row '" + row_names_[i] + "'");
            }
        }
    }
}

double LinearProgram::objective(const std::vector<double>& z) const {
    double v = 0.0;
    for (std::size_t j = 0; j < cost_.size(); ++j) {
        v += cost_[j] * z[j];
    }
    return v;
}

double LinearProgram::primal_infeasibility(const std::vector<double>& z) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        double s = -rhs_[i];
        for (const auto& e : rows_[i]) {
            s += e.value * z[e.col];
        }
        worst = std::max(worst, std::abs(s));
    }
    for (std::size_t j = 0; j < z.size(); ++j) {
        worst = std::max({worst, lower_[j] - z[j], z[j] - upper_[j]});
    }
    return worst;
}

const char* to_string(LpStatus s) noexcept {
    switch (s) {
        case LpStatus::Optimal:
            return "optimal";
        case LpStatus::Infeasible:
            return "infeasible";
        case LpStatus::Unbounded:
            return "unbounded";
        case LpStatus::IterationLimit:
            return "iteration_limit";
    }
    return "unknown";
}

namespace {

enum class VarState { Basic, AtLower, AtUpper, FreeZero };

struct Column {
    std::vector<std::size_t> rows;
    std::vector<double> values;
};

class Simplex {
  public:
    Simplex(const LinearProgram& lp, const LpOptions& opt) : lp_(lp), opt_(opt) {
        m_ = lp.num_rows();
        ns_ = lp.num_variables();
        n_ = ns_ + m_;
        cols_.resize(n_);
        for (std::size_t i = 0; i < m_; ++i) {
            for (const auto& e : lp.rows()[i]) {
                cols_[e.col].rows.push_back(i);
                cols_[e.col].values.push_back(e.value);
            }
        }
        lower_ = lp.lower();
        upper_ = lp.upper();
        lower_.resize(n_, 0.0);
        upper_.resize(n_, kInf);
        x_.assign(n_, 0.0);
        state_.assign(n_, VarState::AtLower);
        for (std::size_t j = 0; j < ns_; ++j) {
            if (std::isfinite(lower_[j])) {
                x_[j] = lower_[j];
                state_[j] = VarState::AtLower;
            } else if (std::isfinite(upper_[j])) {
                x_[j] = upper_[j];
                state_[j] = VarState::AtUpper;
            } else {
                x_[j] = 0.0;
                state_[j] = VarState::FreeZero;
            }
        }
        // Artificial i carries sign(r_i) e_i so that it starts at |r_i| >= 0.
        std::vector<double> r(lp.rhs());
        for (std::size_t j = 0; j < ns_; ++j) {
            for (std::size_t k = 0; k < cols_[j].rows.size(); ++k) {
                r[cols_[j].rows[k]] -= cols_[j].values[k] * x_[j];
            }
        }
        head_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t a = ns_ + i;
            cols_[a].rows = {i};
            cols_[a].values = {r[i] >= 0.0 ? 1.0 : -1.0};
            x_[a] = std::abs(r[i]);
            state_[a] = VarState::Basic;
            head_[i] = a;
        }
        refactor();
    }

    LpResult run() {
        LpResult res;
        std::vector<double> phase1(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            phase1[ns_ + i] = 1.0;
        }
        double bscale = 1.0;
        for (double v : lp_.rhs()) {
            bscale = std::max(bscale, std::abs(v));
        }
        LpStatus s = iterate(phase1, res);
        double infeas = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            infeas += x_[ns_ + i];
        }
        if (s == LpStatus::IterationLimit) {
            res.status = s;
            finish(res, lp_.cost());
            return res;
        }
        if (infeas > opt_.feasibility_tol * bscale) {
            res.status = LpStatus::Infeasible;
            res.infeasibility = infeas;
            res.farkas = duals(phase1);
            finish(res, lp_.cost());
            return res;
        }
        // Artificials are pinned at zero for phase 2.
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t a = ns_ + i;
            upper_[a] = 0.0;
            if (state_[a] != VarState::Basic) {
                x_[a] = 0.0;
                state_[a] = VarState::AtLower;
            }
        }
        std::vector<double> phase2(lp_.cost());
        phase2.resize(n_, 0.0);
        s = iterate(phase2, res);
        res.status = s;
        finish(res, phase2);
        return res;
    }

  private:
    void refactor() {
        if (m_ == 0) {
            return;
        }
        // The basis is sparse; a sparse LU keeps the refactor far below O(m^3).
        const auto M = static_cast<Eigen::Index>(m_);
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t i = 0; i < m_; ++i) {
            const auto& c = cols_[head_[i]];
            for (std::size_t k = 0; k < c.rows.size(); ++k) {
                trip.emplace_back(static_cast<Eigen::Index>(c.rows[k]), static_cast<Eigen::Index>(i), c.values[k]);
            }
        }
        Eigen::SparseMatrix<double> B(M, M);
        B.setFromTriplets(trip.begin(), trip.end());
        B.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(B);
        if (lu.info() != Eigen::Success) {
            throw ConvergenceError("solve_lp: basis matrix is singular", 0.0);
        }
        Binv_ = lu.solve(Eigen::MatrixXd::Identity(M, M));
        // Recompute basic values from the nonbasic ones.
        Eigen::VectorXd r(static_cast<Eigen::Index>(m_));
        for (std::size_t i = 0; i < m_; ++i) {
            r[static_cast<Eigen::Index>(i)] = lp_.rhs()[i];
        }
        for (std::size_t j = 0; j < n_; ++j) {
            if (state_[j] == VarState::Basic || x_[j] == 0.0) {
                continue;
            }
            const auto& c = cols_[j];
            for (std::size_t k = 0; k < c.rows.size(); ++k) {
                r[static_cast<Eigen::Index>(c.rows[k])] -= c.values[k] * x_[j];
            }
        }
        const Eigen::VectorXd xb = Binv_ * r;
        for (std::size_t i = 0; i < m_; ++i) {
            x_[head_[i]] = xb[static_cast<Eigen::Index>(i)];
        }
        since_refactor_ = 0;
    }

    std::vector<double> duals(const std::vector<double>& cost) const {
        std::vector<double> y(m_, 0.0);
        if (m_ == 0) {
            return y;
        }
        Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
        for (std::size_t i = 0; i < m_; ++i) {
            cb[static_cast<Eigen::Index>(i)] = cost[head_[i]];
        }
        const Eigen::VectorXd yy = Binv_.transpose() * cb;
        for (std::size_t i = 0; i < m_; ++i) {
            y[i] = yy[static_cast<Eigen::Index>(i)];
        }
        return y;
    }

    double reduced_cost(const std::vector<double>& cost, const std::vector<double>& y, std::size_t j) const {
        double d = cost[j];
        const auto& c = cols_[j];
        for (std::size_t k = 0; k < c.rows.size(); ++k) {
            d -= y[c.rows[k]] * c.values[k];
        }
        return d;
    }

    LpStatus iterate(const std::vector<double>& cost, LpResult& res) {
        int degenerate = 0;
        bool bland = false;
        for (;;) {
            if (res.iterations >= opt_.max_iterations) {
                return LpStatus::IterationLimit;
            }
            const auto y = duals(cost);

            // Pricing.
            std::size_t q = n_;
            double best = 0.0;
            double dir = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                if (state_[j] == VarState::Basic || !(lower_[j] < upper_[j])) {
                    continue;
                }
                const double d = reduced_cost(cost, y, j);
                double gain = 0.0;
                double dj = 0.0;
                if (state_[j] == VarState::AtLower && d < -opt_.optimality_tol) {
                    gain = -d;
                    dj = 1.0;
                } else if (state_[j] == VarState::AtUpper && d > opt_.optimality_tol) {
                    gain = d;
                    dj = -1.0;
                } else if (state_[j] == VarState::FreeZero && std::abs(d) > opt_.optimality_tol) {
                    gain = std::abs(d);
                    dj = d < 0.0 ? 1.0 : -1.0;
                }
                if (gain > 0.0 && (bland ? q == n_ : gain > best)) {
                    best = gain;
                    q = j;
                    dir = dj;
                }
            }
            if (q == n_) {
                return LpStatus::Optimal;
            }

            // alpha = B^-1 a_q; basic values move by -dir * t * alpha.
            Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
            const auto& cq = cols_[q];
            for (std::size_t k = 0; k < cq.rows.size(); ++k) {
                alpha += cq.values[k] * Binv_.col(static_cast<Eigen::Index>(cq.rows[k]));
            }
            constexpr double kPivotTol = 1e-9;
            double t = upper_[q] - lower_[q];  // bound flip of the entering variable
            std::size_t leave = m_;
            bool leave_to_upper = false;
            double leave_pivot = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                const double rate = -dir * alpha[static_cast<Eigen::Index>(i)];
                if (std::abs(rate) <= kPivotTol) {
                    continue;
                }
                const std::size_t b = head_[i];
                double limit = kInf;
                bool to_upper = false;
                if (rate < 0.0 && std::isfinite(lower_[b])) {
                    limit = std::max(0.0, (x_[b] - lower_[b]) / -rate);
                } else if (rate > 0.0 && std::isfinite(upper_[b])) {
                    limit = std::max(0.0, (upper_[b] - x_[b]) / rate);
                    to_upper = true;
                }
                if (!std::isfinite(limit)) {
                    continue;
                }
                bool take = false;
                if (limit < t - 1e-12) {
                    take = true;
                } else if (limit <= t + 1e-12 && leave < m_) {
                    take = bland ? b < head_[leave] : std::abs(rate) > leave_pivot;
                } else if (limit <= t + 1e-12 && leave == m_ && !std::isfinite(upper_[q] - lower_[q])) {
                    take = true;
                }
                if (take) {
                    t = limit;
                    leave = i;
                    leave_to_upper = to_upper;
                    leave_pivot = std::abs(rate);
                }
            }
            if (!std::isfinite(t)) {
                res.ray.assign(ns_, 0.0);
                if (q < ns_) {
                    res.ray[q] = dir;
                }
                for (std::size_t i = 0; i < m_; ++i) {
                    if (head_[i] < ns_) {
                        res.ray[head_[i]] = -dir * alpha[static_cast<Eigen::Index>(i)];
                    }
                }
                return LpStatus::Unbounded;
            }

            ++res.iterations;
            if (bland) {
                ++res.bland_iterations;
            }
            if (t <= opt_.feasibility_tol) {
                if (++degenerate >= opt_.degenerate_before_bland) {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }

            x_[q] += dir * t;
            for (std::size_t i = 0; i < m_; ++i) {
                x_[head_[i]] -= dir * t * alpha[static_cast<Eigen::Index>(i)];
            }
            if (leave == m_) {
                // Bound flip; the basis is unchanged.
                state_[q] = dir > 0.0 ? VarState::AtUpper : VarState::AtLower;
                x_[q] = dir > 0.0 ? upper_[q] : lower_[q];
                continue;
            }
            const std::size_t out = head_[leave];
            state_[out] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
            x_[out] = leave_to_upper ? upper_[out] : lower_[out];
            state_[q] = VarState::Basic;
            head_[leave] = q;

            // Product-form update as one outer product: B^-1 -= eta * row_r.
            const auto r = static_cast<Eigen::Index>(leave);
            const double piv = alpha[r];
            const Eigen::RowVectorXd row = Binv_.row(r);
            Eigen::VectorXd eta = alpha / piv;
            eta[r] = 1.0 - 1.0 / piv;
            Binv_.noalias() -= eta * row;
            // Dense refactors cost O(m^3), so large bases refactor less often.
            if (++since_refactor_ >= std::max(static_cast<std::size_t>(opt_.refactor_interval), m_ / 4)) {
                refactor();
            }
        }
    }

    void finish(LpResult& res, const std::vector<double>& cost) {
        refactor();
        std::vector<double> full(cost);
        full.resize(n_, 0.0);
        res.z.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(ns_));
        // Snap nonbasic values onto their bounds.
        for (std::size_t j = 0; j < ns_; ++j) {
            if (state_[j] == VarState::AtLower) {
                res.z[j] = lower_[j];
            } else if (state_[j] == VarState::AtUpper) {
                res.z[j] = upper_[j];
            }
        }
        res.objective = lp_.objective(res.z);
        res.duals = duals(full);
        res.reduced_costs.resize(ns_);
        for (std::size_t j = 0; j < ns_; ++j) {
            res.reduced_costs[j] = reduced_cost(full, res.duals, j);
        }
    }

    const LinearProgram& lp_;
    LpOptions opt_;
    std::size_t m_ = 0, ns_ = 0, n_ = 0;
    std::vector<Column> cols_;
    std::vector<double> lower_, upper_, x_;
    std::vector<VarState> state_;
    std::vector<std::size_t> head_;
    Eigen::MatrixXd Binv_;
    std::size_t since_refactor_ = 0;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const LpOptions& options) {
    lp.validate();
    Simplex s(lp, options);
    return s.run();
}

}  // namespace clayems::ems
