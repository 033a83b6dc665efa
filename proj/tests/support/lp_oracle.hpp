#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "clayems/ems/lp.hpp"

namespace clayems::test {

// Best objective over all basic solutions of a box-bounded equality LP:
// m independent basic columns, every other variable at one of its bounds.
// Empty when no basic solution is feasible.
inline std::optional<double> vertex_enumeration(const ems::LinearProgram& lp, double tol = 1e-9) {
    const auto n = static_cast<int>(lp.num_variables());
    const auto m = static_cast<int>(lp.num_rows());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
    for (int i = 0; i < m; ++i) {
        for (const auto& e : lp.rows()[static_cast<std::size_t>(i)]) {
            A(i, static_cast<int>(e.col)) += e.value;
        }
    }
    const Eigen::Map<const Eigen::VectorXd> b(lp.rhs().data(), m);
    std::optional<double> best;
    std::vector<int> pick(static_cast<std::size_t>(n), 0);
    std::fill(pick.end() - m, pick.end(), 1);
    do {
        std::vector<int> basic, nonbasic;
        for (int j = 0; j < n; ++j) {
            (pick[static_cast<std::size_t>(j)] ? basic : nonbasic).push_back(j);
        }
        Eigen::MatrixXd B(m, m);
        for (int k = 0; k < m; ++k) {
            B.col(k) = A.col(basic[static_cast<std::size_t>(k)]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
        if (lu.rank() < m) {
            continue;
        }
        const auto nn = nonbasic.size();
        for (std::size_t mask = 0; mask < (std::size_t{1} << nn); ++mask) {
            std::vector<double> z(static_cast<std::size_t>(n), 0.0);
            bool finite = true;
            for (std::size_t k = 0; k < nn; ++k) {
                const auto j = static_cast<std::size_t>(nonbasic[k]);
                z[j] = (mask >> k) & 1U ? lp.upper()[j] : lp.lower()[j];
                finite = finite && std::isfinite(z[j]);
            }
            if (!finite) {
                continue;
            }
            Eigen::VectorXd rhs = b;
            for (int j : nonbasic) {
                rhs -= A.col(j) * z[static_cast<std::size_t>(j)];
            }
            const Eigen::VectorXd zb = lu.solve(rhs);
            bool ok = true;
            for (int k = 0; k < m; ++k) {
                const auto j = static_cast<std::size_t>(basic[static_cast<std::size_t>(k)]);
                z[j] = zb[k];
                ok = ok && z[j] >= lp.lower()[j] - tol && z[j] <= lp.upper()[j] + tol;
            }
            if (ok) {
                const double obj = lp.objective(z);
                if (!best || obj < *best) {
                    best = obj;
                }
            }
        }
    } while (std::next_permutation(pick.begin(), pick.end()));
    return best;
}

enum class LpKind { Bounded, Infeasible, Unbounded };

struct RandomLp {
    ems::LinearProgram lp;
    LpKind kind = LpKind::Bounded;
};

// Dense random LP with n <= 6 variables and m <= 4 rows. Feasible instances
// are built around an interior point; infeasible ones push one right-hand
// side past the largest value its row can reach; unbounded ones add a pair
// of unbounded columns +a, -a whose sum has negative cost.
inline RandomLp random_lp(std::mt19937_64& rng, LpKind kind) {
    std::uniform_int_distribution<int> nd(2, kind == LpKind::Unbounded ? 4 : 6);
    std::uniform_real_distribution<double> coef(-3.0, 3.0), lo(-2.0, 0.0), width(0.5, 4.0), t(0.0, 1.0);
    const int n = nd(rng);
    std::uniform_int_distribution<int> md(1, std::min(4, n - 1));
    const int m = md(rng);
    RandomLp out;
    out.kind = kind;
    std::vector<double> z0;
    for (int j = 0; j < n; ++j) {
        const double l = lo(rng), u = l + width(rng);
        out.lp.add_variable("z" + std::to_string(j), l, u, coef(rng));
        z0.push_back(l + t(rng) * (u - l));
    }
    for (int i = 0; i < m; ++i) {
        std::vector<ems::LinearProgram::Entry> row;
        double rhs = 0.0, reach = 0.0;
        for (int j = 0; j < n; ++j) {
            const double a = coef(rng);
            row.push_back({static_cast<std::size_t>(j), a});
            rhs += a * z0[static_cast<std::size_t>(j)];
            reach += std::max(a * out.lp.lower()[static_cast<std::size_t>(j)],
                              a * out.lp.upper()[static_cast<std::size_t>(j)]);
        }
        if (kind == LpKind::Infeasible && i == 0) {
            rhs = reach + 1.0 + t(rng);
        }
        out.lp.add_equality("r" + std::to_string(i), row, rhs);
    }
    if (kind == LpKind::Unbounded) {
        const auto p = out.lp.add_variable("up", 0.0, ems::kInf, -1.0 - t(rng));
        const auto q = out.lp.add_variable("um", 0.0, ems::kInf, t(rng));
        // Rows are rebuilt with the new columns appended.
        ems::LinearProgram lp;
        for (std::size_t j = 0; j < out.lp.num_variables(); ++j) {
            lp.add_variable(out.lp.variable_names()[j], out.lp.lower()[j], out.lp.upper()[j], out.lp.cost()[j]);
        }
        for (std::size_t i = 0; i < out.lp.num_rows(); ++i) {
            auto row = out.lp.rows()[i];
            const double a = coef(rng);
            row.push_back({p, a});
            row.push_back({q, -a});
            lp.add_equality(out.lp.row_names()[i], row, out.lp.rhs()[i]);
        }
        out.lp = std::move(lp);
    }
    return out;
}

}  // namespace clayems::test
