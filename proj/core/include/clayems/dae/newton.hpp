#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace clayems::dae {

using VectorFn = std::function<void(std::span<const double> z, std::span<double> r)>;

struct NewtonConfig {
    double tol = 1e-8;  // on the scaled infinity norm
    int max_iter = 50;
    double fd_epsilon = 1e-7;
    int max_halvings = 8;
    // Central differences cost twice the evaluations but remove the
    // first-order truncation error that spoils steep, nearly cancelling columns.
    bool central_differences = false;
};

struct NewtonResult {
    std::vector<double> z;
    int iterations = 0;
    int jacobian_evaluations = 0;
    double residual_norm = 0.0;
};

// Keeps an LU factorization alive between solves (chord iterations). The
// Jacobian is refreshed whenever convergence slows down.
struct NewtonWorkspace {
    // LU of diag(row_scale) J diag(col_scale); equilibration keeps the solve
    // accurate when residual rows differ by many orders of magnitude.
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    Eigen::VectorXd row_scale;
    Eigen::VectorXd col_scale;
    bool valid = false;
    double tag = 0.0;  // caller-defined key, e.g. the step size
    int reuse_count = 0;
};

// Forward (or central) differences; column j perturbs z_j by
// eps_rel * max(1, |z_j|). Throws clayems::Error when fn returns a non-finite value.
Eigen::MatrixXd fd_jacobian(const VectorFn& fn, std::span<const double> z, double eps_rel, std::size_t m,
                            bool central = false);

// Damped Newton with finite-difference Jacobian and step halving. Residual
// entries are divided by `scale` (when given) before taking the norm.
// Throws ConvergenceError carrying the last residual norm.
NewtonResult newton_solve(const VectorFn& fn, std::span<const double> guess, const NewtonConfig& cfg,
                          std::span<const double> scale = {}, NewtonWorkspace* workspace = nullptr);

}  // namespace clayems::dae
