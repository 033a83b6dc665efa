#include "clayems/dae/newton.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "clayems/error.hpp"

namespace clayems::dae {

namespace {

double scaled_norm(std::span<const double> r, std::span<const double> scale) {
    double m = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double v = scale.empty() ? r[i] : r[i] / scale[i];
        if (!std::isfinite(v)) {
            return std::numeric_limits<double>::infinity();
        }
        m = std::max(m, std::abs(v));
    }
    return m;
}

// Evaluates fn, mapping library errors and non-finite output to +inf.
double try_eval(const VectorFn& fn, std::span<const double> z, std::span<double> r, std::span<const double> scale) {
    try {
        fn(z, r);
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
    return scaled_norm(r, scale);
}

}  // namespace

Eigen::MatrixXd fd_jacobian(const VectorFn& fn, std::span<const double> z, double eps_rel, std::size_t m,
                            bool central) {
    const std::size_t n = z.size();
    std::vector<double> zp(z.begin(), z.end());
    std::vector<double> r0(m), r1(m), rm(m);
    fn(z, r0);
    for (double v : r0) {
        if (!std::isfinite(v)) {
            throw Error("fd_jacobian: residual is not finite at the base point");
        }
    }
    Eigen::MatrixXd J(m, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double h = eps_rel * std::max(1.0, std::abs(z[j]));
        zp[j] = z[j] + h;
        double hj = zp[j] - z[j];
        fn(zp, r1);
        const std::vector<double>* base = &r0;
        if (central) {
            zp[j] = z[j] - h;
            hj = z[j] + h - zp[j];
            fn(zp, rm);
            base = &rm;
        }
        for (std::size_t i = 0; i < m; ++i) {
            const double d = (r1[i] - (*base)[i]) / hj;
            if (!std::isfinite(d)) {
                std::ostringstream os;
                os << "fd_jacobian: non-finite derivative in column " << j;
                throw Error(os.str());
            }
            J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
        }
        zp[j] = z[j];
    }
    return J;
}

NewtonResult newton_solve(const VectorFn& fn, std::span<const double> guess, const NewtonConfig& cfg,
                          std::span<const double> scale, NewtonWorkspace* workspace) {
    const std::size_t n = guess.size();
    if (!scale.empty() && scale.size() != n) {
        throw StructuralError("newton_solve: scale size mismatch");
    }
    NewtonResult res;
    res.z.assign(guess.begin(), guess.end());
    std::vector<double> r(n), r_trial(n), z_trial(n);

    double norm = try_eval(fn, res.z, r, scale);
    if (!std::isfinite(norm)) {
        throw ConvergenceError("newton_solve: residual cannot be evaluated at the initial guess", norm);
    }

    NewtonWorkspace local;
    NewtonWorkspace& ws = workspace ? *workspace : local;
    const bool reuse = workspace != nullptr;
    bool fresh = false;

    const auto N = static_cast<Eigen::Index>(n);
    auto refresh = [&]() {
        Eigen::MatrixXd J = fd_jacobian(fn, res.z, cfg.fd_epsilon, n, cfg.central_differences);
        ws.row_scale.resize(N);
        for (Eigen::Index i = 0; i < N; ++i) {
            ws.row_scale[i] = scale.empty() ? 1.0 : 1.0 / scale[static_cast<std::size_t>(i)];
        }
        J = ws.row_scale.asDiagonal() * J;
        ws.col_scale.resize(N);
        for (Eigen::Index j = 0; j < N; ++j) {
            const double m = J.col(j).cwiseAbs().maxCoeff();
            ws.col_scale[j] = m > 0.0 ? 1.0 / m : 1.0;
        }
        J = J * ws.col_scale.asDiagonal();
        ws.lu.compute(J);
        ws.valid = true;
        ws.reuse_count = 0;
        fresh = true;
        ++res.jacobian_evaluations;
    };

    while (norm > cfg.tol) {
        if (res.iterations >= cfg.max_iter) {
            std::ostringstream os;
            os << "newton_solve: no convergence in " << cfg.max_iter << " iterations, residual " << norm;
            throw ConvergenceError(os.str(), norm);
        }
        ++res.iterations;
        if (!ws.valid || !reuse) {
            refresh();
        } else {
            fresh = false;
        }

        // Corrections are kept in equilibrated coordinates, w = dz / col_scale.
        auto correction = [&](const std::vector<double>& res_vec) -> Eigen::VectorXd {
            Eigen::Map<const Eigen::VectorXd> rv(res_vec.data(), N);
            const Eigen::VectorXd rhs = -(ws.row_scale.asDiagonal() * rv);
            return ws.lu.solve(rhs);
        };
        Eigen::VectorXd w = correction(r);
        if (!w.allFinite()) {
            if (!fresh) {
                refresh();
                w = correction(r);
            }
            if (!w.allFinite()) {
                throw ConvergenceError("newton_solve: singular Jacobian", norm);
            }
        }
        const Eigen::VectorXd dz = ws.col_scale.asDiagonal() * w;
        const double w_norm = w.norm();

        // A trial is accepted when the residual norm drops or when the
        // simplified Newton correction shrinks (natural monotonicity test).
        // The second test is blind to row scaling, so a strongly curved
        // residual row does not force tiny steps.
        double lambda = 1.0;
        double trial = std::numeric_limits<double>::infinity();
        int halvings = 0;
        bool accepted = false;
        for (;;) {
            for (std::size_t i = 0; i < n; ++i) {
                z_trial[i] = res.z[i] + lambda * dz[static_cast<Eigen::Index>(i)];
            }
            trial = try_eval(fn, z_trial, r_trial, scale);
            if (std::isfinite(trial)) {
                if (trial < norm) {
                    accepted = true;
                } else {
                    const Eigen::VectorXd w_bar = correction(r_trial);
                    accepted = w_bar.allFinite() && w_bar.norm() <= (1.0 - 0.25 * lambda) * w_norm;
                }
            }
            if (accepted || halvings >= cfg.max_halvings) {
                break;
            }
            lambda *= 0.5;
            ++halvings;
        }

        if (!accepted) {
            if (!fresh) {
                // A stale Jacobian is the likely culprit; retry with a new one.
                ws.valid = false;
                continue;
            }
            std::ostringstream os;
            os << "newton_solve: line search failed after " << cfg.max_halvings << " halvings, residual " << norm;
            throw ConvergenceError(os.str(), norm);
        }

        const double ratio = trial / norm;
        res.z.swap(z_trial);
        r.swap(r_trial);
        norm = trial;
        if (reuse) {
            ++ws.reuse_count;
            if (!(ratio < 0.25) || halvings > 0) {
                ws.valid = false;
            }
        }
    }
    res.residual_norm = norm;
    return res;
}

}  // namespace clayems::dae
