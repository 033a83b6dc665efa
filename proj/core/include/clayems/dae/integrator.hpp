#pragma once

#include <optional>
#include <vector>

#include "clayems/dae/dae_system.hpp"
#include "clayems/dae/newton.hpp"

namespace clayems::dae {

struct SolverConfig {
    double dt = 1.0;            // s
    double newton_tol = 1e-8;   // scaled residual norm
    int max_newton_iter = 30;
    double fd_epsilon = 1e-7;
    double tol_alg = 1e-6;      // bound on the scaled algebraic residual after a step
    int max_dt_halvings = 4;
    bool reuse_jacobian = true;
    bool central_differences = false;

    void validate() const;  // throws DomainError
};

// One implicit Euler step of size cfg.dt on the stacked unknowns (x+, y+).
// Throws ConvergenceError or StateError when the step cannot be accepted.
DaeState step_implicit_euler(const DaeSystem& sys, const DaeState& state, const SolverConfig& cfg,
                             NewtonWorkspace* workspace = nullptr);

// One fixed-step BDF2 step of size cfg.dt; `x_previous` is x at t - dt.
DaeState step_bdf2(const DaeSystem& sys, const DaeState& state, std::span<const double> x_previous,
                   const SolverConfig& cfg, NewtonWorkspace* workspace = nullptr);

// Scaled infinity norm of g at a state.
double algebraic_residual_norm(const DaeSystem& sys, const DaeState& state);

enum class Scheme { ImplicitEuler, Bdf2 };

// Fixed-step driver. A rejected step is retried on dt/2, dt/4, ... (up to
// cfg.max_dt_halvings) as sub-steps covering the same interval. BDF2 starts
// with one implicit Euler step and restarts after a rejection.
class Integrator {
  public:
    Integrator(const DaeSystem& sys, SolverConfig cfg, Scheme scheme = Scheme::ImplicitEuler);

    DaeState step(const DaeState& state);
    void reset_history();
    void invalidate_jacobian() { workspace_.valid = false; }

    const SolverConfig& config() const noexcept { return cfg_; }
    int rejected_steps() const noexcept { return rejected_; }

  private:
    DaeState single(const DaeState& state, double dt);

    const DaeSystem& sys_;
    SolverConfig cfg_;
    Scheme scheme_;
    NewtonWorkspace workspace_;
    std::optional<std::vector<double>> x_previous_;
    double t_previous_ = 0.0;
    int rejected_ = 0;
};

}  // namespace clayems::dae
