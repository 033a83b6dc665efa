#include "clayems/dae/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "clayems/error.hpp"

namespace clayems::dae {

void DaeSystem::scales(std::span<double> x_scale, std::span<double> g_scale) const {
    std::fill(x_scale.begin(), x_scale.end(), 1.0);
    std::fill(g_scale.begin(), g_scale.end(), 1.0);
}

void SolverConfig::validate() const {
    if (!(dt > 0.0) || !(newton_tol > 0.0) || !(fd_epsilon > 0.0) || !(tol_alg > 0.0)) {
        throw DomainError("solver config: dt and tolerances must be > 0");
    }
    if (max_newton_iter < 1 || max_dt_halvings < 0) {
        throw DomainError("solver config: iteration limits must be positive");
    }
}

namespace {

// Shared core of the one-step methods: solves
//   x+ - alpha * x_hist - beta * dt * f(x+, y+) = 0,  g(x+, y+) = 0
// where x_hist is the weighted history combination.
DaeState implicit_step(const DaeSystem& sys, const DaeState& state, std::span<const double> x_hist, double beta,
                       double dt, const SolverConfig& cfg, NewtonWorkspace* ws) {
    const std::size_t nx = sys.n_differential();
    const std::size_t ny = sys.n_algebraic();
    const std::size_t nq = sys.n_quadrature();
    const std::size_t nc = nx - nq;
    if (state.x.size() != nx || state.y.size() != ny) {
        throw StructuralError("implicit step: state dimensions do not match the system");
    }

    std::vector<double> x_scale(nx), g_scale(ny);
    sys.scales(x_scale, g_scale);

    const double t_new = state.t + dt;
    std::vector<double> x(state.x);  // quadrature entries held at old values during the solve
    std::vector<double> f(nx), g(ny);

    auto fn = [&](std::span<const double> z, std::span<double> r) {
        std::copy(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(nc), x.begin());
        std::span<const double> y = z.subspan(nc, ny);
        sys.residuals(t_new, x, y, f, g);
        for (std::size_t i = 0; i < nc; ++i) {
            r[i] = z[i] - x_hist[i] - beta * dt * f[i];
        }
        for (std::size_t i = 0; i < ny; ++i) {
            r[nc + i] = g[i];
        }
    };

    std::vector<double> guess(nc + ny), scale(nc + ny);
    std::copy(state.x.begin(), state.x.begin() + static_cast<std::ptrdiff_t>(nc), guess.begin());
    std::copy(state.y.begin(), state.y.end(), guess.begin() + static_cast<std::ptrdiff_t>(nc));
    std::copy(x_scale.begin(), x_scale.begin() + static_cast<std::ptrdiff_t>(nc), scale.begin());
    std::copy(g_scale.begin(), g_scale.end(), scale.begin() + static_cast<std::ptrdiff_t>(nc));

    NewtonConfig ncfg;
    ncfg.tol = cfg.newton_tol;
    ncfg.max_iter = cfg.max_newton_iter;
    ncfg.fd_epsilon = cfg.fd_epsilon;
    ncfg.central_differences = cfg.central_differences;

    if (ws && ws->tag != beta * dt) {
        ws->valid = false;
        ws->tag = beta * dt;
    }
    NewtonResult nr = newton_solve(fn, guess, ncfg, scale, cfg.reuse_jacobian ? ws : nullptr);

    DaeState out;
    out.t = t_new;
    out.x.assign(nx, 0.0);
    out.y.assign(nr.z.begin() + static_cast<std::ptrdiff_t>(nc), nr.z.end());
    std::copy(nr.z.begin(), nr.z.begin() + static_cast<std::ptrdiff_t>(nc), out.x.begin());
    // Conservative finish: every differential entry, quadratures included,
    // is advanced with the right-hand side at the converged point. Fluxes
    // then telescope exactly between units, whatever the Newton residual.
    std::copy(nr.z.begin(), nr.z.begin() + static_cast<std::ptrdiff_t>(nc), x.begin());
    sys.residuals(t_new, x, out.y, f, g);
    for (std::size_t i = 0; i < nx; ++i) {
        out.x[i] = x_hist[i] + beta * dt * f[i];
    }
    sys.residuals(t_new, out.x, out.y, f, g);

    double gnorm = 0.0;
    for (std::size_t i = 0; i < ny; ++i) {
        gnorm = std::max(gnorm, std::abs(g[i] / g_scale[i]));
    }
    if (!(gnorm <= cfg.tol_alg)) {
        std::ostringstream os;
        os << "implicit step: algebraic residual " << gnorm << " above tol_alg";
        throw ConvergenceError(os.str(), gnorm);
    }
    sys.check_state(out.x, out.y);
    return out;
}

}  // namespace

DaeState step_implicit_euler(const DaeSystem& sys, const DaeState& state, const SolverConfig& cfg,
                             NewtonWorkspace* workspace) {
    return implicit_step(sys, state, state.x, 1.0, cfg.dt, cfg, workspace);
}

DaeState step_bdf2(const DaeSystem& sys, const DaeState& state, std::span<const double> x_previous,
                   const SolverConfig& cfg, NewtonWorkspace* workspace) {
    if (x_previous.size() != state.x.size()) {
        throw StructuralError("step_bdf2: history size mismatch");
    }
    std::vector<double> hist(state.x.size());
    for (std::size_t i = 0; i < hist.size(); ++i) {
        hist[i] = (4.0 * state.x[i] - x_previous[i]) / 3.0;
    }
    return implicit_step(sys, state, hist, 2.0 / 3.0, cfg.dt, cfg, workspace);
}

double algebraic_residual_norm(const DaeSystem& sys, const DaeState& state) {
    std::vector<double> f(sys.n_differential()), g(sys.n_algebraic());
    std::vector<double> xs(f.size()), gs(g.size());
    sys.scales(xs, gs);
    sys.residuals(state.t, state.x, state.y, f, g);
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        m = std::max(m, std::abs(g[i] / gs[i]));
    }
    return m;
}

Integrator::Integrator(const DaeSystem& sys, SolverConfig cfg, Scheme scheme)
    : sys_(sys), cfg_(cfg), scheme_(scheme) {
    cfg_.validate();
}

void Integrator::reset_history() { x_previous_.reset(); }

DaeState Integrator::single(const DaeState& state, double dt) {
    SolverConfig c = cfg_;
    c.dt = dt;
    if (scheme_ == Scheme::Bdf2 && x_previous_ && std::abs((state.t - t_previous_) - dt) <= 1e-12 * dt) {
        return step_bdf2(sys_, state, *x_previous_, c, &workspace_);
    }
    return step_implicit_euler(sys_, state, c, &workspace_);
}

DaeState Integrator::step(const DaeState& state) {
    try {
        DaeState next = single(state, cfg_.dt);
        x_previous_ = state.x;
        t_previous_ = state.t;
        return next;
    } catch (const ConvergenceError&) {
    } catch (const StateError&) {
    }
    ++rejected_;
    reset_history();
    workspace_.valid = false;

    std::string last;
    for (int level = 1; level <= cfg_.max_dt_halvings; ++level) {
        const int pieces = 1 << level;
        const double h = cfg_.dt / pieces;
        try {
            DaeState s = state;
            for (int k = 0; k < pieces; ++k) {
                s = single(s, h);
            }
            s.t = state.t + cfg_.dt;
            reset_history();
            return s;
        } catch (const ConvergenceError& e) {
            last = e.what();
        } catch (const StateError& e) {
            last = e.what();
        }
        workspace_.valid = false;
    }
    std::ostringstream os;
    os << "integrator: step at t=" << state.t << " rejected after " << cfg_.max_dt_halvings
       << " halvings: " << last;
    throw ConvergenceError(os.str(), 0.0);
}

}  // namespace clayems::dae
