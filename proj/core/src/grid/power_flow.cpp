#include "clayems/grid/power_flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "clayems/dae/newton.hpp"

namespace clayems::grid {

BusInjections BusInjections::zero(const RadialNetwork& net) {
    return {std::vector<double>(net.buses.size(), 0.0), std::vector<double>(net.buses.size(), 0.0)};
}

namespace {

void check_sizes(const RadialNetwork& net, const BusInjections& loads) {
    if (loads.p.size() != net.buses.size() || loads.q.size() != net.buses.size()) {
        throw StructuralError("power flow: injection vectors must have one entry per bus");
    }
    for (std::size_t i = 0; i < loads.p.size(); ++i) {
        if (!std::isfinite(loads.p[i]) || !std::isfinite(loads.q[i])) {
            throw DomainError("power flow: injection at bus '" + net.buses[i].id + "' is not finite");
        }
    }
}

PowerFlowSolution flat_start(const RadialNetwork& net, const Topology& topo, const BusInjections& loads,
                             double U0) {
    PowerFlowSolution s;
    s.U.assign(net.buses.size(), U0);
    s.P.assign(net.branches.size(), 0.0);
    s.Q.assign(net.branches.size(), 0.0);
    s.l.assign(net.branches.size(), 0.0);
    s.p_load = loads.p;
    s.q_load = loads.q;
    s.p_load[topo.root] = 0.0;
    s.q_load[topo.root] = 0.0;
    return s;
}

void update_slack(const Topology& topo, PowerFlowSolution& s) {
    s.slack_p = 0.0;
    s.slack_q = 0.0;
    for (auto k : topo.child_branches[topo.root]) {
        s.slack_p += s.P[k];
        s.slack_q += s.Q[k];
    }
}

}  // namespace

double active_losses(const RadialNetwork& net, const PowerFlowSolution& sol) {
    double loss = 0.0;
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        loss += net.branches[k].r * sol.l[k];
    }
    return loss;
}

std::vector<double> branch_flow_residuals(const RadialNetwork& net, const PowerFlowSolution& sol) {
    const auto topo = radial_topology(net);
    const std::size_t m = net.branches.size();
    const std::size_t n = net.buses.size();
    if (sol.U.size() != n || sol.P.size() != m || sol.Q.size() != m || sol.l.size() != m ||
        sol.p_load.size() != n || sol.q_load.size() != n) {
        throw StructuralError("branch_flow_residuals: solution dimensions do not match the network");
    }
    std::vector<double> r;
    r.reserve(2 * m + 2 * (n - 1));
    for (std::size_t k = 0; k < m; ++k) {
        const auto& br = net.branches[k];
        r.push_back(sol.U[topo.to[k]] - sol.U[topo.from[k]] + 2.0 * (sol.P[k] * br.r + sol.Q[k] * br.x) -
                    (br.r * br.r + br.x * br.x) * sol.l[k]);
    }
    for (int part = 0; part < 2; ++part) {
        const auto& flow = part == 0 ? sol.P : sol.Q;
        const auto& load = part == 0 ? sol.p_load : sol.q_load;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == topo.root) {
                continue;
            }
            const std::size_t k = topo.parent_branch[j];
            const double z = part == 0 ? net.branches[k].r : net.branches[k].x;
            double v = flow[k] - sol.l[k] * z;
            for (auto c : topo.child_branches[j]) {
                v -= flow[c];
            }
            r.push_back(v - load[j]);
        }
    }
    for (std::size_t k = 0; k < m; ++k) {
        r.push_back(sol.l[k] * sol.U[topo.from[k]] - (sol.P[k] * sol.P[k] + sol.Q[k] * sol.Q[k]));
    }
    return r;
}

PowerFlowSolution solve_power_flow(const RadialNetwork& net, const BusInjections& loads, double U0,
                                   const SweepConfig& cfg) {
    const auto topo = radial_topology(net);
    check_sizes(net, loads);
    if (!(U0 > 0.0)) {
        throw DomainError("solve_power_flow: U0 must be > 0");
    }
    PowerFlowSolution s = flat_start(net, topo, loads, U0);
    const std::size_t m = net.branches.size();

    double update = 0.0;
    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        update = 0.0;
        auto track = [&update](double& slot, double value) {
            update = std::max(update, std::abs(value - slot));
            slot = value;
        };
        // Backward: children before parents.
        for (auto it = topo.order.rbegin(); it != topo.order.rend(); ++it) {
            const std::size_t j = *it;
            const std::size_t k = topo.parent_branch[j];
            if (k == kNone) {
                continue;
            }
            double p = s.p_load[j] + net.branches[k].r * s.l[k];
            double q = s.q_load[j] + net.branches[k].x * s.l[k];
            for (auto c : topo.child_branches[j]) {
                p += s.P[c];
                q += s.Q[c];
            }
            track(s.P[k], p);
            track(s.Q[k], q);
        }
        // Forward: parents before children.
        for (auto j : topo.order) {
            const std::size_t k = topo.parent_branch[j];
            if (k == kNone) {
                continue;
            }
            const auto& br = net.branches[k];
            const double Ui = s.U[topo.from[k]];
            track(s.U[j], Ui - 2.0 * (s.P[k] * br.r + s.Q[k] * br.x) + (br.r * br.r + br.x * br.x) * s.l[k]);
        }
        bool collapsed = false;
        for (std::size_t k = 0; k < m; ++k) {
            const double Ui = s.U[topo.from[k]];
            if (!(Ui > 0.0) || !std::isfinite(Ui)) {
                collapsed = true;
                break;
            }
            track(s.l[k], (s.P[k] * s.P[k] + s.Q[k] * s.Q[k]) / Ui);
        }
        s.sweeps = sweep;
        update_slack(topo, s);
        if (collapsed || !std::isfinite(update)) {
            throw PowerFlowDivergence("solve_power_flow: voltage collapsed (non-positive U)", update, s);
        }
        if (update <= cfg.tol) {
            return s;
        }
    }
    std::ostringstream os;
    os << "solve_power_flow: no convergence in " << cfg.max_sweeps << " sweeps, last update " << update;
    throw PowerFlowDivergence(os.str(), update, s);
}

PowerFlowSolution solve_power_flow_newton(const RadialNetwork& net, const BusInjections& loads, double U0,
                                          double tol) {
    const auto topo = radial_topology(net);
    check_sizes(net, loads);
    const std::size_t n = net.buses.size();
    const std::size_t m = net.branches.size();
    PowerFlowSolution base = flat_start(net, topo, loads, U0);

    // Unknowns: U at every non-substation bus, then P, Q, l per branch.
    std::vector<std::size_t> u_slot(n, kNone);
    std::size_t nu = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j != topo.root) {
            u_slot[j] = nu++;
        }
    }
    auto unpack = [&](std::span<const double> z) {
        PowerFlowSolution s = base;
        for (std::size_t j = 0; j < n; ++j) {
            if (u_slot[j] != kNone) {
                s.U[j] = z[u_slot[j]];
            }
        }
        for (std::size_t k = 0; k < m; ++k) {
            s.P[k] = z[nu + k];
            s.Q[k] = z[nu + m + k];
            s.l[k] = z[nu + 2 * m + k];
        }
        return s;
    };
    std::vector<double> guess(nu + 3 * m, 0.0);
    for (std::size_t i = 0; i < nu; ++i) {
        guess[i] = U0;
    }
    dae::VectorFn fn = [&](std::span<const double> z, std::span<double> r) {
        const auto res = branch_flow_residuals(net, unpack(z));
        std::copy(res.begin(), res.end(), r.begin());
    };
    dae::NewtonConfig cfg;
    cfg.tol = tol;
    cfg.central_differences = true;
    const auto result = dae::newton_solve(fn, guess, cfg);
    PowerFlowSolution s = unpack(result.z);
    s.sweeps = result.iterations;
    update_slack(topo, s);
    return s;
}

}  // namespace clayems::grid
