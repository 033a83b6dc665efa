#pragma once

#include <vector>

#include "clayems/error.hpp"
#include "clayems/grid/network.hpp"

namespace clayems::grid {

// Net bus consumption (load positive, generation negative), p.u., per bus in
// network order. Entries at the substation are ignored.
struct BusInjections {
    std::vector<double> p;
    std::vector<double> q;

    static BusInjections zero(const RadialNetwork& net);
};

struct PowerFlowSolution {
    std::vector<double> U;  // per bus, squared voltage magnitude, p.u.^2
    std::vector<double> P;  // per branch, sending-end active flow, p.u.
    std::vector<double> Q;  // per branch, sending-end reactive flow, p.u.
    std::vector<double> l;  // per branch, squared current magnitude, p.u.^2
    std::vector<double> p_load;  // per bus, net consumption used in the balance
    std::vector<double> q_load;
    double slack_p = 0.0;  // active power supplied by the substation, p.u.
    double slack_q = 0.0;
    int sweeps = 0;
};

// Active losses sum(r_ij * l_ij), p.u.
double active_losses(const RadialNetwork& net, const PowerFlowSolution& sol);

// Rows: voltage drop per branch, active balance per non-substation bus,
// reactive balance per non-substation bus, l*U_i - (P^2 + Q^2) per branch.
// Bus rows follow network order with the substation skipped.
std::vector<double> branch_flow_residuals(const RadialNetwork& net, const PowerFlowSolution& sol);

struct SweepConfig {
    double tol = 1e-10;  // on the largest change of any variable between sweeps
    int max_sweeps = 100;
};

// Thrown when the sweep does not settle; carries the last iterate.
class PowerFlowDivergence : public ConvergenceError {
  public:
    PowerFlowDivergence(const std::string& what, double last_update, PowerFlowSolution last)
        : ConvergenceError(what, last_update), last_(std::move(last)) {}
    const PowerFlowSolution& last_iterate() const noexcept { return last_; }

  private:
    PowerFlowSolution last_;
};

// Backward/forward sweep. Backward: flows accumulate from the leaves with the
// current l; forward: U from the root, then l from the new U and flows.
PowerFlowSolution solve_power_flow(const RadialNetwork& net, const BusInjections& loads, double U0,
                                   const SweepConfig& cfg = {});

// Same equations solved by damped Newton on branch_flow_residuals, started
// from a flat profile; used as an independent cross-check of the sweep.
PowerFlowSolution solve_power_flow_newton(const RadialNetwork& net, const BusInjections& loads, double U0,
                                          double tol = 1e-12);

}  // namespace clayems::grid
