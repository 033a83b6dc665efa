#pragma once

#include <cstddef>

#include "clayems/chem/chemistry_file.hpp"
#include "clayems/control/supervisor.hpp"
#include "clayems/dae/integrator.hpp"
#include "clayems/dae/plant.hpp"
#include "clayems/ems/scheduler.hpp"
#include "clayems/grid/network.hpp"

namespace clayems::integrate {

// Start-up used to bring the plant from a cold, empty loop to a steady
// operating point before the horizon begins.
struct InitConfig {
    double T_amb = 298.15;        // K
    double feed_per_mw = 0.43;    // kg/s clay feed per MW of EHGG power, open-loop ramp
    double ramp = 120.0;          // s, linear ramp of power and feed
    double hold = 600.0;          // s, open loop at full power (ramp included)
    double settle = 1800.0;       // s, closed loop at the first set-point
    double fan_dp = 2000.0;       // Pa, open-loop fan pressure rise

    void validate() const;  // throws ValidationError
};

struct Scenario {
    dae::PlantDescription plant;
    chem::Chemistry chemistry;
    grid::RadialNetwork network;
    ems::Forecasts forecasts;
    ems::DeviceSpecs devices;
    control::SupervisorConfig controller;
    dae::SolverConfig solver;  // solver.dt is the simulation step
    InitConfig init;
    double verify_gap_tol = 0.01;  // p.u.^2

    double sim_dt() const noexcept { return solver.dt; }
    double period_seconds() const noexcept { return forecasts.dt * 3600.0; }
    std::size_t steps_per_period() const;  // throws ValidationError

    // Member validation plus the cross-checks: the EMS period is an integer
    // multiple of the simulation step and the EHGG range agrees between the
    // device specs (MW) and the plant (W). Throws ValidationError.
    void validate() const;
};

}  // namespace clayems::integrate
