#pragma once

#include <vector>

#include "clayems/control/pi.hpp"
#include "clayems/dae/plant.hpp"

namespace clayems::control {

inline constexpr double kCelsiusOffset = 273.15;

// EHGG power requested by the EMS for [valid_from, valid_to).
struct SetpointCommand {
    double p_ehgg_setpoint = 0.0;  // W
    double valid_from = 0.0;       // s
    double valid_to = 0.0;         // s

    // Throws ValidationError when the window is empty or the power is
    // outside [p_min, p_max].
    void validate(double p_min, double p_max) const;
};

struct SupervisorConfig {
    PIController temperature;  // clay feed (kg/s) on calciner outlet gas temperature (K)
    PIController flow;         // fan pressure rise (Pa) on loop circulation flow (kg/s)
    double band_low_celsius = 750.0;
    double band_high_celsius = 850.0;
    double safety_low_celsius = 600.0;
    double safety_high_celsius = 1000.0;
    double loop_flow_setpoint = 2.65;  // kg/s
    double fresh_air = 0.3;            // kg/s, held constant

    double temperature_setpoint() const noexcept;  // band midpoint, K
    void validate() const;                          // throws ValidationError
};

struct Measurements {
    double T_calciner_out = 0.0;  // K, gas at the last cell
    double loop_flow = 0.0;       // kg/s
};

struct SafetyEvent {
    double t = 0.0;
    double temperature = 0.0;  // K
};

struct SupervisorState {
    PIController temperature;
    PIController flow;
    bool tripped = false;
    std::vector<SafetyEvent> events;
};

struct SupervisorOutput {
    dae::PlantInputs u;
    double p_el = 0.0;  // W handed to the plant as a disturbance
    bool tripped = false;
};

// Controller state seeded from the config, with actuator limits taken from
// the plant description and integrals set so the first output equals the
// given inputs (bumpless start).
SupervisorState make_supervisor_state(const SupervisorConfig& cfg, const dae::PlantDescription& plant,
                                      const dae::PlantInputs& current, const Measurements& meas);

// One supervisory update. The EHGG power follows the command exactly; clay
// feed holds the outlet temperature at the band midpoint; the fan holds the
// loop flow. Outside the safety band a trip is recorded and clay feed is
// driven to its minimum until the temperature is back inside.
SupervisorOutput plant_supervisor(const SetpointCommand& cmd, const Measurements& meas, SupervisorState& state,
                                  const SupervisorConfig& cfg, const dae::PlantDescription& plant, double t,
                                  double dt);

}  // namespace clayems::control
