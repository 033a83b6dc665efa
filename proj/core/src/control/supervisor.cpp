#include "clayems/control/supervisor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "clayems/error.hpp"

namespace clayems::control {

void SetpointCommand::validate(double p_min, double p_max) const {
    if (!(valid_from < valid_to)) {
        throw ValidationError("setpoint command: valid_from must be < valid_to");
    }
    if (!(p_ehgg_setpoint >= p_min && p_ehgg_setpoint <= p_max)) {
        std::ostringstream os;
        os << "setpoint command: EHGG power " << p_ehgg_setpoint << " W outside [" << p_min << ", " << p_max
           << "] W";
        throw ValidationError(os.str());
    }
}

double SupervisorConfig::temperature_setpoint() const noexcept {
    return 0.5 * (band_low_celsius + band_high_celsius) + kCelsiusOffset;
}

void SupervisorConfig::validate() const {
    if (!(safety_low_celsius < band_low_celsius && band_low_celsius < band_high_celsius &&
          band_high_celsius < safety_high_celsius)) {
        throw ValidationError("supervisor: need safety_low < band_low < band_high < safety_high");
    }
    if (!(loop_flow_setpoint > 0.0) || !(fresh_air >= 0.0)) {
        throw ValidationError("supervisor: loop flow set-point must be > 0 and fresh air >= 0");
    }
    try {
        temperature.validate();
        flow.validate();
    } catch (const DomainError& e) {
        throw ValidationError(std::string("supervisor: ") + e.what());
    }
}

namespace {

PIController limited(PIController c, double lo, double hi) {
    c.output_min = lo;
    c.output_max = hi;
    return c;
}

}  // namespace

SupervisorState make_supervisor_state(const SupervisorConfig& cfg, const dae::PlantDescription& plant,
                                      const dae::PlantInputs& current, const Measurements& meas) {
    SupervisorState s;
    s.temperature = limited(cfg.temperature, plant.clay_feed.min, plant.clay_feed.max);
    s.flow = limited(cfg.flow, plant.fan.dp_min, plant.fan.dp_max);
    s.temperature.integral = bumpless_integral(s.temperature, current.clay_feed,
                                               cfg.temperature_setpoint() - meas.T_calciner_out);
    s.flow.integral = bumpless_integral(s.flow, current.fan_dp, cfg.loop_flow_setpoint - meas.loop_flow);
    return s;
}

SupervisorOutput plant_supervisor(const SetpointCommand& cmd, const Measurements& meas, SupervisorState& state,
                                  const SupervisorConfig& cfg, const dae::PlantDescription& plant, double t,
                                  double dt) {
    if (!std::isfinite(meas.T_calciner_out) || !std::isfinite(meas.loop_flow)) {
        throw DomainError("plant_supervisor: measurements must be finite");
    }
    SupervisorOutput out;
    out.p_el = cmd.p_ehgg_setpoint;

    const double T_sp = cfg.temperature_setpoint();
    const double T_lo = cfg.safety_low_celsius + kCelsiusOffset;
    const double T_hi = cfg.safety_high_celsius + kCelsiusOffset;
    const bool unsafe = meas.T_calciner_out < T_lo || meas.T_calciner_out > T_hi;
    if (unsafe) {
        if (!state.tripped) {
            state.events.push_back({t, meas.T_calciner_out});
        }
        state.tripped = true;
        out.u.clay_feed = state.temperature.output_min;
    } else {
        if (state.tripped) {
            // Resume from the minimum feed the trip left behind.
            state.temperature.integral =
                bumpless_integral(state.temperature, state.temperature.output_min, T_sp - meas.T_calciner_out);
            state.tripped = false;
        }
        const auto step = pi_step(T_sp, meas.T_calciner_out, state.temperature, dt);
        state.temperature = step.controller;
        out.u.clay_feed = step.output;
    }
    out.tripped = state.tripped;

    const auto fan = pi_step(cfg.loop_flow_setpoint, meas.loop_flow, state.flow, dt);
    state.flow = fan.controller;
    out.u.fan_dp = fan.output;
    out.u.fresh_air = std::clamp(cfg.fresh_air, plant.fresh_air.min, plant.fresh_air.max);
    return out;
}

}  // namespace clayems::control
