#include "clayems/control/pi.hpp"

#include <algorithm>
#include <cmath>

#include "clayems/error.hpp"

namespace clayems::control {

void PIController::validate() const {
    if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(integral) || !std::isfinite(bias)) {
        throw DomainError("pi controller: gains and state must be finite");
    }
    if (!(output_min <= output_max)) {
        throw DomainError("pi controller: output_min must not exceed output_max");
    }
}

PiStep pi_step(double setpoint, double measurement, const PIController& ctl, double dt) {
    if (!(dt > 0.0)) {
        throw DomainError("pi_step: dt must be > 0");
    }
    PiStep out;
    out.controller = ctl;
    const double e = setpoint - measurement;
    const double advance = ctl.ki * e * dt;
    const double trial = ctl.bias + ctl.kp * e + ctl.integral + advance;
    const bool high = trial > ctl.output_max;
    const bool low = trial < ctl.output_min;
    out.saturated = high || low;
    const bool winding = (high && advance > 0.0) || (low && advance < 0.0);
    if (!ctl.anti_windup || !winding) {
        out.controller.integral += advance;
    }
    const double u = ctl.bias + ctl.kp * e + out.controller.integral;
    out.output = std::clamp(u, ctl.output_min, ctl.output_max);
    return out;
}

double bumpless_integral(const PIController& ctl, double output, double error) noexcept {
    return output - ctl.bias - ctl.kp * error;
}

}  // namespace clayems::control
