#pragma once

namespace clayems::control {

// Discrete PI law with clamping anti-windup. Reverse-acting loops (more
// actuator lowers the measurement) use negative kp and ki.
struct PIController {
    double kp = 0.0;
    double ki = 0.0;              // 1/s
    double integral = 0.0;        // actuator units
    double output_min = 0.0;
    double output_max = 0.0;
    bool anti_windup = true;
    double bias = 0.0;            // added to the unsaturated output

    void validate() const;  // throws DomainError
};

struct PiStep {
    double output = 0.0;
    PIController controller;
    bool saturated = false;
};

// e = setpoint - measurement; the integral advances by ki*e*dt first and the
// advance is kept unless the result is saturated and the advance would push
// it further into saturation. The output is clipped to the limits.
PiStep pi_step(double setpoint, double measurement, const PIController& ctl, double dt);

// Integral value that makes the unsaturated output equal `output` at error e.
double bumpless_integral(const PIController& ctl, double output, double error) noexcept;

}  // namespace clayems::control
