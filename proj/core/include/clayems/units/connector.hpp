#pragma once

namespace clayems::units {

// Half-width of the band around zero pressure difference where the square
// root is replaced by a C1 odd cubic.
inline constexpr double kFlowSmoothingPa = 0.1;

// sign(x) sqrt(|x|) outside |x| < eps, cubic a x + b x^3 inside, matching
// value and slope at |x| = eps.
double signed_sqrt(double x, double eps) noexcept;

struct Connector {
    double resistance = 1.0;  // C, kg/s per sqrt(Pa^2/K)
    void validate() const;
};

// Pressure-node flow F = C sqrt((P1 - P2)(P1 + P2) / T1), odd in P1 - P2.
double connector_flow(double P1, double P2, double T1, double C);

// Same law from the difference P1 - P2 and the sum P1 + P2, for callers that
// hold gauge pressures and must not lose the difference to rounding.
double connector_flow_dp(double delta_p, double p_sum, double T1, double C);

// Inverse of connector_flow_dp in delta_p: the pressure difference that
// drives mass flow F. Smooth with a positive slope at F = 0.
double connector_pressure_drop(double F, double p_sum, double T1, double C);

}  // namespace clayems::units
