#include "clayems/units/connector.hpp"

#include <cmath>

#include "clayems/error.hpp"

namespace clayems::units {

double signed_sqrt(double x, double eps) noexcept {
    const double ax = std::abs(x);
    if (ax >= eps) {
        return std::copysign(std::sqrt(ax), x);
    }
    const double se = std::sqrt(eps);
    const double a = 1.25 / se;
    const double b = -0.25 / (se * eps * eps);
    return x * (a + b * x * x);
}

void Connector::validate() const {
    if (!(resistance > 0.0)) {
        throw DomainError("connector: flow resistance C must be > 0");
    }
}

double connector_flow(double P1, double P2, double T1, double C) { return connector_flow_dp(P1 - P2, P1 + P2, T1, C); }

double connector_flow_dp(double delta_p, double p_sum, double T1, double C) {
    if (!(T1 > 0.0)) {
        throw DomainError("connector_flow: T1 must be > 0");
    }
    if (!(p_sum > 0.0)) {
        throw DomainError("connector_flow: P1 + P2 must be > 0");
    }
    // The smoothing band is expressed in the pressure difference itself.
    return C * std::sqrt(p_sum / T1) * signed_sqrt(delta_p, kFlowSmoothingPa);
}

double connector_pressure_drop(double F, double p_sum, double T1, double C) {
    if (!(T1 > 0.0) || !(p_sum > 0.0) || !(C > 0.0)) {
        throw DomainError("connector_pressure_drop: T1, P1 + P2 and C must be > 0");
    }
    const double w = F / (C * std::sqrt(p_sum / T1));
    const double eps = kFlowSmoothingPa;
    const double se = std::sqrt(eps);
    if (std::abs(w) >= se) {
        return std::copysign(w * w, w);
    }
    // Invert the odd cubic a x + b x^3 = w on (-eps, eps); it is monotone there.
    const double a = 1.25 / se;
    const double b = -0.25 / (se * eps * eps);
    double x = w / a;
    for (int it = 0; it < 60; ++it) {
        const double r = x * (a + b * x * x) - w;
        const double dx = r / (a + 3.0 * b * x * x);
        x -= dx;
        if (std::abs(dx) <= 1e-16 * eps) {
            break;
        }
    }
    return x;
}

}  // namespace clayems::units
