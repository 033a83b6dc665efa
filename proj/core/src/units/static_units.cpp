#include "clayems/units/static_units.hpp"

#include <cmath>
#include <sstream>

#include "clayems/error.hpp"

namespace clayems::units {

using chem::Phase;

Stream ehgg_outlet(const chem::ThermoLibrary& thermo, const Stream& inflow, double p_el, double eta_e) {
    if (!(eta_e > 0.0 && eta_e <= 1.0)) {
        throw DomainError("ehgg_outlet: efficiency must be in (0, 1]");
    }
    if (!(p_el >= 0.0)) {
        throw DomainError("ehgg_outlet: electrical power must be >= 0");
    }
    if (!(inflow.flow.total(Phase::Gas) > 0.0) || !inflow.flow.non_negative()) {
        throw DomainError("ehgg_outlet: inflow gas flow must be > 0");
    }
    if (p_el == 0.0) {
        return inflow;
    }
    const double h_out = enthalpy_flow(thermo, inflow) + eta_e * p_el;
    // Solve at the upper bound first so overheating is reported as such.
    const double h_max = thermo.phase_enthalpy(Phase::Gas, chem::kMaxTemperature, inflow.flow) +
                         thermo.phase_enthalpy(Phase::Solid, chem::kMaxTemperature, inflow.flow);
    if (h_out > h_max) {
        std::ostringstream os;
        os << "ehgg_outlet: " << p_el << " W overheats the stream above " << chem::kMaxTemperature << " K";
        throw RangeError(os.str());
    }
    Stream out = inflow;
    const double T = thermo.temperature_from_enthalpy(h_out, inflow.P, inflow.flow, inflow.T_gas);
    out.T_gas = T;
    out.T_solid = T;
    return out;
}

FanResult fan_outlet(const chem::ThermoLibrary& thermo, const Stream& inflow, double delta_p_rise,
                     double eta_fan) {
    if (!(delta_p_rise >= 0.0)) {
        throw DomainError("fan_outlet: pressure rise must be >= 0");
    }
    if (!(eta_fan > 0.0 && eta_fan <= 1.0)) {
        throw DomainError("fan_outlet: efficiency must be in (0, 1]");
    }
    FanResult r;
    r.outlet = inflow;
    if (delta_p_rise == 0.0) {
        return r;
    }
    const double q = volumetric_gas_flow(inflow);
    r.hydraulic_power = q * delta_p_rise;
    r.electrical_power = r.hydraulic_power / eta_fan;
    r.outlet.P = inflow.P + delta_p_rise;
    if (r.hydraulic_power > 0.0 && inflow.flow.total() > 0.0) {
        const double h_out = enthalpy_flow(thermo, inflow) + r.hydraulic_power;
        const double T = thermo.temperature_from_enthalpy(h_out, r.outlet.P, inflow.flow, inflow.T_gas);
        r.outlet.T_gas = T;
        r.outlet.T_solid = T;
    }
    return r;
}

FilterResult filter_outlet(const Stream& inflow, double dust_removal, double k_dp) {
    if (!(dust_removal >= 0.0 && dust_removal <= 1.0)) {
        throw DomainError("filter_outlet: dust_removal must be in [0, 1]");
    }
    if (!(k_dp >= 0.0)) {
        throw DomainError("filter_outlet: k_dp must be >= 0");
    }
    FilterResult r;
    r.outlet = inflow;
    r.captured = inflow;
    r.captured.flow = {};
    for (auto id : chem::kAllSpecies) {
        if (chem::phase_of(id) == Phase::Solid) {
            r.captured.flow[id] = dust_removal * inflow.flow[id];
            r.outlet.flow[id] = inflow.flow[id] - r.captured.flow[id];
        }
    }
    const double q = volumetric_gas_flow(inflow);
    r.pressure_drop = k_dp * q * q;
    r.outlet.P = inflow.P - r.pressure_drop;
    return r;
}

}  // namespace clayems::units
