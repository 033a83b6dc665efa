#include "clayems/units/cyclone.hpp"

#include <algorithm>
#include <cmath>

#include "clayems/error.hpp"

namespace clayems::units {

using chem::Composition;
using chem::Phase;

double separation_efficiency(double inlet_velocity, double solids_loading, const SeparationParams& params) {
    const double v = std::max(inlet_velocity, 0.0);
    const double load = std::max(solids_loading, 0.0);
    double eta = 1.0 - std::exp(-params.kappa * std::pow(v, params.exponent));
    // Above the limit loading the excess drops out at the inlet.
    if (v > 0.0 && params.limit_loading > 0.0 && load > params.limit_loading) {
        const double passing = params.limit_loading / load;
        eta = (1.0 - passing) + passing * eta;
    }
    return std::clamp(eta, 0.0, 1.0);
}

void CycloneGeometry::validate() const {
    if (!(volume > 0.0) || !(inlet_area > 0.0)) {
        throw DomainError("cyclone: volume and inlet area must be > 0");
    }
    if (!(ua_amb >= 0.0)) {
        throw DomainError("cyclone: ua_amb must be >= 0");
    }
    if (!(separation.kappa >= 0.0) || !(separation.exponent > 0.0) || !(separation.limit_loading >= 0.0)) {
        throw DomainError("cyclone: invalid separation parameters");
    }
}

CycloneResult cyclone_residuals(const CycloneState& state, const Stream& inflow, double gas_outlet_mass_flow,
                                const CycloneModel& model) {
    return cyclone_residuals(state, std::span<const Stream>(&inflow, 1), gas_outlet_mass_flow, model);
}

CycloneOutflows cyclone_outflows(const CycloneState& state, double gas_outlet_mass_flow,
                                 const CycloneModel& model) {
    const auto& thermo = *model.thermo;
    const auto& geo = model.geometry;
    CycloneOutflows out;
    out.gas_outflow.T_gas = out.gas_outflow.T_solid = state.T;
    out.solid_outflow.T_gas = out.solid_outflow.T_solid = state.T;
    out.gas_outflow.P = out.solid_outflow.P = state.P + model.pressure_offset;

    const Composition gas = state.holdup.only(Phase::Gas);
    const Composition solid = state.holdup.only(Phase::Solid);
    const double gas_mass = thermo.mass(gas);
    const double F = std::max(gas_outlet_mass_flow, 0.0);
    if (!(F > 0.0) || !(gas_mass > 0.0)) {
        return out;
    }
    const double gas_volume = geo.volume - thermo.solid_volume(solid);
    const double q = F / gas_mass * gas_volume;
    out.inlet_velocity = q / geo.inlet_area;
    const double loading = std::max(thermo.mass(solid), 0.0) / gas_mass;
    out.efficiency = separation_efficiency(out.inlet_velocity, loading, geo.separation);

    // Fraction of the holdup swept per second.
    const double sweep = F / gas_mass;
    const Composition solids_out = sweep * solid;
    out.gas_outflow.flow = sweep * gas + (1.0 - out.efficiency) * solids_out;
    out.solid_outflow.flow = out.efficiency * solids_out;
    return out;
}

CycloneResult cyclone_residuals(const CycloneState& state, std::span<const Stream> inflows,
                                double gas_outlet_mass_flow, const CycloneModel& model) {
    const auto& thermo = *model.thermo;
    const auto& geo = model.geometry;
    CycloneResult r;

    Composition in_flow;
    double h_in = 0.0;
    for (const auto& s : inflows) {
        in_flow += s.flow;
        h_in += enthalpy_flow(thermo, s);
    }
    auto out = cyclone_outflows(state, gas_outlet_mass_flow, model);
    r.efficiency = out.efficiency;
    r.gas_outflow = out.gas_outflow;
    r.solid_outflow = out.solid_outflow;

    const Composition gas = state.holdup.only(Phase::Gas);
    const Composition solid = state.holdup.only(Phase::Solid);

    const double k_rxn = chem::rate_constant(*model.kinetics, state.T);
    const Composition R = chem::production_rates(k_rxn, (1.0 / geo.volume) * state.holdup);

    for (auto id : chem::kAllSpecies) {
        r.dn_dt[id] = in_flow[id] - r.gas_outflow.flow[id] - r.solid_outflow.flow[id] + geo.volume * R[id];
    }
    r.ambient_heat = geo.ua_amb * (model.T_amb - state.T);
    r.dU_dt = h_in - enthalpy_flow(thermo, r.gas_outflow) -
              enthalpy_flow(thermo, r.solid_outflow) + r.ambient_heat;

    const double ng = gas.total();
    const double P = state.P + model.pressure_offset;
    r.algebraic[0] = (thermo.solid_volume(solid) + ng * chem::kGasConstant * state.T / P) / geo.volume - 1.0;
    r.algebraic[1] = thermo.phase_internal_energy(Phase::Solid, state.T, P, state.holdup) +
                     thermo.phase_internal_energy(Phase::Gas, state.T, P, state.holdup) - state.U;
    return r;
}

}  // namespace clayems::units
