#include "clayems/units/stream.hpp"

namespace clayems::units {

using chem::Phase;

double gas_enthalpy_flow(const chem::ThermoLibrary& thermo, const Stream& s) noexcept {
    return thermo.phase_enthalpy(Phase::Gas, s.T_gas, s.flow);
}

double solid_enthalpy_flow(const chem::ThermoLibrary& thermo, const Stream& s) noexcept {
    return thermo.phase_enthalpy(Phase::Solid, s.T_solid, s.flow);
}

double enthalpy_flow(const chem::ThermoLibrary& thermo, const Stream& s) noexcept {
    return gas_enthalpy_flow(thermo, s) + solid_enthalpy_flow(thermo, s);
}

double mass_flow(const chem::ThermoLibrary& thermo, const Stream& s) noexcept { return thermo.mass(s.flow); }

double gas_mass_flow(const chem::ThermoLibrary& thermo, const Stream& s) noexcept {
    return thermo.mass(s.flow.only(Phase::Gas));
}

double solid_mass_flow(const chem::ThermoLibrary& thermo, const Stream& s) noexcept {
    return thermo.mass(s.flow.only(Phase::Solid));
}

double volumetric_gas_flow(const Stream& s) noexcept {
    return s.flow.total(Phase::Gas) * chem::kGasConstant * s.T_gas / s.P;
}

Stream scaled(Stream s, double factor) noexcept {
    s.flow *= factor;
    return s;
}

}  // namespace clayems::units
