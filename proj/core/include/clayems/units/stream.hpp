#pragma once

#include "clayems/chem/species.hpp"
#include "clayems/chem/thermo.hpp"

namespace clayems::units {

// Material stream through a port. Flows are signed along the port direction;
// solids and gas may arrive at different temperatures.
struct Stream {
    chem::Composition flow;  // mol/s
    double T_gas = chem::kReferenceTemperature;
    double T_solid = chem::kReferenceTemperature;
    double P = 101325.0;
};

double gas_enthalpy_flow(const chem::ThermoLibrary& thermo, const Stream& s) noexcept;    // W
double solid_enthalpy_flow(const chem::ThermoLibrary& thermo, const Stream& s) noexcept;  // W
double enthalpy_flow(const chem::ThermoLibrary& thermo, const Stream& s) noexcept;        // W
double mass_flow(const chem::ThermoLibrary& thermo, const Stream& s) noexcept;            // kg/s
double gas_mass_flow(const chem::ThermoLibrary& thermo, const Stream& s) noexcept;        // kg/s
double solid_mass_flow(const chem::ThermoLibrary& thermo, const Stream& s) noexcept;      // kg/s
double volumetric_gas_flow(const Stream& s) noexcept;                                     // m3/s

Stream scaled(Stream s, double factor) noexcept;

}  // namespace clayems::units
