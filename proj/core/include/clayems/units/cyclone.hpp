#pragma once

#include <array>
#include <span>

#include "clayems/chem/kinetics.hpp"
#include "clayems/chem/thermo.hpp"
#include "clayems/units/stream.hpp"

namespace clayems::units {

// Two-parameter grade-efficiency surrogate with a mass-loading overload branch.
struct SeparationParams {
    double kappa = 0.3;           // (s/m)^a
    double exponent = 1.0;        // a
    double limit_loading = 0.05;  // kg solids / kg gas
};

double separation_efficiency(double inlet_velocity, double solids_loading, const SeparationParams& params);

struct CycloneGeometry {
    double volume = 3.0;       // m3
    double inlet_area = 0.3;   // m2
    double ua_amb = 10.0;      // W/K
    SeparationParams separation;
    void validate() const;
};

struct CycloneState {
    chem::Composition holdup;  // mol
    double U = 0.0;            // J
    double T = 298.15;         // K
    double P = 101325.0;       // Pa, relative to CycloneModel::pressure_offset
};

struct CycloneResult {
    chem::Composition dn_dt;  // mol/s
    double dU_dt = 0.0;       // W
    std::array<double, 2> algebraic{};  // volume closure (-), energy closure (J)
    Stream solid_outflow;
    Stream gas_outflow;
    double efficiency = 0.0;
    double ambient_heat = 0.0;  // W into the unit
};

struct CycloneModel {
    CycloneGeometry geometry;
    const chem::ThermoLibrary* thermo = nullptr;
    const chem::KineticsParams* kinetics = nullptr;
    double T_amb = 298.15;
    double pressure_offset = 0.0;  // see CalcinerModel
};

struct CycloneOutflows {
    Stream solid_outflow;
    Stream gas_outflow;
    double efficiency = 0.0;
    double inlet_velocity = 0.0;  // m/s
};

// Outlet streams of a cyclone whose gas leaves at the given mass flow. The
// inlet velocity and solids loading are taken from the throughput and the
// holdup (at steady state they equal the inlet values), which keeps the
// outlets a function of the unit's own state.
CycloneOutflows cyclone_outflows(const CycloneState& state, double gas_outlet_mass_flow, const CycloneModel& model);

// Single well-mixed cell. The gas outlet mass flow comes from the downstream
// connector; solids leave with the gas volumetric flow and are split between
// the bottom (fraction eta) and the gas outlet. Backflow is handled by the
// caller as an extra inflow with gas_outlet_mass_flow = 0.
CycloneResult cyclone_residuals(const CycloneState& state, const Stream& inflow, double gas_outlet_mass_flow,
                                const CycloneModel& model);

// Several inlet streams; negative flows model gas leaving through the inlet.
CycloneResult cyclone_residuals(const CycloneState& state, std::span<const Stream> inflows,
                                double gas_outlet_mass_flow, const CycloneModel& model);

}  // namespace clayems::units
