#pragma once

#include <span>
#include <vector>

#include "clayems/chem/kinetics.hpp"
#include "clayems/chem/thermo.hpp"
#include "clayems/units/stream.hpp"

namespace clayems::units {

struct CalcinerGeometry {
    double length = 20.0;            // m
    double diameter = 1.0;           // m
    int n_cells = 50;
    double friction_factor = 0.05;   // Darcy-Weisbach
    double h_sg = 5.0e3;             // W/(m3 K), solid-gas film coefficient per volume
    double ua_amb = 5.0;             // W/(m K), wall loss per unit length

    double area() const noexcept;
    double cell_length() const noexcept;
    double cell_volume() const noexcept;
    void validate() const;  // throws DomainError
};

struct CalcinerCellState {
    chem::Composition c;  // mol/m3 of reactor volume
    double u_s = 0.0;     // J/m3
    double u_g = 0.0;     // J/m3
    double T_s = 298.15;  // K
    double T_g = 298.15;  // K
    double P = 101325.0;  // Pa, relative to CalcinerModel::pressure_offset
};

struct CalcinerCellRates {
    chem::Composition dc_dt;  // mol/(m3 s)
    double du_s_dt = 0.0;     // W/m3
    double du_g_dt = 0.0;     // W/m3
};

struct CalcinerResiduals {
    std::vector<CalcinerCellRates> rates;
    // Per cell: volume closure (-), solid and gas internal energy closures (J/m3).
    std::vector<std::array<double, 3>> algebraic;
    std::vector<double> face_velocity;  // n_cells - 1 interior faces, m/s
    double ambient_heat = 0.0;          // W into the unit (negative = loss)
};

struct CalcinerModel {
    CalcinerGeometry geometry;
    const chem::ThermoLibrary* thermo = nullptr;
    const chem::KineticsParams* kinetics = nullptr;
    double T_amb = 298.15;
    // Cell pressures are stored relative to this value (0 = absolute). Gauge
    // storage keeps the small face pressure drops well resolved.
    double pressure_offset = 0.0;
};

// Heat capacity (J/(m3 K)) used to tie T_s to T_g when the solid holdup vanishes.
inline constexpr double kVanishingSolidRegularization = 1.0e-6;

double superficial_velocity(double delta_p, const CalcinerGeometry& geometry, double rho);

// Odd, regularized Darcy-Weisbach velocity over a segment of length `length`.
double darcy_velocity(double delta_p, double diameter, double friction_factor, double length, double rho) noexcept;

// Gas density per gas volume (kg/m3) of a cell.
double gas_density(const chem::ThermoLibrary& thermo, const CalcinerCellState& cell) noexcept;

// Finite-volume residuals of the plug-flow calciner. `inflow` enters cell 0
// through the west face; `outflow` leaves the last cell through the east
// face (signed, negative = backflow).
CalcinerResiduals calciner_residuals(std::span<const CalcinerCellState> cells, const Stream& inflow,
                                     const Stream& outflow, const CalcinerModel& model);

// Same, with several streams entering the west face (each keeps its own
// gas and solid temperatures).
CalcinerResiduals calciner_residuals(std::span<const CalcinerCellState> cells, std::span<const Stream> inflows,
                                     const Stream& outflow, const CalcinerModel& model);

// Stream leaving a cell at a given gas mass flow; solids are carried at the
// gas volumetric rate (no slip).
Stream cell_outflow(const chem::ThermoLibrary& thermo, const CalcinerCellState& cell, double gas_mass_flow,
                    double pressure_offset = 0.0);

// Fraction of the initial clay that has been converted, from a composition.
double calcination_degree(const chem::Composition& c) noexcept;

}  // namespace clayems::units
