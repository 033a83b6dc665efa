#include "clayems/units/calciner.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "clayems/error.hpp"
#include "clayems/units/connector.hpp"

namespace clayems::units {

using chem::Composition;
using chem::Phase;
using chem::SpeciesId;

double CalcinerGeometry::area() const noexcept { return std::numbers::pi * diameter * diameter / 4.0; }
double CalcinerGeometry::cell_length() const noexcept { return length / n_cells; }
double CalcinerGeometry::cell_volume() const noexcept { return area() * cell_length(); }

void CalcinerGeometry::validate() const {
    if (!(length > 0.0) || !(diameter > 0.0)) {
        throw DomainError("calciner geometry: length and diameter must be > 0");
    }
    if (n_cells < 3) {
        throw DomainError("calciner geometry: n_cells must be >= 3");
    }
    if (!(friction_factor > 0.0) || !(h_sg > 0.0)) {
        throw DomainError("calciner geometry: friction factor and h_sg must be > 0");
    }
    // UA_amb = 0 is accepted for adiabatic studies.
    if (!(ua_amb >= 0.0)) {
        throw DomainError("calciner geometry: ua_amb must be >= 0");
    }
}

double superficial_velocity(double delta_p, const CalcinerGeometry& geometry, double rho) {
    if (!(rho > 0.0)) {
        throw DomainError("superficial_velocity: density must be > 0");
    }
    if (delta_p < 0.0) {
        throw DomainError("superficial_velocity: negative pressure drop (backflow) is not modeled");
    }
    return std::sqrt(2.0 * delta_p * geometry.diameter /
                     (geometry.friction_factor * geometry.length * rho));
}

double darcy_velocity(double delta_p, double diameter, double friction_factor, double length,
                      double rho) noexcept {
    return std::sqrt(2.0 * diameter / (friction_factor * length * rho)) * signed_sqrt(delta_p, kFlowSmoothingPa);
}

double gas_density(const chem::ThermoLibrary& thermo, const CalcinerCellState& cell) noexcept {
    const double phi_g = 1.0 - thermo.solid_volume(cell.c);
    return thermo.mass(cell.c.only(Phase::Gas)) / phi_g;
}

Stream cell_outflow(const chem::ThermoLibrary& thermo, const CalcinerCellState& cell, double gas_mass_flow,
                    double pressure_offset) {
    // Reactor-volume flow carrying every species at the common velocity.
    const double rho_vol = thermo.mass(cell.c.only(Phase::Gas));
    Stream s;
    s.flow = (gas_mass_flow / rho_vol) * cell.c;
    s.T_gas = cell.T_g;
    s.T_solid = cell.T_s;
    s.P = cell.P + pressure_offset;
    return s;
}

double calcination_degree(const Composition& c) noexcept {
    const double clay = c[SpeciesId::Kaolinite] + c[SpeciesId::Metakaolin];
    return clay > 0.0 ? c[SpeciesId::Metakaolin] / clay : 0.0;
}

CalcinerResiduals calciner_residuals(std::span<const CalcinerCellState> cells, const Stream& inflow,
                                     const Stream& outflow, const CalcinerModel& model) {
    return calciner_residuals(cells, std::span<const Stream>(&inflow, 1), outflow, model);
}

CalcinerResiduals calciner_residuals(std::span<const CalcinerCellState> cells, std::span<const Stream> inflows,
                                     const Stream& outflow, const CalcinerModel& model) {
    const auto& geo = model.geometry;
    const auto& thermo = *model.thermo;
    const std::size_t n = cells.size();
    if (n != static_cast<std::size_t>(geo.n_cells)) {
        throw StructuralError("calciner_residuals: cell count does not match geometry");
    }
    const double area = geo.area();
    const double dz = geo.cell_length();
    const double vol = geo.cell_volume();

    CalcinerResiduals res;
    res.rates.resize(n);
    res.algebraic.resize(n);
    res.face_velocity.resize(n - 1);

    // Face streams: index k is the west face of cell k, index n the outlet.
    std::vector<Stream> faces(n + 1);
    faces[n] = outflow;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const auto& a = cells[k];
        const auto& b = cells[k + 1];
        const double rho = 0.5 * (gas_density(thermo, a) + gas_density(thermo, b));
        const double v = darcy_velocity(a.P - b.P, geo.diameter, geo.friction_factor, dz, rho);
        res.face_velocity[k] = v;
        const auto& up = v >= 0.0 ? a : b;
        Stream s;
        s.flow = (v * area) * up.c;
        s.T_gas = up.T_g;
        s.T_solid = up.T_s;
        s.P = up.P + model.pressure_offset;
        faces[k + 1] = s;
    }

    std::vector<double> h_gas(n + 1), h_sol(n + 1);
    for (const auto& in : inflows) {
        faces[0].flow += in.flow;
        h_gas[0] += gas_enthalpy_flow(thermo, in);
        h_sol[0] += solid_enthalpy_flow(thermo, in);
    }
    for (std::size_t f = 1; f <= n; ++f) {
        h_gas[f] = gas_enthalpy_flow(thermo, faces[f]);
        h_sol[f] = solid_enthalpy_flow(thermo, faces[f]);
    }

    for (std::size_t k = 0; k < n; ++k) {
        const auto& cell = cells[k];
        auto& rate = res.rates[k];

        const double k_rxn = chem::rate_constant(*model.kinetics, cell.T_s);
        const Composition R = chem::production_rates(k_rxn, cell.c);
        for (auto id : chem::kAllSpecies) {
            rate.dc_dt[id] = (faces[k].flow[id] - faces[k + 1].flow[id]) / vol + R[id];
        }

        // Water released by the solid carries its enthalpy at T_s into the gas.
        const double j_rxn = R[SpeciesId::WaterVapor] * thermo.molar_enthalpy(SpeciesId::WaterVapor, cell.T_s);
        const double j_sg = geo.h_sg * (cell.T_g - cell.T_s);

        const double phi_s = thermo.solid_volume(cell.c);
        const double phi_g = 1.0 - phi_s;
        const double q_s = geo.ua_amb * dz * phi_s * (model.T_amb - cell.T_s);
        const double q_g = geo.ua_amb * dz * phi_g * (model.T_amb - cell.T_g);
        res.ambient_heat += q_s + q_g;

        rate.du_s_dt = (h_sol[k] - h_sol[k + 1]) / vol + j_sg - j_rxn + q_s / vol;
        rate.du_g_dt = (h_gas[k] - h_gas[k + 1]) / vol - j_sg + j_rxn + q_g / vol;

        const double ng = cell.c.total(Phase::Gas);
        const double P = cell.P + model.pressure_offset;
        res.algebraic[k][0] = phi_s + ng * chem::kGasConstant * cell.T_g / P - 1.0;
        res.algebraic[k][1] = thermo.phase_internal_energy(Phase::Solid, cell.T_s, P, cell.c) - cell.u_s +
                              kVanishingSolidRegularization * (cell.T_s - cell.T_g);
        res.algebraic[k][2] = thermo.phase_internal_energy(Phase::Gas, cell.T_g, P, cell.c) - cell.u_g;
    }
    return res;
}

}  // namespace clayems::units
