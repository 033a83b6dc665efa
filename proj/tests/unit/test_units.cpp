#include <cmath>
#include <vector>

#include "clayems/chem/kinetics.hpp"
#include "clayems/chem/thermo.hpp"
#include "clayems/dae/newton.hpp"
#include "clayems/error.hpp"
#include "clayems/units/calciner.hpp"
#include "clayems/units/connector.hpp"
#include "clayems/units/cyclone.hpp"
#include "clayems/units/static_units.hpp"
#include "clayems/units/stream.hpp"
#include "doctest.h"

using namespace clayems;
using namespace clayems::units;
using chem::Composition;
using chem::Phase;
using chem::SpeciesId;

namespace {

const chem::ThermoLibrary& thermo() {
    static const chem::ThermoLibrary lib;
    return lib;
}

const chem::KineticsParams& kinetics() {
    static const chem::KineticsParams kin;
    return kin;
}

chem::ThermoLibrary constant_cp_library(double cp) {
    auto sp = chem::default_species();
    for (auto& s : sp) {
        s.cp_coeffs = {cp, 0.0, 0.0, 0.0, 0.0};
    }
    return chem::ThermoLibrary(sp);
}

// A consistent cell: gas fills the volume left by the solids at (T, P).
CalcinerCellState consistent_cell(double T_s, double T_g, double P, const Composition& solids) {
    CalcinerCellState cell;
    cell.T_s = T_s;
    cell.T_g = T_g;
    cell.P = P;
    const double phi_g = 1.0 - thermo().solid_volume(solids);
    const double ng = phi_g * P / (chem::kGasConstant * T_g);
    cell.c = solids + ng * chem::air_mole_fractions();
    cell.u_s = thermo().phase_internal_energy(Phase::Solid, T_s, P, cell.c);
    cell.u_g = thermo().phase_internal_energy(Phase::Gas, T_g, P, cell.c);
    return cell;
}

CalcinerModel calciner_model(int n_cells, double ua) {
    CalcinerModel m;
    m.geometry.n_cells = n_cells;
    m.geometry.ua_amb = ua;
    m.thermo = &thermo();
    m.kinetics = &kinetics();
    return m;
}

Stream air_stream(double mol_per_s, double T, double P = 101325.0) {
    Stream s;
    s.flow = mol_per_s * chem::air_mole_fractions();
    s.T_gas = T;
    s.T_solid = T;
    s.P = P;
    return s;
}

}  // namespace

TEST_SUITE("calciner") {
    TEST_CASE("uniform adiabatic state without reaction is at rest") {
        const auto model = calciner_model(10, 0.0);
        Composition solids;
        solids[SpeciesId::Metakaolin] = 40.0;
        const std::vector<CalcinerCellState> cells(10, consistent_cell(1050.0, 1050.0, 101325.0, solids));
        const Stream none;
        const auto res = calciner_residuals(cells, none, none, model);
        for (std::size_t k = 0; k < cells.size(); ++k) {
            for (double v : res.rates[k].dc_dt.moles) {
                CHECK(v == 0.0);
            }
            CHECK(res.rates[k].du_s_dt == 0.0);
            CHECK(res.rates[k].du_g_dt == 0.0);
            for (double a : res.algebraic[k]) {
                CHECK(std::abs(a) < 1e-9 * std::max(1.0, std::abs(cells[k].u_s)));
            }
        }
        CHECK(res.ambient_heat == 0.0);
    }

    TEST_CASE("solid-gas exchange moves energy between the phases only") {
        const auto model = calciner_model(3, 0.0);
        Composition solids;
        solids[SpeciesId::Metakaolin] = 20.0;
        std::vector<CalcinerCellState> cells(3, consistent_cell(900.0, 900.0, 101325.0, solids));
        cells[1] = consistent_cell(900.0, 960.0, 101325.0, solids);
        // Keep the pressures equal so no flow develops.
        const Stream none;
        const auto res = calciner_residuals(cells, none, none, model);
        const double j = model.geometry.h_sg * 60.0;
        CHECK(res.rates[1].du_s_dt == doctest::Approx(j).epsilon(1e-12));
        CHECK(res.rates[1].du_g_dt == doctest::Approx(-j).epsilon(1e-12));
        CHECK(std::abs(res.rates[1].du_s_dt + res.rates[1].du_g_dt) <= 1e-12 * j);
    }

    TEST_CASE("advected pulse: the cell balances telescope to the boundary fluxes") {
        const int n = 50;
        const auto model = calciner_model(n, 0.0);
        std::vector<CalcinerCellState> cells;
        for (int k = 0; k < n; ++k) {
            Composition solids;
            solids[SpeciesId::Metakaolin] = (k >= 10 && k < 15) ? 80.0 : 1.0;
            // Falling pressure drives a forward flow through every face.
            cells.push_back(consistent_cell(700.0, 700.0, 102000.0 - 10.0 * k, solids));
        }
        const Stream in = cell_outflow(thermo(), cells.front(), 1.5);
        const Stream out = cell_outflow(thermo(), cells.back(), 1.5);
        const auto res = calciner_residuals(cells, in, out, model);
        const double vol = model.geometry.cell_volume();
        const double dt = 1.0;
        for (auto id : chem::kAllSpecies) {
            double before = 0.0, after = 0.0;
            for (int k = 0; k < n; ++k) {
                before += cells[k].c[id] * vol;
                after += (cells[k].c[id] + dt * res.rates[k].dc_dt[id]) * vol;
            }
            if (id == SpeciesId::Kaolinite) {
                CHECK(after == 0.0);
                continue;
            }
            const double expected = before + dt * (in.flow[id] - out.flow[id]);
            CHECK(std::abs(after - expected) <= 1e-12 * before);
        }
        for (double v : res.face_velocity) {
            CHECK(v > 0.0);
        }
    }

    TEST_CASE("calcination degree") {
        Composition c;
        CHECK(calcination_degree(c) == 0.0);
        c[SpeciesId::Kaolinite] = 1.0;
        c[SpeciesId::Metakaolin] = 3.0;
        CHECK(calcination_degree(c) == 0.75);
    }

    TEST_CASE("cell count must match the geometry") {
        const auto model = calciner_model(5, 0.0);
        const std::vector<CalcinerCellState> cells(4);
        CHECK_THROWS_AS(calciner_residuals(cells, Stream{}, Stream{}, model), StructuralError);
    }
}

TEST_SUITE("darcy-weisbach") {
    TEST_CASE("worked value and scaling") {
        CalcinerGeometry g;
        g.friction_factor = 0.02;
        g.length = 10.0;
        g.diameter = 0.5;
        CHECK(superficial_velocity(0.0, g, 1.0) == 0.0);
        CHECK(superficial_velocity(100.0, g, 1.0) == doctest::Approx(std::sqrt(500.0)).epsilon(1e-14));
        CHECK(superficial_velocity(100.0, g, 1.0) == doctest::Approx(22.3607).epsilon(1e-6));
        CHECK(superficial_velocity(400.0, g, 1.0) == doctest::Approx(2.0 * superficial_velocity(100.0, g, 1.0)));
    }

    TEST_CASE("backflow and bad density are rejected") {
        const CalcinerGeometry g;
        CHECK_THROWS_AS(superficial_velocity(-1.0, g, 1.0), DomainError);
        CHECK_THROWS_AS(superficial_velocity(1.0, g, 0.0), DomainError);
    }
}

TEST_SUITE("cyclone") {
    TEST_CASE("grade efficiency") {
        SeparationParams p;
        p.kappa = 0.2;
        p.exponent = 1.0;
        p.limit_loading = 1.0;
        CHECK(separation_efficiency(0.0, 0.1, p) == 0.0);
        CHECK(separation_efficiency(10.0, 0.1, p) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
        CHECK(separation_efficiency(10.0, 0.1, p) == doctest::Approx(0.8647).epsilon(1e-4));
        double prev = -1.0;
        for (double v = 0.0; v <= 40.0; v += 0.5) {
            const double eta = separation_efficiency(v, 0.1, p);
            CHECK(eta >= prev);
            CHECK(eta >= 0.0);
            CHECK(eta <= 1.0);
            prev = eta;
        }
        // Overload: more solids than the limit loading separate better.
        CHECK(separation_efficiency(10.0, 5.0, p) > separation_efficiency(10.0, 0.5, p));
    }

    // Cyclone with 2 m3 of air at 800 K and a solids holdup.
    struct Rig {
        CycloneModel model;
        CycloneState state;
        Rig(double kappa, double limit_loading = 0.05) {
            model.geometry.volume = 2.0;
            model.geometry.inlet_area = 0.2;
            model.geometry.ua_amb = 0.0;
            model.geometry.separation.kappa = kappa;
            model.geometry.separation.limit_loading = limit_loading;
            model.thermo = &thermo();
            model.kinetics = &kinetics();
            state.T = 800.0;
            state.P = 101325.0;
            const double ng = 2.0 * state.P / (chem::kGasConstant * state.T);
            state.holdup = ng * chem::air_mole_fractions();
            state.holdup[SpeciesId::Metakaolin] = 5.0;
            state.U = thermo().internal_energy(state.T, state.P, state.holdup);
        }
    };

    TEST_CASE("perfect separation leaves the gas outlet solid-free") {
        Rig rig(1e6);
        const auto r = cyclone_residuals(rig.state, air_stream(10.0, 800.0), 0.3, rig.model);
        CHECK(r.efficiency == 1.0);
        CHECK(r.gas_outflow.flow.total(Phase::Solid) == 0.0);
        CHECK(r.solid_outflow.flow.total(Phase::Solid) > 0.0);
    }

    TEST_CASE("no separation leaves the bottom outlet empty") {
        // Zero limit loading switches the overload branch off.
        Rig rig(0.0, 0.0);
        const auto r = cyclone_residuals(rig.state, air_stream(10.0, 800.0), 0.3, rig.model);
        CHECK(r.efficiency == 0.0);
        CHECK(r.solid_outflow.flow.total() == 0.0);
        CHECK(r.gas_outflow.flow.total(Phase::Solid) > 0.0);
    }

    TEST_CASE("steady holdup closes the solids balance") {
        Rig rig(0.3);
        Stream in = air_stream(10.0, 800.0);
        in.flow[SpeciesId::Metakaolin] = 0.8;
        const double F = gas_mass_flow(thermo(), in);
        const double gas_total = rig.state.holdup.total(Phase::Gas);
        // Solve dn/dt = 0 for the holdup at fixed T and P.
        auto fn = [&](std::span<const double> z, std::span<double> r) {
            CycloneState s = rig.state;
            for (std::size_t i = 0; i < chem::kNumSpecies; ++i) {
                s.holdup.moles[i] = z[i];
            }
            const auto res = cyclone_residuals(s, in, F, rig.model);
            for (std::size_t i = 0; i < chem::kNumSpecies; ++i) {
                r[i] = res.dn_dt.moles[i];
            }
        };
        const std::vector<double> guess(rig.state.holdup.moles.begin(), rig.state.holdup.moles.end());
        dae::NewtonConfig cfg;
        cfg.tol = 1e-13;
        const auto sol = dae::newton_solve(fn, guess, cfg);
        CycloneState s = rig.state;
        for (std::size_t i = 0; i < chem::kNumSpecies; ++i) {
            s.holdup.moles[i] = sol.z[i];
        }
        const auto r = cyclone_residuals(s, in, F, rig.model);
        const double solids_in = in.flow.total(Phase::Solid);
        const double solids_out = r.solid_outflow.flow.total(Phase::Solid) + r.gas_outflow.flow.total(Phase::Solid);
        CHECK(std::abs(solids_out - solids_in) <= 1e-10 * solids_in);
        CHECK(s.holdup.total(Phase::Gas) == doctest::Approx(gas_total).epsilon(0.5));
        CHECK(r.efficiency > 0.0);
        CHECK(r.efficiency < 1.0);
    }
}

TEST_SUITE("connector") {
    TEST_CASE("worked value, zero and linearity") {
        CHECK(connector_flow(2.0, 1.0, 1.0, 1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
        CHECK(connector_flow(1.0e5, 1.0e5, 300.0, 0.01) == 0.0);
        CHECK(connector_flow(1.2e5, 1.0e5, 300.0, 0.02) ==
              doctest::Approx(2.0 * connector_flow(1.2e5, 1.0e5, 300.0, 0.01)).epsilon(1e-14));
    }

    TEST_CASE("odd in the pressure difference and continuous at zero") {
        for (double dp : {1e-4, 0.05, 0.1, 0.2, 3.0, 500.0}) {
            CHECK(connector_flow(1e5 + dp, 1e5, 400.0, 0.01) == -connector_flow(1e5, 1e5 + dp, 400.0, 0.01));
        }
        const double eps = kFlowSmoothingPa;
        const double inside = connector_flow(1e5 + eps * (1.0 - 1e-9), 1e5, 400.0, 0.01);
        const double outside = connector_flow(1e5 + eps * (1.0 + 1e-9), 1e5, 400.0, 0.01);
        CHECK(outside == doctest::Approx(inside).epsilon(1e-7));
        CHECK(std::abs(connector_flow(1e5 + 1e-9, 1e5, 400.0, 0.01)) < 1e-7);
    }

    TEST_CASE("pressure drop inverts the flow law") {
        for (double F : {-2.0, -0.01, 0.0, 0.003, 1.0, 4.0}) {
            const double dp = connector_pressure_drop(F, 2.0e5, 700.0, 0.01);
            CHECK(connector_flow_dp(dp, 2.0e5, 700.0, 0.01) == doctest::Approx(F).epsilon(1e-10));
        }
    }

    TEST_CASE("non-positive resistance is rejected") {
        Connector c;
        c.resistance = 0.0;
        CHECK_THROWS(c.validate());
    }
}

TEST_SUITE("static units") {
    TEST_CASE("EHGG at zero power passes the stream through") {
        const Stream in = air_stream(5.0, 600.0);
        const Stream out = ehgg_outlet(thermo(), in, 0.0, 0.95);
        CHECK(out.T_gas == in.T_gas);
        CHECK(out.P == in.P);
        CHECK(out.flow.moles == in.flow.moles);
    }

    TEST_CASE("EHGG enthalpy balance at constant cp") {
        const auto lib = constant_cp_library(29.1);
        const Stream in = air_stream(1000.0 / 29.1, 600.0);
        const Stream out = ehgg_outlet(lib, in, 1.0e5, 0.95);
        CHECK(out.T_gas - in.T_gas == doctest::Approx(95.0).epsilon(1e-10));
        CHECK(out.flow.moles == in.flow.moles);
        CHECK(out.P == in.P);
        const Stream half = ehgg_outlet(lib, scaled(in, 0.5), 1.0e5, 0.95);
        CHECK(half.T_gas - in.T_gas == doctest::Approx(190.0).epsilon(1e-10));
    }

    TEST_CASE("halving the flow roughly doubles the rise with real cp") {
        const Stream in = air_stream(30.0, 600.0);
        const double d1 = ehgg_outlet(thermo(), in, 1.0e5, 0.95).T_gas - 600.0;
        const double d2 = ehgg_outlet(thermo(), scaled(in, 0.5), 1.0e5, 0.95).T_gas - 600.0;
        CHECK(d2 / d1 == doctest::Approx(2.0).epsilon(0.05));
    }

    TEST_CASE("EHGG overheating and bad arguments") {
        const Stream in = air_stream(1.0, 600.0);
        CHECK_THROWS_AS(ehgg_outlet(thermo(), in, 1.0e7, 0.95), RangeError);
        CHECK_THROWS_AS(ehgg_outlet(thermo(), in, 1.0e3, 1.5), DomainError);
        CHECK_THROWS_AS(ehgg_outlet(thermo(), in, -1.0, 0.9), DomainError);
        CHECK_THROWS_AS(ehgg_outlet(thermo(), Stream{}, 1.0e3, 0.9), DomainError);
    }

    TEST_CASE("fan power") {
        const double T = 500.0, P = 101325.0;
        const Stream in = air_stream(2.0 * P / (chem::kGasConstant * T), T, P);
        CHECK(volumetric_gas_flow(in) == doctest::Approx(2.0).epsilon(1e-14));
        const auto off = fan_outlet(thermo(), in, 0.0, 0.8);
        CHECK(off.electrical_power == 0.0);
        CHECK(off.outlet.P == in.P);
        CHECK(off.outlet.T_gas == in.T_gas);
        const auto on = fan_outlet(thermo(), in, 1000.0, 0.8);
        CHECK(on.electrical_power == doctest::Approx(2500.0).epsilon(1e-12));
        CHECK(on.outlet.P == in.P + 1000.0);
        CHECK(on.outlet.T_gas > in.T_gas);
        const auto twice = fan_outlet(thermo(), in, 2000.0, 0.8);
        CHECK(twice.electrical_power == doctest::Approx(2.0 * on.electrical_power).epsilon(1e-12));
    }

    TEST_CASE("filter") {
        Stream in = air_stream(10.0, 450.0);
        in.flow[SpeciesId::Metakaolin] = 0.2;
        in.flow[SpeciesId::Kaolinite] = 0.1;
        const auto all = filter_outlet(in, 1.0, 5.0);
        CHECK(all.outlet.flow.total(Phase::Solid) == 0.0);
        CHECK(all.captured.flow.total(Phase::Solid) == doctest::Approx(0.3));
        CHECK(filter_outlet(Stream{}, 0.9, 5.0).pressure_drop == 0.0);
        const double dp1 = filter_outlet(in, 0.9, 5.0).pressure_drop;
        const double dp2 = filter_outlet(scaled(in, 2.0), 0.9, 5.0).pressure_drop;
        CHECK(dp2 == doctest::Approx(4.0 * dp1).epsilon(1e-13));
        CHECK_THROWS_AS(filter_outlet(in, 1.2, 5.0), DomainError);
    }
}
