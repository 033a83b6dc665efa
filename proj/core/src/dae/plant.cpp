#include "clayems/dae/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clayems/dae/newton.hpp"
#include "clayems/error.hpp"
#include "clayems/units/connector.hpp"
#include "clayems/units/static_units.hpp"

namespace clayems::dae {

using chem::Composition;
using chem::Phase;
using chem::SpeciesId;
using units::CalcinerCellState;
using units::CycloneState;
using units::Stream;

namespace {

// W/K; heater shell conductance to ambient. Negligible in operation, it
// pins the EHGG outlet temperature when the loop carries no gas.
constexpr double kEhggShellConductance = 1.0e-3;

Stream negated(Stream s) {
    s.flow *= -1.0;
    return s;
}

void check_positive(double v, const char* what) {
    if (!(v > 0.0)) {
        throw ValidationError(std::string("plant: ") + what + " must be > 0");
    }
}

void check_fraction(double v, const char* what) {
    if (!(v > 0.0 && v <= 1.0)) {
        throw ValidationError(std::string("plant: ") + what + " must be in (0, 1]");
    }
}

// Polynomial enthalpies have spurious roots far outside the fitted range,
// so every temperature unknown is confined to it.
void check_temperature(double T, const char* what) {
    if (!(T >= chem::kMinTemperature && T <= chem::kMaxTemperature)) {
        throw RangeError(std::string("plant: ") + what + " temperature outside [250, 2000] K");
    }
}

void check_range(const ActuatorRange& r, const char* what) {
    if (!(r.min >= 0.0) || !(r.max >= r.min)) {
        throw ValidationError(std::string("plant: ") + what + " range must satisfy 0 <= min <= max");
    }
}

}  // namespace

void PlantDescription::validate() const {
    try {
        calciner.validate();
        for (const auto& c : cyclones) {
            c.validate();
        }
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
    check_positive(c_calciner_separator, "c_calciner_separator");
    check_positive(c_separator_preheater2, "c_separator_preheater2");
    check_positive(c_preheater2_preheater1, "c_preheater2_preheater1");
    check_positive(c_loop, "c_loop");
    if (c_vent) {
        check_positive(*c_vent, "c_vent");
    }
    check_fraction(ehgg.efficiency, "ehgg efficiency");
    check_fraction(fan.efficiency, "fan efficiency");
    if (!(filter.dust_removal >= 0.0 && filter.dust_removal <= 1.0) || !(filter.k_dp >= 0.0)) {
        throw ValidationError("plant: filter needs dust_removal in [0, 1] and k_dp >= 0");
    }
    if (!(ehgg.p_min >= 0.0) || !(ehgg.p_max >= ehgg.p_min)) {
        throw ValidationError("plant: EHGG power range must satisfy 0 <= p_min <= p_max");
    }
    if (!(fan.dp_min >= 0.0) || !(fan.dp_max >= fan.dp_min)) {
        throw ValidationError("plant: fan pressure range must satisfy 0 <= dp_min <= dp_max");
    }
    check_range(clay_feed, "clay_feed");
    check_range(fresh_air, "fresh_air");
    check_positive(ambient_pressure, "ambient_pressure");
    if (topology == PlantTopology::CalcinerOnly) {
        check_positive(outlet_pressure, "outlet_pressure");
        check_positive(c_outlet, "c_outlet");
        if (!boundary_inflow.flow.non_negative()) {
            throw ValidationError("plant: boundary inflow must be non-negative");
        }
    }
}

Composition air_flow(const chem::ThermoLibrary& thermo, double mass_flow) {
    const Composition y = chem::air_mole_fractions();
    const double m_air = thermo.mass(y);
    return (mass_flow / m_air) * y;
}

PlantModel::PlantModel(PlantDescription desc, chem::Chemistry chemistry)
    : desc_(std::move(desc)), chem_(std::move(chemistry)) {
    desc_.validate();
}

std::size_t PlantModel::n_differential() const {
    return 7 * n_cells() + (is_loop() ? 6 * kNumCyclones : 0) + quad::kCount;
}

std::size_t PlantModel::n_algebraic() const {
    return 3 * n_cells() + (is_loop() ? 2 * kNumCyclones + 6 : 1);
}

void PlantModel::set_inputs(const PlantInputs& u, const PlantDisturbances& d) {
    u_ = u;
    d_ = d;
}

void PlantModel::residuals(double /*t*/, std::span<const double> x, std::span<const double> y,
                           std::span<double> f, std::span<double> g) const {
    evaluate(x, y, u_, d_, f, g, nullptr);
}

void PlantModel::evaluate(std::span<const double> x, std::span<const double> y, const PlantInputs& u,
                          const PlantDisturbances& d, std::span<double> f, std::span<double> g,
                          PlantDiagnostics* diag) const {
    if (x.size() != n_differential() || y.size() != n_algebraic() || f.size() != x.size() ||
        g.size() != y.size()) {
        throw StructuralError("plant: state dimensions do not match the plant description");
    }
    const auto& thermo = chem_.thermo;
    const std::size_t n = n_cells();

    std::vector<CalcinerCellState> cells(n);
    for (std::size_t k = 0; k < n; ++k) {
        auto& c = cells[k];
        const std::size_t xi = x_cell(k);
        std::copy_n(x.begin() + xi, chem::kNumSpecies, c.c.moles.begin());
        c.u_s = x[xi + 5];
        c.u_g = x[xi + 6];
        c.T_s = y[y_cell(k)];
        c.T_g = y[y_cell(k) + 1];
        c.P = y[y_cell(k) + 2];
        check_temperature(c.T_s, "calciner solid");
        check_temperature(c.T_g, "calciner gas");
    }
    // Pressures in y are gauge values relative to the ambient pressure.
    const double P0 = desc_.ambient_pressure;
    const units::CalcinerModel cal_model{desc_.calciner, &thermo, &chem_.kinetics, d.T_amb, P0};

    std::fill(f.begin(), f.end(), 0.0);
    double* q = f.data() + x_quad();
    auto add_in = [&](const Stream& s) {
        for (std::size_t i = 0; i < chem::kNumSpecies; ++i) {
            q[quad::kIn + i] += s.flow.moles[i];
        }
        q[quad::kEnergyIn] += units::enthalpy_flow(thermo, s);
    };
    auto add_out = [&](const Stream& s) {
        for (std::size_t i = 0; i < chem::kNumSpecies; ++i) {
            q[quad::kOut + i] += s.flow.moles[i];
        }
        q[quad::kEnergyOut] += units::enthalpy_flow(thermo, s);
    };
    auto write_cells = [&](const units::CalcinerResiduals& res) {
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t xi = x_cell(k);
            const auto& r = res.rates[k];
            std::copy(r.dc_dt.moles.begin(), r.dc_dt.moles.end(), f.begin() + xi);
            f[xi + 5] = r.du_s_dt;
            f[xi + 6] = r.du_g_dt;
            for (std::size_t a = 0; a < 3; ++a) {
                g[y_cell(k) + a] = res.algebraic[k][a];
            }
        }
    };

    if (!is_loop()) {
        const double F_out = y[y_flows()];
        const auto& last = cells[n - 1];
        Stream out;
        if (F_out >= 0.0) {
            out = units::cell_outflow(thermo, last, F_out, P0);
        } else {
            out.flow = -1.0 * air_flow(thermo, -F_out);
            out.T_gas = out.T_solid = d.T_amb;
            out.P = desc_.outlet_pressure;
        }
        const auto res = units::calciner_residuals(cells, desc_.boundary_inflow, out, cal_model);
        write_cells(res);
        add_in(desc_.boundary_inflow);
        add_out(out);
        q[quad::kEnergyOut] -= res.ambient_heat;
        g[y_flows()] = units::connector_pressure_drop(F_out, last.P + P0 + desc_.outlet_pressure, last.T_g,
                                                      desc_.c_outlet) -
                       (last.P - (desc_.outlet_pressure - P0));
        if (diag) {
            diag->cells = cells;
            for (auto& c : diag->cells) {
                c.P += P0;
            }
            diag->F_calciner_separator = F_out;
            diag->ambient_heat = res.ambient_heat;
            diag->enthalpy_in = units::enthalpy_flow(thermo, desc_.boundary_inflow);
            diag->enthalpy_out = units::enthalpy_flow(thermo, out);
            diag->outlet_calcination = units::calcination_degree(last.c);
            diag->product_mass_flow = units::solid_mass_flow(thermo, out);
            diag->product_metakaolin = out.flow[SpeciesId::Metakaolin] * thermo.species(SpeciesId::Metakaolin).molar_mass;
        }
        return;
    }

    std::array<CycloneState, kNumCyclones> cyc;
    std::array<units::CycloneModel, kNumCyclones> cyc_model;
    for (std::size_t j = 0; j < kNumCyclones; ++j) {
        const std::size_t xi = x_cyclone(j);
        std::copy_n(x.begin() + xi, chem::kNumSpecies, cyc[j].holdup.moles.begin());
        cyc[j].U = x[xi + 5];
        cyc[j].T = y[y_cyclone(j)];
        cyc[j].P = y[y_cyclone(j) + 1];
        check_temperature(cyc[j].T, "cyclone");
        cyc_model[j] = units::CycloneModel{desc_.cyclones[j], &thermo, &chem_.kinetics, d.T_amb, P0};
    }
    constexpr std::size_t P1 = static_cast<std::size_t>(CycloneRole::Preheater1);
    constexpr std::size_t P2 = static_cast<std::size_t>(CycloneRole::Preheater2);
    constexpr std::size_t SEP = static_cast<std::size_t>(CycloneRole::Separator);

    const std::size_t yf = y_flows();
    const double F_a = y[yf];
    const double F_b = y[yf + 1];
    const double F_c = y[yf + 2];
    const double F_loop = y[yf + 3];
    const double F_vent = y[yf + 4];
    const double T_e = y[y_ehgg()];
    check_temperature(T_e, "EHGG outlet");

    auto gas_from = [&](std::size_t j, double mass) {
        Stream s;
        s.T_gas = s.T_solid = cyc[j].T;
        s.P = cyc[j].P + P0;
        const Composition gas = cyc[j].holdup.only(Phase::Gas);
        const double gm = thermo.mass(gas);
        if (gm > 0.0) {
            s.flow = (mass / gm) * gas;
        }
        return s;
    };
    auto ambient_air = [&](double mass) {
        Stream s;
        s.flow = air_flow(thermo, mass);
        s.T_gas = s.T_solid = d.T_amb;
        s.P = desc_.ambient_pressure;
        return s;
    };

    const double out_sep = std::max(F_b, 0.0);
    const double out_p2 = std::max(F_c, 0.0);
    const double out_p1 = std::max(F_loop, 0.0) + std::max(F_vent, 0.0);
    const auto o_sep = units::cyclone_outflows(cyc[SEP], out_sep, cyc_model[SEP]);
    const auto o_p2 = units::cyclone_outflows(cyc[P2], out_p2, cyc_model[P2]);
    const auto o_p1 = units::cyclone_outflows(cyc[P1], out_p1, cyc_model[P1]);

    std::array<std::vector<Stream>, kNumCyclones> cyc_in;
    std::vector<Stream> cal_in;
    Stream cal_out;

    // Calciner -> separation cyclone.
    if (F_a >= 0.0) {
        cal_out = units::cell_outflow(thermo, cells[n - 1], F_a, P0);
        cyc_in[SEP].push_back(cal_out);
    } else {
        const Stream back = gas_from(SEP, -F_a);
        cal_out = negated(back);
        cyc_in[SEP].push_back(negated(back));
    }
    // Separation cyclone -> preheater 2 -> preheater 1 (gas path).
    if (F_b >= 0.0) {
        cyc_in[P2].push_back(o_sep.gas_outflow);
    } else {
        const Stream back = gas_from(P2, -F_b);
        cyc_in[SEP].push_back(back);
        cyc_in[P2].push_back(negated(back));
    }
    if (F_c >= 0.0) {
        cyc_in[P1].push_back(o_p2.gas_outflow);
    } else {
        const Stream back = gas_from(P1, -F_c);
        cyc_in[P2].push_back(back);
        cyc_in[P1].push_back(negated(back));
    }

    // Solids path.
    Stream feed;
    feed.flow[SpeciesId::Kaolinite] = u.clay_feed / thermo.species(SpeciesId::Kaolinite).molar_mass;
    feed.T_gas = feed.T_solid = d.T_amb;
    feed.P = desc_.ambient_pressure;
    cyc_in[P1].push_back(feed);
    add_in(feed);
    cyc_in[P2].push_back(o_p1.solid_outflow);
    cal_in.push_back(o_p2.solid_outflow);
    const Stream& product = o_sep.solid_outflow;
    add_out(product);
    for (std::size_t i = 0; i < chem::kNumSpecies; ++i) {
        q[quad::kProduct + i] += product.flow.moles[i];
    }

    // Preheater 1 gas outlet splits between the loop and the vent.
    Stream loop_src;
    Stream vent_out;
    if (out_p1 > 0.0) {
        loop_src = units::scaled(o_p1.gas_outflow, std::max(F_loop, 0.0) / out_p1);
        vent_out = units::scaled(o_p1.gas_outflow, std::max(F_vent, 0.0) / out_p1);
    }
    if (F_vent > 0.0) {
        add_out(vent_out);
    } else if (F_vent < 0.0) {
        const Stream inleak = ambient_air(-F_vent);
        cyc_in[P1].push_back(inleak);
        add_in(inleak);
    }

    // Filter, fan, fresh air and EHGG on the recirculation line.
    const Composition p1_gas = cyc[P1].holdup.only(Phase::Gas);
    const double p1_gas_volume =
        desc_.cyclones[P1].volume - thermo.solid_volume(cyc[P1].holdup.only(Phase::Solid));
    const double p1_rho = thermo.mass(p1_gas) / p1_gas_volume;
    const double q_loop = F_loop / p1_rho;
    const double filter_dp = desc_.filter.k_dp * q_loop * std::abs(q_loop);

    const Stream air = ambient_air(u.fresh_air);
    add_in(air);
    Stream src;
    double w_fan = 0.0;
    if (F_loop >= 0.0) {
        const auto fr = units::filter_outlet(loop_src, desc_.filter.dust_removal, desc_.filter.k_dp);
        add_out(fr.captured);
        src = fr.outlet;
        w_fan = q_loop * u.fan_dp;
    } else {
        src = units::cell_outflow(thermo, cells[0], -F_loop, P0);
    }
    const double heat = desc_.ehgg.efficiency * d.p_el;
    const double h_target = units::enthalpy_flow(thermo, src) + units::enthalpy_flow(thermo, air) + w_fan + heat;
    Stream heated;
    heated.flow = src.flow + air.flow;
    heated.T_gas = heated.T_solid = T_e;
    if (F_loop >= 0.0) {
        heated.P = cells[0].P + P0;
        cal_in.push_back(heated);
    } else {
        heated.P = cyc[P1].P + P0;
        cyc_in[P1].push_back(heated);
        cal_in.push_back(negated(src));
    }
    q[quad::kEnergyIn] += w_fan + heat;
    q[quad::kEhggElectric] += d.p_el;
    q[quad::kFanElectric] += w_fan / desc_.fan.efficiency;

    const auto res = units::calciner_residuals(cells, cal_in, cal_out, cal_model);
    write_cells(res);
    double ambient = res.ambient_heat;
    std::array<units::CycloneResult, kNumCyclones> cr;
    const std::array<double, kNumCyclones> cyc_out{out_p1, out_p2, out_sep};
    for (std::size_t j = 0; j < kNumCyclones; ++j) {
        cr[j] = units::cyclone_residuals(cyc[j], cyc_in[j], cyc_out[j], cyc_model[j]);
        const std::size_t xi = x_cyclone(j);
        std::copy(cr[j].dn_dt.moles.begin(), cr[j].dn_dt.moles.end(), f.begin() + xi);
        f[xi + 5] = cr[j].dU_dt;
        g[y_cyclone(j)] = cr[j].algebraic[0];
        g[y_cyclone(j) + 1] = cr[j].algebraic[1];
        ambient += cr[j].ambient_heat;
    }
    const double ehgg_shell = kEhggShellConductance * (d.T_amb - T_e);
    ambient += ehgg_shell;
    q[quad::kEnergyOut] -= ambient;

    const auto& last = cells[n - 1];
    // Connector laws in pressure-drop form: same relation as Eq. 13, but the
    // residual stays well scaled when a flow starts from rest.
    auto connector = [&](double F, double p_up, double p_down, double T_up, double C) {
        return units::connector_pressure_drop(F, p_up + p_down + 2.0 * P0, T_up, C) - (p_up - p_down);
    };
    g[yf] = connector(F_a, last.P, cyc[SEP].P, last.T_g, desc_.c_calciner_separator);
    g[yf + 1] = connector(F_b, cyc[SEP].P, cyc[P2].P, cyc[SEP].T, desc_.c_separator_preheater2);
    g[yf + 2] = connector(F_c, cyc[P2].P, cyc[P1].P, cyc[P2].T, desc_.c_preheater2_preheater1);
    g[yf + 3] = connector(F_loop, cyc[P1].P + u.fan_dp - filter_dp, cells[0].P, cyc[P1].T, desc_.c_loop);
    g[yf + 4] = desc_.c_vent ? connector(F_vent, cyc[P1].P, 0.0, cyc[P1].T, *desc_.c_vent) : F_vent;
    g[y_ehgg()] = units::enthalpy_flow(thermo, heated) - h_target - ehgg_shell;

    if (diag) {
        diag->cells = cells;
        for (auto& c : diag->cells) {
            c.P += P0;
        }
        diag->cyclones = cyc;
        for (auto& c : diag->cyclones) {
            c.P += P0;
        }
        for (std::size_t j = 0; j < kNumCyclones; ++j) {
            diag->cyclone_efficiency[j] = cr[j].efficiency;
        }
        diag->F_calciner_separator = F_a;
        diag->F_separator_preheater2 = F_b;
        diag->F_preheater2_preheater1 = F_c;
        diag->F_loop = F_loop;
        diag->F_vent = F_vent;
        diag->T_ehgg = T_e;
        diag->filter_dp = filter_dp;
        diag->fan_hydraulic_power = w_fan;
        diag->fan_electric_power = w_fan / desc_.fan.efficiency;
        diag->ambient_heat = ambient;
        diag->product_mass_flow = units::solid_mass_flow(thermo, product);
        diag->product_metakaolin =
            product.flow[SpeciesId::Metakaolin] * thermo.species(SpeciesId::Metakaolin).molar_mass;
        diag->enthalpy_in = q[quad::kEnergyIn] - w_fan - heat;
        diag->enthalpy_out = q[quad::kEnergyOut] + ambient;
        diag->outlet_calcination = units::calcination_degree(last.c);
        diag->product_calcination = units::calcination_degree(cyc[SEP].holdup);
    }
}

PlantDiagnostics PlantModel::diagnostics(const PlantState& state) const {
    std::vector<double> f(n_differential()), g(n_algebraic());
    PlantDiagnostics diag;
    evaluate(state.x, state.y, state.u, state.d, f, g, &diag);
    return diag;
}

void PlantModel::scales(std::span<double> x_scale, std::span<double> g_scale) const {
    std::fill(x_scale.begin(), x_scale.end(), 1.0);
    std::fill(g_scale.begin(), g_scale.end(), 1.0);
    for (std::size_t k = 0; k < n_cells(); ++k) {
        x_scale[x_cell(k) + 5] = 1.0e5;
        x_scale[x_cell(k) + 6] = 1.0e5;
        g_scale[y_cell(k)] = 1.0e-4;
        g_scale[y_cell(k) + 1] = 1.0e2;
        g_scale[y_cell(k) + 2] = 1.0e2;
    }
    if (!is_loop()) {
        g_scale[y_flows()] = 1.0e-2;
        return;
    }
    for (std::size_t j = 0; j < kNumCyclones; ++j) {
        const double v = desc_.cyclones[j].volume;
        for (std::size_t i = 0; i < chem::kNumSpecies; ++i) {
            x_scale[x_cyclone(j) + i] = v;
        }
        x_scale[x_cyclone(j) + 5] = 1.0e5 * v;
        g_scale[y_cyclone(j)] = 1.0e-4;
        g_scale[y_cyclone(j) + 1] = 1.0e2 * v;
    }
    // Connector rows are pressure differences (Pa); the closed-vent row is a flow.
    for (std::size_t i = 0; i < 5; ++i) {
        g_scale[y_flows() + i] = 1.0e-2;
    }
    if (!desc_.c_vent) {
        g_scale[y_flows() + 4] = 1.0e-3;
    }
    g_scale[y_ehgg()] = 1.0e2;
}

void PlantModel::make_consistent(PlantState& state, double tol) const {
    if (state.x.size() != n_differential() || state.y.size() != n_algebraic()) {
        throw StructuralError("make_consistent: state size mismatch");
    }
    std::vector<double> x_scale(n_differential()), g_scale(n_algebraic()), f(n_differential());
    scales(x_scale, g_scale);
    NewtonConfig cfg;
    cfg.tol = tol;
    cfg.max_iter = 50;
    cfg.central_differences = true;

    auto solve_at = [&](const PlantInputs& u, std::span<const double> guess) {
        VectorFn fn = [&](std::span<const double> y, std::span<double> g) {
            evaluate(state.x, y, u, state.d, f, g);
        };
        return newton_solve(fn, guess, cfg, g_scale).z;
    };

    try {
        state.y = solve_at(state.u, state.y);
        return;
    } catch (const Error&) {
        if (!is_loop() || !(state.u.fan_dp > 1.0)) {
            throw;
        }
    }
    constexpr double kStartPa = 1.0;
    constexpr double kRatio = 10.0;
    std::vector<double> y = state.y;
    PlantInputs u = state.u;
    for (double dp = kStartPa;; dp = std::min(state.u.fan_dp, dp * kRatio)) {
        u.fan_dp = dp;
        y = solve_at(u, y);
        if (dp >= state.u.fan_dp) {
            break;
        }
    }
    state.y = std::move(y);
}

void PlantModel::check_state(std::span<const double> x, std::span<const double> /*y*/) const {
    constexpr double kNegativeTolerance = -1.0e-9;
    for (std::size_t k = 0; k < n_cells(); ++k) {
        for (std::size_t i = 0; i < chem::kNumSpecies; ++i) {
            if (x[x_cell(k) + i] < kNegativeTolerance) {
                throw StateError("plant: negative concentration in calciner cell " + std::to_string(k));
            }
        }
    }
    if (!is_loop()) {
        return;
    }
    for (std::size_t j = 0; j < kNumCyclones; ++j) {
        for (std::size_t i = 0; i < chem::kNumSpecies; ++i) {
            if (x[x_cyclone(j) + i] < kNegativeTolerance * desc_.cyclones[j].volume) {
                throw StateError("plant: negative holdup in cyclone " + std::to_string(j + 1));
            }
        }
    }
}

std::vector<std::string> PlantModel::x_names() const {
    std::vector<std::string> names;
    auto species_block = [&](const std::string& prefix, const char* e1) {
        for (auto id : chem::kAllSpecies) {
            names.push_back(prefix + "." + std::string(e1) + "_" + std::string(chem::species_name(id)));
        }
    };
    for (std::size_t k = 0; k < n_cells(); ++k) {
        const std::string p = "calciner" + std::to_string(k);
        species_block(p, "c");
        names.push_back(p + ".u_s");
        names.push_back(p + ".u_g");
    }
    if (is_loop()) {
        for (std::size_t j = 0; j < kNumCyclones; ++j) {
            const std::string p = "cyclone" + std::to_string(j + 1);
            species_block(p, "n");
            names.push_back(p + ".U");
        }
    }
    species_block("boundary", "in");
    species_block("boundary", "out");
    species_block("boundary", "product");
    for (const char* s : {"energy_in", "energy_out", "ehgg_electric", "fan_electric"}) {
        names.push_back(std::string("boundary.") + s);
    }
    return names;
}

std::vector<std::string> PlantModel::y_names() const {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < n_cells(); ++k) {
        const std::string p = "calciner" + std::to_string(k);
        names.push_back(p + ".T_s");
        names.push_back(p + ".T_g");
        names.push_back(p + ".P_gauge");
    }
    if (!is_loop()) {
        names.push_back("F_out");
        return names;
    }
    for (std::size_t j = 0; j < kNumCyclones; ++j) {
        const std::string p = "cyclone" + std::to_string(j + 1);
        names.push_back(p + ".T");
        names.push_back(p + ".P_gauge");
    }
    for (const char* s : {"F_calciner_separator", "F_separator_preheater2", "F_preheater2_preheater1", "F_loop",
                          "F_vent", "T_ehgg"}) {
        names.emplace_back(s);
    }
    return names;
}

PlantState PlantModel::ambient_state(double T_amb) const {
    auto s = uniform_state(T_amb, desc_.ambient_pressure, chem::air_mole_fractions(), Composition{});
    s.d.T_amb = T_amb;
    return s;
}

PlantState PlantModel::uniform_state(double T, double P, const Composition& gas_fractions,
                                     const Composition& solids_per_m3) const {
    const auto& thermo = chem_.thermo;
    PlantState s;
    s.x.assign(n_differential(), 0.0);
    s.y.assign(n_algebraic(), 0.0);
    s.d.T_amb = T;

    const Composition solids = solids_per_m3.only(Phase::Solid);
    const double phi_s = thermo.solid_volume(solids);
    if (!(phi_s < 1.0)) {
        throw DomainError("uniform_state: solids fill the whole volume");
    }
    const Composition yg = gas_fractions.only(Phase::Gas);
    const double total = yg.total();
    if (!(total > 0.0)) {
        throw DomainError("uniform_state: gas fractions must be positive");
    }
    const Composition c = solids + ((1.0 - phi_s) * P / (chem::kGasConstant * T) / total) * yg;
    for (std::size_t k = 0; k < n_cells(); ++k) {
        const std::size_t xi = x_cell(k);
        std::copy(c.moles.begin(), c.moles.end(), s.x.begin() + xi);
        s.x[xi + 5] = thermo.phase_internal_energy(Phase::Solid, T, P, c);
        s.x[xi + 6] = thermo.phase_internal_energy(Phase::Gas, T, P, c);
        s.y[y_cell(k)] = T;
        s.y[y_cell(k) + 1] = T;
        s.y[y_cell(k) + 2] = P - desc_.ambient_pressure;
    }
    if (!is_loop()) {
        s.y[y_flows()] = units::connector_flow(P, desc_.outlet_pressure, T, desc_.c_outlet);
        return s;
    }
    for (std::size_t j = 0; j < kNumCyclones; ++j) {
        const Composition hold = desc_.cyclones[j].volume * c;
        const std::size_t xi = x_cyclone(j);
        std::copy(hold.moles.begin(), hold.moles.end(), s.x.begin() + xi);
        s.x[xi + 5] = thermo.internal_energy(T, P, hold);
        s.y[y_cyclone(j)] = T;
        s.y[y_cyclone(j) + 1] = P - desc_.ambient_pressure;
    }
    if (desc_.c_vent) {
        s.y[y_flows() + 4] = units::connector_flow(P, desc_.ambient_pressure, T, *desc_.c_vent);
    }
    s.y[y_ehgg()] = T;
    return s;
}

std::array<double, chem::kNumElements> PlantModel::element_inventory(std::span<const double> x) const {
    const auto& thermo = chem_.thermo;
    Composition total;
    const double vol = desc_.calciner.cell_volume();
    for (std::size_t k = 0; k < n_cells(); ++k) {
        Composition c;
        std::copy_n(x.begin() + x_cell(k), chem::kNumSpecies, c.moles.begin());
        total += vol * c;
    }
    if (is_loop()) {
        for (std::size_t j = 0; j < kNumCyclones; ++j) {
            Composition h;
            std::copy_n(x.begin() + x_cyclone(j), chem::kNumSpecies, h.moles.begin());
            total += h;
        }
    }
    return thermo.element_totals(total);
}

std::array<double, chem::kNumElements> PlantModel::element_exchange(std::span<const double> x) const {
    Composition in, out;
    std::copy_n(x.begin() + x_quad() + quad::kIn, chem::kNumSpecies, in.moles.begin());
    std::copy_n(x.begin() + x_quad() + quad::kOut, chem::kNumSpecies, out.moles.begin());
    const auto ein = chem_.thermo.element_totals(in);
    const auto eout = chem_.thermo.element_totals(out);
    std::array<double, chem::kNumElements> net{};
    for (std::size_t e = 0; e < chem::kNumElements; ++e) {
        net[e] = ein[e] - eout[e];
    }
    return net;
}

double PlantModel::energy_inventory(std::span<const double> x) const {
    double total = 0.0;
    const double vol = desc_.calciner.cell_volume();
    for (std::size_t k = 0; k < n_cells(); ++k) {
        total += vol * (x[x_cell(k) + 5] + x[x_cell(k) + 6]);
    }
    if (is_loop()) {
        for (std::size_t j = 0; j < kNumCyclones; ++j) {
            total += x[x_cyclone(j) + 5];
        }
    }
    return total;
}

double PlantModel::energy_exchange(std::span<const double> x) const {
    return x[x_quad() + quad::kEnergyIn] - x[x_quad() + quad::kEnergyOut];
}

void assemble_residuals(const PlantModel& model, const PlantState& state, std::vector<double>& f,
                        std::vector<double>& g) {
    if (state.x.size() != model.n_differential() || state.y.size() != model.n_algebraic()) {
        throw StructuralError("assemble_residuals: state dimensions do not match the plant description");
    }
    f.assign(model.n_differential(), 0.0);
    g.assign(model.n_algebraic(), 0.0);
    model.evaluate(state.x, state.y, state.u, state.d, f, g, nullptr);
}

}  // namespace clayems::dae
