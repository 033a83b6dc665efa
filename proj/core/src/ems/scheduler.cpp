#include "clayems/ems/scheduler.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

namespace clayems::ems {

namespace {

std::string name_of(const std::string& kind, std::size_t t) { return kind + "[" + std::to_string(t) + "]"; }

std::string name_of(const std::string& kind, std::size_t t, const std::string& id) {
    return kind + "[" + std::to_string(t) + "][" + id + "]";
}

std::string branch_name(const grid::Branch& br) { return br.id.empty() ? br.from + "-" + br.to : br.id; }

void check_series(const std::vector<double>& v, std::size_t H, const std::string& what, bool nonneg) {
    if (v.size() != H) {
        std::ostringstream os;
        os << "forecasts: series '" << what << "' has " << v.size() << " values, expected " << H;
        throw ValidationError(os.str());
    }
    for (double x : v) {
        if (!std::isfinite(x) || (nonneg && x < 0.0)) {
            throw ValidationError("forecasts: series '" + what + "' must be finite" + (nonneg ? " and >= 0" : ""));
        }
    }
}

double load_at(const std::map<std::string, std::vector<double>>& m, const std::string& bus, std::size_t t) {
    const auto it = m.find(bus);
    return it == m.end() ? 0.0 : it->second[t];
}

}  // namespace

void Forecasts::validate() const {
    if (H == 0) {
        throw ValidationError("forecasts: horizon must have at least one period");
    }
    if (!(dt > 0.0)) {
        throw ValidationError("forecasts: dt must be > 0");
    }
    check_series(price, H, "price", false);
    check_series(co2_intensity, H, "co2_intensity", true);
    check_series(pv_avail, H, "pv_avail", true);
    check_series(wind_avail, H, "wind_avail", true);
    if (!std::isfinite(co2_price) || co2_price < 0.0) {
        throw ValidationError("forecasts: co2_price must be finite and >= 0");
    }
    for (const auto& [bus, v] : load_p) {
        check_series(v, H, "load_p:" + bus, false);
    }
    for (const auto& [bus, v] : load_q) {
        check_series(v, H, "load_q:" + bus, false);
    }
}

void DeviceSpecs::validate(const grid::RadialNetwork& net) const {
    auto need_bus = [&](const std::string& bus, const std::string& who) {
        if (!net.bus_index(bus)) {
            throw ValidationError(who + " bus '" + bus + "' is not in the network");
        }
    };
    need_bus(ehgg.bus, "EHGG");
    if (!(ehgg.p_min >= 0.0 && ehgg.p_min <= ehgg.p_max)) {
        throw ValidationError("EHGG: need 0 <= p_min <= p_max");
    }
    if (bess) {
        need_bus(bess->bus, "BESS");
        const auto& b = *bess;
        if (!(b.capacity > 0.0) || !(b.p_max >= 0.0)) {
            throw ValidationError("BESS: capacity must be > 0 and p_max >= 0");
        }
        if (!(b.eff_c > 0.0 && b.eff_c <= 1.0 && b.eff_d > 0.0 && b.eff_d <= 1.0)) {
            throw ValidationError("BESS: efficiencies must lie in (0, 1]");
        }
        if (!(0.0 <= b.soc_min && b.soc_min <= b.soc0 && b.soc0 <= b.soc_max && b.soc_max <= 1.0)) {
            throw ValidationError("BESS: need 0 <= soc_min <= soc0 <= soc_max <= 1");
        }
    }
    if (pv_bus) {
        need_bus(*pv_bus, "PV");
    }
    if (wind_bus) {
        need_bus(*wind_bus, "wind");
    }
    if (!(production.kappa >= 0.0) || !(production.daily_target >= 0.0)) {
        throw ValidationError("production: kappa and daily_target must be >= 0");
    }
    if (!(weights.cost >= 0.0 && weights.co2 >= 0.0 && weights.voltage >= 0.0 && weights.clay >= 0.0)) {
        throw ValidationError("objective weights must be >= 0");
    }
    if (!(grid_import_max >= 0.0)) {
        throw ValidationError("grid_import_max must be >= 0");
    }
    if (!(u_min > 0.0 && u_min < u_max)) {
        throw ValidationError("voltage band: need 0 < u_min < u_max");
    }
}

ScheduleProblem build_schedule_lp(const grid::RadialNetwork& net, const Forecasts& fc, const DeviceSpecs& dev) {
    const auto topo = grid::radial_topology(net);
    fc.validate();
    dev.validate(net);
    for (const auto& [bus, v] : fc.load_p) {
        if (!net.bus_index(bus)) {
            throw ValidationError("forecasts: load bus '" + bus + "' is not in the network");
        }
    }
    for (const auto& [bus, v] : fc.load_q) {
        if (!net.bus_index(bus)) {
            throw ValidationError("forecasts: load bus '" + bus + "' is not in the network");
        }
    }

    const double max_clay = dev.production.kappa * dev.ehgg.p_max * static_cast<double>(fc.H) * fc.dt;
    if (dev.production.daily_target > max_clay) {
        std::ostringstream os;
        os << "production target " << dev.production.daily_target << " t exceeds the most the EHGG can deliver, "
           << max_clay << " t (kappa * p_max * H * dt)";
        throw ScheduleInfeasible(os.str(), "production_target", dev.production.daily_target, max_clay);
    }

    ScheduleProblem prob;
    prob.H = fc.H;
    prob.dt = fc.dt;
    prob.base_mva = net.base_mva;
    auto& lp = prob.lp;
    const double base = net.base_mva;
    const auto& w = dev.weights;
    using E = LinearProgram::Entry;

    std::vector<E> production;
    for (std::size_t t = 0; t < fc.H; ++t) {
        // Device variables and what each draws at its bus (MW, consumption positive).
        std::vector<std::vector<E>> draw(net.buses.size());
        const auto ehgg = lp.add_variable(name_of("ehgg", t), dev.ehgg.p_min, dev.ehgg.p_max,
                                          -w.clay * dev.production.kappa * fc.dt);
        draw[*net.bus_index(dev.ehgg.bus)].push_back({ehgg, 1.0});
        production.push_back({ehgg, dev.production.kappa * fc.dt});
        const auto pgrid = lp.add_variable(name_of("grid", t), 0.0, dev.grid_import_max,
                                           fc.dt * (w.cost * fc.price[t] + w.co2 * fc.co2_price * fc.co2_intensity[t]));
        const auto qgrid = lp.add_variable(name_of("qgrid", t), -kInf, kInf);
        draw[topo.root].push_back({pgrid, -1.0});
        if (dev.pv_bus) {
            const auto v = lp.add_variable(name_of("pv", t), 0.0, fc.pv_avail[t]);
            draw[*net.bus_index(*dev.pv_bus)].push_back({v, -1.0});
        }
        if (dev.wind_bus) {
            const auto v = lp.add_variable(name_of("wind", t), 0.0, fc.wind_avail[t]);
            draw[*net.bus_index(*dev.wind_bus)].push_back({v, -1.0});
        }
        if (dev.bess) {
            const auto& b = *dev.bess;
            const auto ch = lp.add_variable(name_of("charge", t), 0.0, b.p_max);
            const auto dis = lp.add_variable(name_of("discharge", t), 0.0, b.p_max);
            const double lo = (t + 1 == fc.H ? std::max(b.soc_min, b.soc0) : b.soc_min) * b.capacity;
            const auto soc = lp.add_variable(name_of("soc", t + 1), lo, b.soc_max * b.capacity);
            std::vector<E> row{{soc, 1.0}, {ch, -fc.dt * b.eff_c}, {dis, fc.dt / b.eff_d}};
            double rhs = 0.0;
            if (t == 0) {
                rhs = b.soc0 * b.capacity;
            } else {
                row.push_back({lp.index_of(name_of("soc", t)), -1.0});
            }
            lp.add_equality(name_of("soc_balance", t), row, rhs);
            draw[*net.bus_index(b.bus)].push_back({ch, 1.0});
            draw[*net.bus_index(b.bus)].push_back({dis, -1.0});
        }

        std::vector<std::size_t> U(net.buses.size()), P(net.branches.size()), Q(net.branches.size());
        for (std::size_t j = 0; j < net.buses.size(); ++j) {
            const auto& id = net.buses[j].id;
            if (j == topo.root) {
                U[j] = lp.add_variable(name_of("U", t, id), net.u0, net.u0);
                continue;
            }
            U[j] = lp.add_variable(name_of("U", t, id), dev.u_min, dev.u_max);
            const auto d = lp.add_variable(name_of("dev", t, id), 0.0, kInf, w.voltage);
            lp.add_range(name_of("dev_hi", t, id), {{U[j], 1.0}, {d, -1.0}}, -kInf, dev.u_nom);
            lp.add_range(name_of("dev_lo", t, id), {{U[j], 1.0}, {d, 1.0}}, dev.u_nom, kInf);
        }
        for (std::size_t k = 0; k < net.branches.size(); ++k) {
            const auto id = branch_name(net.branches[k]);
            P[k] = lp.add_variable(name_of("P", t, id), -kInf, kInf);
            Q[k] = lp.add_variable(name_of("Q", t, id), -kInf, kInf);
        }
        for (std::size_t k = 0; k < net.branches.size(); ++k) {
            const auto& br = net.branches[k];
            lp.add_equality(name_of("drop", t, branch_name(br)),
                            {{U[topo.to[k]], 1.0}, {U[topo.from[k]], -1.0}, {P[k], 2.0 * br.r}, {Q[k], 2.0 * br.x}},
                            0.0);
        }
        for (std::size_t j = 0; j < net.buses.size(); ++j) {
            const auto& id = net.buses[j].id;
            std::vector<E> pr, qr;
            const std::size_t k = topo.parent_branch[j];
            if (k != grid::kNone) {
                pr.push_back({P[k], 1.0});
                qr.push_back({Q[k], 1.0});
            }
            for (auto c : topo.child_branches[j]) {
                pr.push_back({P[c], -1.0});
                qr.push_back({Q[c], -1.0});
            }
            for (const auto& e : draw[j]) {
                pr.push_back({e.col, -e.value / base});
            }
            if (j == topo.root) {
                qr.push_back({qgrid, 1.0 / base});
            }
            lp.add_equality(name_of("balance_p", t, id), pr, load_at(fc.load_p, id, t) / base);
            lp.add_equality(name_of("balance_q", t, id), qr, load_at(fc.load_q, id, t) / base);
        }
    }
    lp.add_range("production", production, dev.production.daily_target, kInf);
    return prob;
}

Schedule extract_schedule(const ScheduleProblem& prob, const LpResult& sol, const grid::RadialNetwork& net,
                          const Forecasts& fc, const DeviceSpecs& dev) {
    if (sol.status == LpStatus::Infeasible) {
        std::ostringstream os;
        os << "schedule LP is infeasible (phase-1 optimum " << sol.infeasibility << ")";
        throw ScheduleInfeasible(os.str(), "lp_infeasible", 0.0, 0.0, sol.infeasibility);
    }
    if (sol.status != LpStatus::Optimal) {
        throw ConvergenceError(std::string("schedule LP not solved: ") + to_string(sol.status), 0.0);
    }
    const auto& names = prob.lp.variable_names();
    if (sol.z.size() != names.size()) {
        throw StructuralError("extract_schedule: solution size does not match the variable map");
    }
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t j = 0; j < names.size(); ++j) {
        index.emplace(names[j], j);
    }
    auto get = [&](const std::string& n) {
        const auto it = index.find(n);
        if (it == index.end()) {
            throw StructuralError("extract_schedule: variable '" + n + "' missing from the name map");
        }
        return sol.z[it->second];
    };

    Schedule s;
    s.H = prob.H;
    s.dt = prob.dt;
    const std::size_t H = prob.H;
    s.p_ehgg.resize(H);
    s.p_bess.assign(H, 0.0);
    s.p_charge.assign(H, 0.0);
    s.p_discharge.assign(H, 0.0);
    s.p_grid.resize(H);
    s.q_grid.resize(H);
    s.p_pv.assign(H, 0.0);
    s.p_wind.assign(H, 0.0);
    s.U.assign(H, std::vector<double>(net.buses.size()));
    s.P.assign(H, std::vector<double>(net.branches.size()));
    s.Q.assign(H, std::vector<double>(net.branches.size()));
    if (dev.bess) {
        s.soc.assign(H + 1, dev.bess->soc0 * dev.bess->capacity);
    }
    const auto& w = dev.weights;
    const std::size_t root = grid::radial_topology(net).root;
    double dev_sum = 0.0;
    for (std::size_t t = 0; t < H; ++t) {
        s.p_ehgg[t] = get(name_of("ehgg", t));
        s.p_grid[t] = get(name_of("grid", t));
        s.q_grid[t] = get(name_of("qgrid", t));
        if (dev.pv_bus) {
            s.p_pv[t] = get(name_of("pv", t));
        }
        if (dev.wind_bus) {
            s.p_wind[t] = get(name_of("wind", t));
        }
        if (dev.bess) {
            s.p_charge[t] = get(name_of("charge", t));
            s.p_discharge[t] = get(name_of("discharge", t));
            s.p_bess[t] = s.p_discharge[t] - s.p_charge[t];
            s.soc[t + 1] = get(name_of("soc", t + 1));
        }
        for (std::size_t j = 0; j < net.buses.size(); ++j) {
            s.U[t][j] = get(name_of("U", t, net.buses[j].id));
            if (j != root) {
                dev_sum += get(name_of("dev", t, net.buses[j].id));
            }
        }
        for (std::size_t k = 0; k < net.branches.size(); ++k) {
            s.P[t][k] = get(name_of("P", t, branch_name(net.branches[k])));
            s.Q[t][k] = get(name_of("Q", t, branch_name(net.branches[k])));
        }
        const double e_grid = s.p_grid[t] * fc.dt;
        s.objective.phi_c += w.cost * fc.price[t] * e_grid;
        s.objective.phi_co2 += w.co2 * fc.co2_price * fc.co2_intensity[t] * e_grid;
        s.clay_produced += dev.production.kappa * s.p_ehgg[t] * fc.dt;
    }
    s.objective.phi_u = w.voltage * dev_sum;
    s.objective.phi_cc = w.clay * s.clay_produced;
    s.solver_objective = sol.objective;

    if (dev.bess) {
        const auto& b = *dev.bess;
        const double tol = 1e-9 * std::max(1.0, b.capacity);
        for (std::size_t t = 0; t < H; ++t) {
            const double expect = s.soc[t] + fc.dt * (b.eff_c * s.p_charge[t] - s.p_discharge[t] / b.eff_d);
            if (std::abs(s.soc[t + 1] - expect) > tol) {
                std::ostringstream os;
                os << "extract_schedule: SoC recursion violated in period " << t << " by "
                   << s.soc[t + 1] - expect;
                throw ConvergenceError(os.str(), std::abs(s.soc[t + 1] - expect));
            }
        }
    }
    return s;
}

Schedule optimize_schedule(const grid::RadialNetwork& net, const Forecasts& fc, const DeviceSpecs& dev,
                           const LpOptions& options) {
    const auto prob = build_schedule_lp(net, fc, dev);
    const auto sol = solve_lp(prob.lp, options);
    return extract_schedule(prob, sol, net, fc, dev);
}

double flat_ehgg_power(const Forecasts& fc, const DeviceSpecs& dev) {
    const double energy = static_cast<double>(fc.H) * fc.dt;
    if (!(dev.production.kappa > 0.0) || !(energy > 0.0)) {
        return dev.ehgg.p_min;
    }
    return dev.production.daily_target / (dev.production.kappa * energy);
}

Schedule flat_schedule(const grid::RadialNetwork& net, const Forecasts& fc, const DeviceSpecs& dev,
                       const LpOptions& options) {
    const double p = flat_ehgg_power(fc, dev);
    if (p < dev.ehgg.p_min || p > dev.ehgg.p_max) {
        std::ostringstream os;
        os << "flat EHGG power " << p << " MW lies outside [" << dev.ehgg.p_min << ", " << dev.ehgg.p_max << "] MW";
        throw ScheduleInfeasible(os.str(), "flat_power_out_of_range", p, dev.ehgg.p_max);
    }
    auto prob = build_schedule_lp(net, fc, dev);
    for (std::size_t t = 0; t < fc.H; ++t) {
        const auto j = prob.lp.index_of(name_of("ehgg", t));
        prob.lp.lower()[j] = p;
        prob.lp.upper()[j] = p;
    }
    // The pinned EHGG meets the target exactly; relax the row by rounding.
    const auto row = prob.lp.index_of("production.slack");
    prob.lp.lower()[row] = std::min(prob.lp.lower()[row], dev.production.kappa * p * static_cast<double>(fc.H) * fc.dt);
    const auto sol = solve_lp(prob.lp, options);
    return extract_schedule(prob, sol, net, fc, dev);
}

grid::BusInjections scheduled_loads(const Schedule& sched, std::size_t t, const grid::RadialNetwork& net,
                                    const Forecasts& fc, const DeviceSpecs& dev) {
    auto inj = grid::BusInjections::zero(net);
    const double base = net.base_mva;
    for (std::size_t j = 0; j < net.buses.size(); ++j) {
        const auto& id = net.buses[j].id;
        inj.p[j] = load_at(fc.load_p, id, t) / base;
        inj.q[j] = load_at(fc.load_q, id, t) / base;
    }
    inj.p[*net.bus_index(dev.ehgg.bus)] += sched.p_ehgg[t] / base;
    if (dev.pv_bus) {
        inj.p[*net.bus_index(*dev.pv_bus)] -= sched.p_pv[t] / base;
    }
    if (dev.wind_bus) {
        inj.p[*net.bus_index(*dev.wind_bus)] -= sched.p_wind[t] / base;
    }
    if (dev.bess) {
        inj.p[*net.bus_index(dev.bess->bus)] -= sched.p_bess[t] / base;
    }
    return inj;
}

std::vector<PeriodCheck> verify_schedule_ac(const Schedule& sched, const grid::RadialNetwork& net,
                                            const Forecasts& fc, const DeviceSpecs& dev, double gap_tol) {
    const auto topo = grid::radial_topology(net);
    std::vector<PeriodCheck> out(sched.H);
    for (std::size_t t = 0; t < sched.H; ++t) {
        auto& c = out[t];
        const auto loads = scheduled_loads(sched, t, net, fc, dev);
        try {
            const auto pf = grid::solve_power_flow(net, loads, net.u0);
            c.converged = true;
            c.U_exact = pf.U;
            c.losses = grid::active_losses(net, pf) * net.base_mva;
            for (std::size_t j = 0; j < net.buses.size(); ++j) {
                c.max_gap = std::max(c.max_gap, std::abs(pf.U[j] - sched.U[t][j]));
                if (j != topo.root && (pf.U[j] < dev.u_min - 1e-12 || pf.U[j] > dev.u_max + 1e-12)) {
                    c.band_violation = true;
                }
            }
            c.flagged = c.band_violation || c.max_gap > gap_tol;
            if (c.band_violation) {
                c.message = "exact voltage outside the band";
            } else if (c.max_gap > gap_tol) {
                c.message = "exact and planning voltages differ by more than the gap tolerance";
            }
        } catch (const grid::PowerFlowDivergence& e) {
            c.converged = false;
            c.flagged = true;
            c.message = e.what();
        }
    }
    return out;
}

}  // namespace clayems::ems
