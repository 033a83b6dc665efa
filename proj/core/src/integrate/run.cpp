#include "clayems/integrate/run.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "clayems/error.hpp"
#include "clayems/grid/power_flow.hpp"

namespace clayems::integrate {

namespace {

constexpr double kJoulePerMWh = 3.6e9;

control::Measurements measure(const dae::PlantDiagnostics& dg) { return {dg.cells.back().T_g, dg.F_loop}; }

}  // namespace

KpiReport compute_kpis(const std::vector<PeriodRecord>& periods, const ems::Forecasts& fc) {
    KpiReport k;
    for (const auto& p : periods) {
        k.ehgg_scheduled += p.ehgg_scheduled;
        k.ehgg_actual += p.ehgg_actual;
        k.max_ehgg_mismatch = std::max(k.max_ehgg_mismatch, std::abs(p.ehgg_actual - p.ehgg_scheduled));
        k.fan_electric += p.fan_electric;
        k.grid_import += p.grid_import;
        k.clay += p.clay;
        k.clay_planned += p.clay_planned;
        k.band_violation_minutes += p.band_violation / 60.0;
        if (p.period < fc.price.size()) {
            k.realized_cost += fc.price[p.period] * p.grid_import;
            const double co2 = fc.co2_intensity[p.period] * p.grid_import;
            k.realized_co2 += co2;
            k.realized_co2_cost += fc.co2_price * co2;
        }
        k.voltage_violation_periods += p.voltage_violation ? 1 : 0;
        k.flagged_periods += p.verifier_flagged ? 1 : 0;
    }
    return k;
}

StageError::StageError(std::string stage, const std::string& message, IntegratedResult partial, int exit_code)
    : Error("[" + stage + "] " + message), stage_(std::move(stage)), partial_(std::move(partial)),
      exit_code_(exit_code) {}

PlantRunner::PlantRunner(const Scenario& sc)
    : sc_(sc), model_(sc.plant, sc.chemistry), integ_(model_, sc.solver), state_(model_.ambient_state(sc.init.T_amb)) {}

void PlantRunner::warm_start(double p_el) {
    const auto& init = sc_.init;
    const double dt = sc_.sim_dt();
    state_ = model_.ambient_state(init.T_amb);
    state_.u = {0.0, init.fan_dp, std::clamp(sc_.controller.fresh_air, sc_.plant.fresh_air.min,
                                             sc_.plant.fresh_air.max)};
    state_.d = {0.0, init.T_amb};
    model_.make_consistent(state_);
    integ_.reset_history();
    integ_.invalidate_jacobian();

    const double feed = std::clamp(init.feed_per_mw * p_el * 1e-6, sc_.plant.clay_feed.min, sc_.plant.clay_feed.max);
    const auto n_open = static_cast<long>(std::ceil(init.hold / dt - 1e-9));
    for (long i = 0; i < n_open; ++i) {
        const double ramp = std::min(1.0, static_cast<double>(i) * dt / init.ramp);
        state_.d.p_el = p_el * ramp;
        state_.u.clay_feed = feed * ramp;
        model_.set_inputs(state_.u, state_.d);
        dae::DaeState st{state_.t, std::move(state_.x), std::move(state_.y)};
        st = integ_.step(st);
        state_.t = st.t;
        state_.x = std::move(st.x);
        state_.y = std::move(st.y);
    }
    state_.d.p_el = p_el;
    state_.u.clay_feed = feed;
    meas_ = measure(model_.diagnostics(state_));
    sup_ = control::make_supervisor_state(sc_.controller, sc_.plant, state_.u, meas_);
    run_for(p_el, init.settle);
    state_.t = 0.0;
}

Sample PlantRunner::step(const control::SetpointCommand& cmd, std::size_t period) {
    const double dt = sc_.sim_dt();
    const auto out = control::plant_supervisor(cmd, meas_, sup_, sc_.controller, sc_.plant, state_.t, dt);
    state_.u = out.u;
    state_.d.p_el = out.p_el;
    model_.set_inputs(state_.u, state_.d);
    dae::DaeState st{state_.t, std::move(state_.x), std::move(state_.y)};
    st = integ_.step(st);
    state_.t = st.t;
    state_.x = std::move(st.x);
    state_.y = std::move(st.y);

    const auto dg = model_.diagnostics(state_);
    meas_ = measure(dg);
    Sample s;
    s.t = state_.t;
    s.period = period;
    s.p_setpoint = cmd.p_ehgg_setpoint;
    s.p_el = out.p_el;
    s.T_out = meas_.T_calciner_out - control::kCelsiusOffset;
    s.clay_feed = out.u.clay_feed;
    s.fan_dp = out.u.fan_dp;
    s.fresh_air = out.u.fresh_air;
    s.loop_flow = dg.F_loop;
    s.product = dg.product_metakaolin;
    s.calcination = dg.product_calcination;
    s.T_ehgg = dg.T_ehgg - control::kCelsiusOffset;
    s.in_band = s.T_out >= sc_.controller.band_low_celsius && s.T_out <= sc_.controller.band_high_celsius;
    s.tripped = out.tripped;
    return s;
}

void PlantRunner::run_for(double p_el, double duration) {
    const auto n = static_cast<long>(std::llround(duration / sc_.sim_dt()));
    const control::SetpointCommand cmd{p_el, state_.t, state_.t + duration + sc_.sim_dt()};
    for (long i = 0; i < n; ++i) {
        step(cmd);
    }
}

double PlantRunner::product_metakaolin_mass() const {
    chem::Composition c;
    c[chem::SpeciesId::Metakaolin] =
        state_.x[model_.x_quad() + dae::quad::kProduct + static_cast<std::size_t>(chem::SpeciesId::Metakaolin)];
    return model_.thermo().mass(c);
}

double PlantRunner::ehgg_energy() const { return state_.x[model_.x_quad() + dae::quad::kEhggElectric]; }

double PlantRunner::fan_energy() const { return state_.x[model_.x_quad() + dae::quad::kFanElectric]; }

IntegratedResult run_hierarchical(const Scenario& sc) {
    sc.validate();
    const auto& fc = sc.forecasts;
    const auto& net = sc.network;
    IntegratedResult res;

    try {
        res.schedule = ems::optimize_schedule(net, fc, sc.devices);
    } catch (const InfeasibleError& e) {
        throw StageError("schedule", e.what(), std::move(res), 3);
    } catch (const ConvergenceError& e) {
        throw StageError("schedule", e.what(), std::move(res), 3);
    }
    res.verifier = ems::verify_schedule_ac(res.schedule, net, fc, sc.devices, sc.verify_gap_tol);

    const std::size_t n_steps = sc.steps_per_period();
    const double period_s = sc.period_seconds();
    const double dt = sc.sim_dt();
    const auto ehgg_bus = *net.bus_index(sc.devices.ehgg.bus);

    PlantRunner runner(sc);
    try {
        runner.warm_start(res.schedule.p_ehgg.front() * 1e6);
    } catch (const Error& e) {
        throw StageError("initialize", e.what(), std::move(res), 3);
    }

    res.trajectory.reserve(fc.H * n_steps);
    for (std::size_t k = 0; k < fc.H; ++k) {
        PeriodRecord rec;
        rec.period = k;
        rec.t_start = static_cast<double>(k) * period_s;
        rec.t_end = static_cast<double>(k + 1) * period_s;
        rec.ehgg_scheduled = res.schedule.p_ehgg[k] * fc.dt;
        rec.clay_planned = sc.devices.production.kappa * rec.ehgg_scheduled;
        const control::SetpointCommand cmd{res.schedule.p_ehgg[k] * 1e6, rec.t_start, rec.t_end};
        const double e0 = runner.ehgg_energy();
        const double f0 = runner.fan_energy();
        const double m0 = runner.product_metakaolin_mass();
        try {
            for (std::size_t i = 0; i < n_steps; ++i) {
                auto s = runner.step(cmd, k);
                // The clock is rebuilt from integers so that every step lands
                // in exactly one period.
                s.t = rec.t_start + static_cast<double>(i + 1) * dt;
                if (!s.in_band) {
                    rec.band_violation += dt;
                }
                res.trajectory.push_back(s);
            }
        } catch (const Error& e) {
            std::ostringstream os;
            os << "period " << k << ": " << e.what();
            res.safety_events = runner.supervisor().events;
            res.kpis = compute_kpis(res.periods, fc);
            throw StageError("simulate", os.str(), std::move(res), 3);
        }
        rec.ehgg_actual = (runner.ehgg_energy() - e0) / kJoulePerMWh;
        rec.fan_electric = (runner.fan_energy() - f0) / kJoulePerMWh;
        rec.clay = (runner.product_metakaolin_mass() - m0) * 1e-3;

        // Realized import: the exact feeder with the plant's actual demand.
        auto loads = ems::scheduled_loads(res.schedule, k, net, fc, sc.devices);
        loads.p[ehgg_bus] += (rec.ehgg_actual - rec.ehgg_scheduled + rec.fan_electric) / fc.dt / net.base_mva;
        try {
            const auto pf = grid::solve_power_flow(net, loads, net.u0);
            rec.grid_import = pf.slack_p * net.base_mva * fc.dt;
        } catch (const Error& e) {
            std::ostringstream os;
            os << "period " << k << ": " << e.what();
            res.kpis = compute_kpis(res.periods, fc);
            throw StageError("kpi", os.str(), std::move(res), 3);
        }
        rec.voltage_violation = res.verifier[k].band_violation;
        rec.verifier_flagged = res.verifier[k].flagged;
        res.periods.push_back(rec);
    }
    res.safety_events = runner.supervisor().events;
    res.kpis = compute_kpis(res.periods, fc);
    return res;
}

KappaFit fit_kappa(const std::vector<double>& power_mw, const std::vector<double>& production_tph) {
    if (power_mw.empty() || power_mw.size() != production_tph.size()) {
        throw ValidationError("fit_kappa: need matching, non-empty power and production series");
    }
    KappaFit fit;
    fit.power = power_mw;
    fit.production = production_tph;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < power_mw.size(); ++i) {
        sxy += power_mw[i] * production_tph[i];
        sxx += power_mw[i] * power_mw[i];
    }
    if (!(sxx > 0.0)) {
        throw ValidationError("fit_kappa: at least one power level must be non-zero");
    }
    fit.kappa = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < power_mw.size(); ++i) {
        fit.residuals.push_back(production_tph[i] - fit.kappa * power_mw[i]);
        ss += fit.residuals.back() * fit.residuals.back();
    }
    fit.rms = std::sqrt(ss / static_cast<double>(power_mw.size()));
    return fit;
}

KappaFit calibrate_kappa(const Scenario& sc, const std::vector<double>& power_mw, double settle, double window) {
    sc.validate();
    if (!(window > 0.0) || !(settle >= 0.0)) {
        throw ValidationError("calibrate_kappa: window must be > 0 and settle >= 0");
    }
    std::vector<double> production;
    for (double p : power_mw) {
        if (p < sc.devices.ehgg.p_min || p > sc.devices.ehgg.p_max) {
            std::ostringstream os;
            os << "calibrate_kappa: power level " << p << " MW outside the EHGG range";
            throw ValidationError(os.str());
        }
        PlantRunner runner(sc);
        runner.warm_start(p * 1e6);
        runner.run_for(p * 1e6, settle);
        const double m0 = runner.product_metakaolin_mass();
        runner.run_for(p * 1e6, window);
        production.push_back((runner.product_metakaolin_mass() - m0) / window * 3.6);
    }
    return fit_kappa(power_mw, production);
}

}  // namespace clayems::integrate
