#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "clayems/error.hpp"
#include "clayems/integrate/run.hpp"
#include "clayems/io/results.hpp"
#include "clayems/io/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace clayems;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct Options {
    std::string scenario;
    std::string out;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::string format = "csv";

    // simulate
    std::optional<double> power;
    // powerflow
    std::size_t period = 0;
    bool zero_load = false;
    // calibrate-kappa
    std::vector<double> levels;
    double settle = 3600.0;
    double window = 600.0;
};

// Collects written files so every command ends with a manifest.
class Bundle {
  public:
    Bundle(fs::path dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)) {}

    void write(const std::string& name, const std::string& kind, const std::string& content) {
        io::write_file(dir_, name, content);
        files_.emplace_back(name, kind);
    }
    void table(const std::string& stem, const io::Table& t, io::SeriesFormat f) {
        write(stem + io::extension(f), t.kind, io::render(t, f));
    }
    void finish(const std::string& status) { io::write_file(dir_, "manifest.json", io::manifest_json(command_, files_, status)); }

  private:
    fs::path dir_;
    std::string command_;
    std::vector<std::pair<std::string, std::string>> files_;
};

io::SeriesFormat series_format(const Options& o) { return o.format == "json" ? io::SeriesFormat::Json : io::SeriesFormat::Csv; }

integrate::Scenario load(const Options& o) {
    io::ScenarioOverrides ov;
    ov.sim_dt = o.dt;
    ov.horizon_hours = o.horizon;
    return io::load_scenario(o.scenario, ov);
}

int cmd_simulate(const Options& o) {
    const auto sc = load(o);
    Bundle out(o.out, "simulate");
    const auto& dev = sc.devices;
    const double p_mw = o.power ? *o.power
                                : std::clamp(ems::flat_ehgg_power(sc.forecasts, dev), dev.ehgg.p_min, dev.ehgg.p_max);
    if (p_mw < dev.ehgg.p_min || p_mw > dev.ehgg.p_max) {
        throw ValidationError("--power " + io::format_number(p_mw) + " MW lies outside the EHGG range");
    }
    const std::size_t n_steps = sc.steps_per_period();
    const double dt = sc.sim_dt();
    std::vector<integrate::Sample> samples;
    integrate::PlantRunner runner(sc);
    double band = 0.0;
    std::string failure;
    try {
        runner.warm_start(p_mw * 1e6);
        for (std::size_t k = 0; k < sc.forecasts.H; ++k) {
            const double t0 = static_cast<double>(k) * sc.period_seconds();
            const control::SetpointCommand cmd{p_mw * 1e6, t0, t0 + sc.period_seconds()};
            for (std::size_t i = 0; i < n_steps; ++i) {
                auto s = runner.step(cmd, k);
                s.t = t0 + static_cast<double>(i + 1) * dt;
                band += s.in_band ? 0.0 : dt;
                samples.push_back(s);
            }
        }
    } catch (const Error& e) {
        failure = e.what();
    }
    out.table("trajectory", io::trajectory_table(samples), series_format(o));
    const double duration = samples.empty() ? 0.0 : samples.back().t;
    const auto dg = runner.diagnostics();
    out.write("summary.json", "simulate_summary",
              io::scalars_json("simulate_summary",
                               {{"p_ehgg_mw", p_mw},
                                {"dt_s", dt},
                                {"duration_s", duration},
                                {"steps", static_cast<double>(samples.size())},
                                {"ehgg_energy_mwh", runner.ehgg_energy() / 3.6e9},
                                {"fan_energy_mwh", runner.fan_energy() / 3.6e9},
                                {"band_violation_minutes", band / 60.0},
                                {"safety_events", static_cast<double>(runner.supervisor().events.size())},
                                {"final_T_out_c", dg.cells.back().T_g - control::kCelsiusOffset},
                                {"final_clay_feed_kg_s", runner.state().u.clay_feed},
                                {"final_product_kg_s", dg.product_metakaolin},
                                {"final_calcination", dg.product_calcination}}));
    if (!failure.empty()) {
        out.write("error.json", "error", io::error_json("simulate", failure));
        out.finish("failed");
        std::cerr << "simulate: " << failure << "\n";
        return kExitSolver;
    }
    out.finish("ok");
    return kExitOk;
}

int cmd_schedule(const Options& o) {
    const auto sc = load(o);
    Bundle out(o.out, "schedule");
    ems::Schedule s;
    try {
        s = ems::optimize_schedule(sc.network, sc.forecasts, sc.devices);
    } catch (const ems::ScheduleInfeasible& e) {
        out.write("infeasibility.json", "infeasibility_certificate", io::infeasibility_json(e));
        out.finish("infeasible");
        std::cerr << "schedule: " << e.what() << "\n";
        return kExitSolver;
    }
    std::optional<ems::Schedule> flat;
    try {
        flat = ems::flat_schedule(sc.network, sc.forecasts, sc.devices);
    } catch (const InfeasibleError& e) {
        std::cerr << "schedule: flat comparison skipped: " << e.what() << "\n";
    }
    const auto checks = ems::verify_schedule_ac(s, sc.network, sc.forecasts, sc.devices, sc.verify_gap_tol);
    out.table("schedule", io::schedule_table(s, sc.network), series_format(o));
    out.write("schedule_summary.json", "schedule_summary",
              io::schedule_summary_json(s, sc.forecasts, sc.devices, flat ? &*flat : nullptr));
    out.write("verifier.json", "verifier", io::verifier_json(checks, sc.network, sc.verify_gap_tol));
    out.finish("ok");
    return kExitOk;
}

int cmd_powerflow(const Options& o) {
    const auto sc = load(o);
    Bundle out(o.out, "powerflow");
    const auto& net = sc.network;
    auto loads = grid::BusInjections::zero(net);
    if (!o.zero_load) {
        if (o.period >= sc.forecasts.H) {
            throw ValidationError("--period " + std::to_string(o.period) + " is beyond the " +
                                  std::to_string(sc.forecasts.H) + " forecast periods");
        }
        for (std::size_t j = 0; j < net.buses.size(); ++j) {
            const auto& id = net.buses[j].id;
            if (const auto it = sc.forecasts.load_p.find(id); it != sc.forecasts.load_p.end()) {
                loads.p[j] = it->second[o.period] / net.base_mva;
            }
            if (const auto it = sc.forecasts.load_q.find(id); it != sc.forecasts.load_q.end()) {
                loads.q[j] = it->second[o.period] / net.base_mva;
            }
        }
    }
    io::PowerFlowReport rep;
    rep.loads = loads;
    try {
        rep.sweep = grid::solve_power_flow(net, loads, net.u0);
    } catch (const ConvergenceError& e) {
        out.write("error.json", "error", io::error_json("powerflow", e.what()));
        out.finish("failed");
        std::cerr << "powerflow: " << e.what() << "\n";
        return kExitSolver;
    }
    try {
        rep.newton = grid::solve_power_flow_newton(net, loads, net.u0);
        rep.newton_converged = true;
    } catch (const ConvergenceError& e) {
        std::cerr << "powerflow: Newton cross-check did not converge: " << e.what() << "\n";
    }
    out.write("powerflow.json", "powerflow", io::powerflow_json(net, rep));
    out.finish("ok");
    return kExitOk;
}

void write_run(Bundle& out, const integrate::Scenario& sc, const integrate::IntegratedResult& r, io::SeriesFormat f) {
    if (r.schedule.H > 0) {
        out.table("schedule", io::schedule_table(r.schedule, sc.network), f);
        out.write("schedule_summary.json", "schedule_summary",
                  io::schedule_summary_json(r.schedule, sc.forecasts, sc.devices, nullptr));
    }
    if (!r.verifier.empty()) {
        out.write("verifier.json", "verifier", io::verifier_json(r.verifier, sc.network, sc.verify_gap_tol));
    }
    out.table("trajectory", io::trajectory_table(r.trajectory), f);
    out.table("periods", io::periods_table(r.periods), f);
    out.write("kpis.json", "kpis", io::kpis_json(r.kpis, r.safety_events));
}

int cmd_run(const Options& o) {
    const auto sc = load(o);
    Bundle out(o.out, "run");
    try {
        const auto r = integrate::run_hierarchical(sc);
        write_run(out, sc, r, series_format(o));
    } catch (const integrate::StageError& e) {
        write_run(out, sc, e.partial(), series_format(o));
        out.write("error.json", "error", io::error_json(e.stage(), e.what()));
        out.finish("failed");
        std::cerr << "run: " << e.what() << "\n";
        return e.exit_code();
    }
    out.finish("ok");
    return kExitOk;
}

int cmd_calibrate(const Options& o) {
    const auto sc = load(o);
    Bundle out(o.out, "calibrate-kappa");
    auto levels = o.levels;
    if (levels.empty()) {
        const auto& e = sc.devices.ehgg;
        levels = {e.p_min, 0.5 * (e.p_min + e.p_max), e.p_max};
    }
    const auto fit = integrate::calibrate_kappa(sc, levels, o.settle, o.window);
    out.write("kappa.json", "kappa_fit", io::kappa_json(fit, o.settle, o.window));
    out.finish("ok");
    std::cout << "kappa = " << io::format_number(fit.kappa) << " t/MWh (rms " << io::format_number(fit.rms)
              << " t/h)\n";
    return kExitOk;
}

void common_flags(CLI::App* sub, Options& o) {
    sub->add_option("--scenario", o.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory")->required();
    sub->add_option("--dt", o.dt, "Simulation step, s");
    sub->add_option("--horizon", o.horizon, "Horizon, h (truncates the forecasts)");
    sub->add_option("--format", o.format, "Time-series format")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Calcined-clay plant and grid energy management"};
    app.require_subcommand(1);
    Options o;

    auto* simulate = app.add_subcommand("simulate", "Closed-loop plant at constant EHGG power");
    common_flags(simulate, o);
    simulate->add_option("--power", o.power, "EHGG power, MW (default: flat schedule)");

    auto* schedule = app.add_subcommand("schedule", "Optimize the day-ahead schedule and verify it on the feeder");
    common_flags(schedule, o);

    auto* powerflow = app.add_subcommand("powerflow", "Exact branch-flow solution of the feeder");
    common_flags(powerflow, o);
    powerflow->add_option("--period", o.period, "Forecast period supplying the loads");
    powerflow->add_flag("--zero-load", o.zero_load, "Solve with every load at zero");

    auto* run = app.add_subcommand("run", "Schedule, simulate every period and report KPIs");
    common_flags(run, o);

    auto* calibrate = app.add_subcommand("calibrate-kappa", "Fit t/MWh from steady states at several powers");
    common_flags(calibrate, o);
    calibrate->add_option("--levels", o.levels, "EHGG power levels, MW")->delimiter(',');
    calibrate->add_option("--settle", o.settle, "Extra settling per level, s");
    calibrate->add_option("--window", o.window, "Averaging window per level, s");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*simulate) {
            return cmd_simulate(o);
        }
        if (*schedule) {
            return cmd_schedule(o);
        }
        if (*powerflow) {
            return cmd_powerflow(o);
        }
        if (*run) {
            return cmd_run(o);
        }
        return cmd_calibrate(o);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const StructuralError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}
