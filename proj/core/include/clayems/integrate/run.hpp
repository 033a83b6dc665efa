#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clayems/integrate/scenario.hpp"

namespace clayems::integrate {

// One simulation step as seen by the operator; t is seconds from the start
// of the horizon, taken at the end of the step.
struct Sample {
    double t = 0.0;
    std::size_t period = 0;
    double p_setpoint = 0.0;    // W
    double p_el = 0.0;          // W
    double T_out = 0.0;         // degC, calciner outlet gas
    double clay_feed = 0.0;     // kg/s
    double fan_dp = 0.0;        // Pa
    double fresh_air = 0.0;     // kg/s
    double loop_flow = 0.0;     // kg/s
    double product = 0.0;       // kg/s metakaolin at the product port
    double calcination = 0.0;   // product calcination degree
    double T_ehgg = 0.0;        // degC
    bool in_band = false;
    bool tripped = false;
};

// Per-period totals; every field follows from the samples and the plant
// quadratures, so KPIs can be recomputed from these rows alone.
struct PeriodRecord {
    std::size_t period = 0;
    double t_start = 0.0;                // s
    double t_end = 0.0;                  // s
    double ehgg_scheduled = 0.0;         // MWh
    double ehgg_actual = 0.0;            // MWh, integrated P_el
    double fan_electric = 0.0;           // MWh
    double grid_import = 0.0;            // MWh, exact power flow at realized plant demand
    double clay = 0.0;                   // t metakaolin
    double clay_planned = 0.0;           // t, kappa * scheduled energy
    double band_violation = 0.0;         // s outside the temperature band
    bool voltage_violation = false;      // verifier: exact U outside the band
    bool verifier_flagged = false;
};

struct KpiReport {
    double ehgg_scheduled = 0.0;          // MWh
    double ehgg_actual = 0.0;             // MWh
    double max_ehgg_mismatch = 0.0;       // MWh, worst period
    double fan_electric = 0.0;            // MWh
    double grid_import = 0.0;             // MWh
    double clay = 0.0;                    // t
    double clay_planned = 0.0;            // t
    double band_violation_minutes = 0.0;
    double realized_cost = 0.0;           // currency
    double realized_co2 = 0.0;            // t CO2
    double realized_co2_cost = 0.0;       // currency
    std::size_t voltage_violation_periods = 0;
    std::size_t flagged_periods = 0;
};

// Realized objective terms and totals from per-period records.
KpiReport compute_kpis(const std::vector<PeriodRecord>& periods, const ems::Forecasts& fc);

struct IntegratedResult {
    ems::Schedule schedule;
    std::vector<ems::PeriodCheck> verifier;
    std::vector<Sample> trajectory;
    std::vector<PeriodRecord> periods;
    KpiReport kpis;
    std::vector<control::SafetyEvent> safety_events;
};

// Failure of one stage ("schedule", "verify", "initialize", "simulate",
// "kpi"). Carries whatever was produced before the failure.
class StageError : public Error {
  public:
    StageError(std::string stage, const std::string& message, IntegratedResult partial, int exit_code);
    const std::string& stage() const noexcept { return stage_; }
    const IntegratedResult& partial() const noexcept { return partial_; }
    int exit_code() const noexcept { return exit_code_; }

  private:
    std::string stage_;
    IntegratedResult partial_;
    int exit_code_;
};

// Closed-loop plant: model, integrator and supervisor advanced together.
class PlantRunner {
  public:
    explicit PlantRunner(const Scenario& sc);
    PlantRunner(const PlantRunner&) = delete;
    PlantRunner& operator=(const PlantRunner&) = delete;

    // Cold start, open-loop ramp to p_el and closed-loop settling; the clock
    // is reset to zero afterwards. Throws ConvergenceError or StateError.
    void warm_start(double p_el);

    // One simulation step under the command.
    Sample step(const control::SetpointCommand& cmd, std::size_t period = 0);
    // Repeats step() for a duration (rounded to whole steps).
    void run_for(double p_el, double duration);

    const dae::PlantModel& model() const noexcept { return model_; }
    const dae::PlantState& state() const noexcept { return state_; }
    const control::SupervisorState& supervisor() const noexcept { return sup_; }
    dae::PlantDiagnostics diagnostics() const { return model_.diagnostics(state_); }
    // Cumulative metakaolin leaving at the product port since t = 0 of the
    // model, kg.
    double product_metakaolin_mass() const;
    double ehgg_energy() const;  // J
    double fan_energy() const;   // J

  private:
    const Scenario& sc_;
    dae::PlantModel model_;
    dae::Integrator integ_;
    dae::PlantState state_;
    control::SupervisorState sup_;
    control::Measurements meas_;
};

// Schedule, verify, initialize, simulate every period, assemble KPIs.
// Throws StageError with the partial result on failure.
IntegratedResult run_hierarchical(const Scenario& sc);

struct KappaFit {
    std::vector<double> power;       // MW
    std::vector<double> production;  // t/h metakaolin
    std::vector<double> residuals;   // t/h, production - kappa * power
    double kappa = 0.0;              // t/MWh
    double rms = 0.0;                // t/h
};

// Least-squares line through the origin of steady production against EHGG
// power. Each level is settled with the closed loop, then production is
// averaged over the final `window` seconds.
KappaFit calibrate_kappa(const Scenario& sc, const std::vector<double>& power_mw, double settle = 3600.0,
                         double window = 600.0);

// Through-origin least squares on given points.
KappaFit fit_kappa(const std::vector<double>& power_mw, const std::vector<double>& production_tph);

}  // namespace clayems::integrate
