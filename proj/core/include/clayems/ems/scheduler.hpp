#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clayems/ems/lp.hpp"
#include "clayems/error.hpp"
#include "clayems/grid/network.hpp"
#include "clayems/grid/power_flow.hpp"

namespace clayems::ems {

struct Forecasts {
    std::size_t H = 0;   // periods
    double dt = 1.0;     // h
    std::vector<double> price;          // currency/MWh
    std::vector<double> co2_intensity;  // tCO2/MWh
    double co2_price = 0.0;             // currency/tCO2
    std::vector<double> pv_avail;       // MW
    std::vector<double> wind_avail;     // MW
    std::map<std::string, std::vector<double>> load_p;  // MW per bus id
    std::map<std::string, std::vector<double>> load_q;  // MVAr per bus id

    void validate() const;  // throws ValidationError
};

struct BessSpec {
    std::string bus;
    double capacity = 0.0;  // MWh
    double p_max = 0.0;     // MW, charge and discharge
    double eff_c = 1.0;
    double eff_d = 1.0;
    double soc0 = 0.5;      // fractions of capacity
    double soc_min = 0.0;
    double soc_max = 1.0;
};

struct EhggDevice {
    std::string bus;
    double p_min = 0.0;  // MW
    double p_max = 0.0;  // MW
};

struct ProductionSpec {
    double kappa = 0.0;         // t calcined clay per MWh of EHGG energy
    double daily_target = 0.0;  // t over the horizon
};

struct ObjectiveWeights {
    double cost = 1.0;     // on the electricity bill
    double co2 = 1.0;      // on the CO2 bill
    double voltage = 0.0;  // currency per p.u.^2 of |U - U_nom| per bus and period
    double clay = 0.0;     // currency per t of calcined clay
};

struct DeviceSpecs {
    std::optional<BessSpec> bess;
    EhggDevice ehgg;
    std::optional<std::string> pv_bus;
    std::optional<std::string> wind_bus;
    ProductionSpec production;
    ObjectiveWeights weights;
    double grid_import_max = 1.0e3;  // MW
    double u_min = 0.81;             // p.u.^2
    double u_max = 1.21;
    double u_nom = 1.0;

    void validate(const grid::RadialNetwork& net) const;  // throws ValidationError
};

struct ObjectiveBreakdown {
    double phi_c = 0.0;    // weighted electricity cost
    double phi_co2 = 0.0;  // weighted CO2 cost
    double phi_u = 0.0;    // weighted voltage deviation
    double phi_cc = 0.0;   // weighted clay value (subtracted)
    double total() const noexcept { return phi_c + phi_co2 + phi_u - phi_cc; }
};

struct Schedule {
    std::size_t H = 0;
    double dt = 1.0;
    std::vector<double> p_ehgg;  // MW, the EHGG set-point series
    std::vector<double> p_bess;  // MW, discharge positive
    std::vector<double> p_charge;
    std::vector<double> p_discharge;
    std::vector<double> p_grid;  // MW imported at the substation
    std::vector<double> q_grid;  // MVAr
    std::vector<double> p_pv;
    std::vector<double> p_wind;
    std::vector<double> soc;     // MWh, H + 1 values starting at the initial charge
    std::vector<std::vector<double>> U;  // [period][bus], planning squared voltages
    std::vector<std::vector<double>> P;  // [period][branch], p.u.
    std::vector<std::vector<double>> Q;
    ObjectiveBreakdown objective;
    double solver_objective = 0.0;
    double clay_produced = 0.0;  // t, kappa * EHGG energy
};

// The LP with the variable indices needed to read it back.
struct ScheduleProblem {
    LinearProgram lp;
    std::size_t H = 0;
    double dt = 1.0;
    double base_mva = 1.0;
};

// Thrown before solving when the production target cannot be met, and after
// solving when the LP is infeasible. Carries a machine-readable certificate.
class ScheduleInfeasible : public InfeasibleError {
  public:
    ScheduleInfeasible(const std::string& what, std::string reason, double required, double achievable,
                       double phase1_optimum = 0.0)
        : InfeasibleError(what),
          reason_(std::move(reason)),
          required_(required),
          achievable_(achievable),
          phase1_(phase1_optimum) {}
    const std::string& reason() const noexcept { return reason_; }
    double required() const noexcept { return required_; }
    double achievable() const noexcept { return achievable_; }
    double phase1_optimum() const noexcept { return phase1_; }

  private:
    std::string reason_;
    double required_;
    double achievable_;
    double phase1_;
};

// LinDistFlow multi-period LP. Variable names are "<kind>[t]" or
// "<kind>[t][id]" (P, Q per branch id; U, dev per bus id).
ScheduleProblem build_schedule_lp(const grid::RadialNetwork& net, const Forecasts& fc, const DeviceSpecs& dev);

// Reads the series back by name, recomputes the objective components and
// checks the SoC recursion. Throws StructuralError on a name mismatch and
// InfeasibleError/ConvergenceError when the LP status is not optimal.
Schedule extract_schedule(const ScheduleProblem& prob, const LpResult& sol, const grid::RadialNetwork& net,
                          const Forecasts& fc, const DeviceSpecs& dev);

// build + solve + extract.
Schedule optimize_schedule(const grid::RadialNetwork& net, const Forecasts& fc, const DeviceSpecs& dev,
                           const LpOptions& options = {});

// EHGG power of the naive flat schedule, target / (kappa * H * dt), MW.
double flat_ehgg_power(const Forecasts& fc, const DeviceSpecs& dev);

// Same LP with the EHGG pinned to the flat power; the remaining devices are
// still dispatched optimally.
Schedule flat_schedule(const grid::RadialNetwork& net, const Forecasts& fc, const DeviceSpecs& dev,
                       const LpOptions& options = {});

struct PeriodCheck {
    bool converged = false;
    std::vector<double> U_exact;  // per bus
    double losses = 0.0;          // MW
    double max_gap = 0.0;         // max |U_exact - U_planning|, p.u.^2
    bool band_violation = false;
    bool flagged = false;         // gap above tolerance, band violation or divergence
    std::string message;
};

// Exact branch-flow solve of every period with the scheduled injections.
std::vector<PeriodCheck> verify_schedule_ac(const Schedule& sched, const grid::RadialNetwork& net,
                                            const Forecasts& fc, const DeviceSpecs& dev, double gap_tol = 0.01);

// Net consumption per bus (p.u.) in period t for a schedule.
grid::BusInjections scheduled_loads(const Schedule& sched, std::size_t t, const grid::RadialNetwork& net,
                                    const Forecasts& fc, const DeviceSpecs& dev);

}  // namespace clayems::ems
