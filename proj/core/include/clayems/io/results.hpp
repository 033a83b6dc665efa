#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "clayems/ems/scheduler.hpp"
#include "clayems/grid/power_flow.hpp"
#include "clayems/integrate/run.hpp"

namespace clayems::io {

// 17 significant digits, independent of the global locale. Non-finite
// values print as nan, inf or -inf.
std::string format_number(double v);

// Dense numeric series with named columns.
struct Table {
    std::string kind;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

enum class SeriesFormat { Csv, Json };

// CSV: a "# schema_version=1 kind=<kind>" comment line, a header, then rows.
std::string to_csv(const Table& t);
// JSON: {"schema_version", "kind", "columns": {"<name>": [values...]}}.
std::string to_json(const Table& t);
std::string render(const Table& t, SeriesFormat f);
const char* extension(SeriesFormat f);

Table schedule_table(const ems::Schedule& s, const grid::RadialNetwork& net);
Table trajectory_table(const std::vector<integrate::Sample>& samples);
Table periods_table(const std::vector<integrate::PeriodRecord>& periods);

std::string schedule_summary_json(const ems::Schedule& s, const ems::Forecasts& fc, const ems::DeviceSpecs& dev,
                                  const ems::Schedule* flat);
std::string verifier_json(const std::vector<ems::PeriodCheck>& checks, const grid::RadialNetwork& net,
                          double gap_tol);
std::string kpis_json(const integrate::KpiReport& k, const std::vector<control::SafetyEvent>& events);
std::string kappa_json(const integrate::KappaFit& fit, double settle, double window);
std::string infeasibility_json(const ems::ScheduleInfeasible& e);
std::string error_json(const std::string& stage, const std::string& message);

struct PowerFlowReport {
    grid::BusInjections loads;
    grid::PowerFlowSolution sweep;
    grid::PowerFlowSolution newton;
    bool newton_converged = false;
};
std::string powerflow_json(const grid::RadialNetwork& net, const PowerFlowReport& r);

// Flat object of named scalars under a kind.
std::string scalars_json(const std::string& kind, const std::vector<std::pair<std::string, double>>& values);

// Names the files of a bundle with their kinds.
std::string manifest_json(const std::string& command, const std::vector<std::pair<std::string, std::string>>& files,
                          const std::string& status);

// Writes `content` to dir/name, creating dir. Throws Error on failure.
void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content);

}  // namespace clayems::io
