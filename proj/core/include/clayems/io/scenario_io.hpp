#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "clayems/integrate/scenario.hpp"

namespace clayems::io {

inline constexpr int kSchemaVersion = 1;

// Command-line overrides applied after parsing and before validation.
struct ScenarioOverrides {
    std::optional<double> sim_dt;         // s
    std::optional<double> horizon_hours;  // truncates the forecasts
};

// Reads a scenario bundle: one JSON naming the plant, network, forecast and
// optional chemistry files by paths relative to itself. Every failure is a
// ValidationError whose message starts with "<file>#<json pointer>".
integrate::Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides = {});

grid::RadialNetwork parse_network(const std::string& json_text, const std::string& source = "network");
dae::PlantDescription parse_plant(const std::string& json_text, const std::string& source = "plant");

// Columns t, price, co2_intensity, pv_avail, wind_avail, then any number of
// load_p:<bus> and load_q:<bus>. Lines starting with '#' are comments; t
// must count periods 0, 1, 2, ...
ems::Forecasts parse_forecast_csv(const std::string& text, double dt_hours, double co2_price,
                                  const std::string& source = "forecast");

std::string read_text_file(const std::filesystem::path& path);  // throws ValidationError

}  // namespace clayems::io
