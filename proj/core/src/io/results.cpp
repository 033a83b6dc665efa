#include "clayems/io/results.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "clayems/io/scenario_io.hpp"
#include "json_read.hpp"

namespace clayems::io {

using detail::Json;

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0.0 ? "inf" : "-inf";
    }
    if (v == 0.0) {
        return "0";  // folds -0
    }
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

namespace {

void dump(const Json& j, int indent, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) {
                    out += ",\n";
                }
                first = false;
                out += pad_in + Json(it.key()).dump() + ": ";
                dump(it.value(), indent + 1, out);
            }
            out += "\n" + pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
            out += flat ? "[" : "[\n";
            bool first = true;
            for (const auto& e : j) {
                if (!first) {
                    out += flat ? ", " : ",\n";
                }
                first = false;
                if (!flat) {
                    out += pad_in;
                }
                dump(e, indent + 1, out);
            }
            out += flat ? "]" : "\n" + pad + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_number(v) : "null";
            return;
        }
        default:
            out += j.dump();
            return;
    }
}

std::string serialize(const Json& j) {
    std::string out;
    dump(j, 0, out);
    out += "\n";
    return out;
}

Json header(const std::string& kind) {
    Json j = Json::object();
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind;
    return j;
}

Json numbers(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) {
        a.push_back(x);
    }
    return a;
}

Json objective(const ems::ObjectiveBreakdown& o) {
    Json j = Json::object();
    j["phi_c"] = o.phi_c;
    j["phi_co2"] = o.phi_co2;
    j["phi_u"] = o.phi_u;
    j["phi_cc"] = o.phi_cc;
    j["total"] = o.total();
    return j;
}

std::string branch_label(const grid::Branch& b) { return b.id.empty() ? b.from + "-" + b.to : b.id; }

}  // namespace

std::string to_csv(const Table& t) {
    std::string out = "# schema_version=" + std::to_string(kSchemaVersion) + " kind=" + t.kind + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out += (i ? "," : "") + t.columns[i];
    }
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                out += ",";
            }
            out += format_number(row[i]);
        }
        out += "\n";
    }
    return out;
}

std::string to_json(const Table& t) {
    Json j = header(t.kind);
    Json cols = Json::object();
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        Json a = Json::array();
        for (const auto& row : t.rows) {
            a.push_back(row[c]);
        }
        cols[t.columns[c]] = std::move(a);
    }
    j["rows"] = t.rows.size();
    j["columns"] = std::move(cols);
    return serialize(j);
}

std::string render(const Table& t, SeriesFormat f) { return f == SeriesFormat::Csv ? to_csv(t) : to_json(t); }

const char* extension(SeriesFormat f) { return f == SeriesFormat::Csv ? ".csv" : ".json"; }

Table schedule_table(const ems::Schedule& s, const grid::RadialNetwork& net) {
    Table t;
    t.kind = "schedule";
    t.columns = {"period", "p_ehgg_mw", "p_bess_mw", "p_charge_mw", "p_discharge_mw", "p_grid_mw", "q_grid_mvar",
                 "p_pv_mw", "p_wind_mw", "soc_end_mwh"};
    for (const auto& b : net.buses) {
        t.columns.push_back("U:" + b.id);
    }
    for (const auto& b : net.branches) {
        t.columns.push_back("P:" + branch_label(b));
    }
    for (const auto& b : net.branches) {
        t.columns.push_back("Q:" + branch_label(b));
    }
    for (std::size_t k = 0; k < s.H; ++k) {
        std::vector<double> r{static_cast<double>(k), s.p_ehgg[k], s.p_bess[k], s.p_charge[k], s.p_discharge[k],
                              s.p_grid[k], s.q_grid[k], s.p_pv[k], s.p_wind[k],
                              s.soc.empty() ? 0.0 : s.soc[k + 1]};
        r.insert(r.end(), s.U[k].begin(), s.U[k].end());
        r.insert(r.end(), s.P[k].begin(), s.P[k].end());
        r.insert(r.end(), s.Q[k].begin(), s.Q[k].end());
        t.rows.push_back(std::move(r));
    }
    return t;
}

Table trajectory_table(const std::vector<integrate::Sample>& samples) {
    Table t;
    t.kind = "trajectory";
    t.columns = {"t_s",        "period",    "p_setpoint_w", "p_el_w",     "T_out_c",   "clay_feed_kg_s",
                 "fan_dp_pa",  "fresh_air_kg_s", "loop_flow_kg_s", "product_kg_s", "calcination",
                 "T_ehgg_c",   "in_band",   "tripped"};
    for (const auto& s : samples) {
        t.rows.push_back({s.t, static_cast<double>(s.period), s.p_setpoint, s.p_el, s.T_out, s.clay_feed, s.fan_dp,
                          s.fresh_air, s.loop_flow, s.product, s.calcination, s.T_ehgg, s.in_band ? 1.0 : 0.0,
                          s.tripped ? 1.0 : 0.0});
    }
    return t;
}

Table periods_table(const std::vector<integrate::PeriodRecord>& periods) {
    Table t;
    t.kind = "periods";
    t.columns = {"period",          "t_start_s",       "t_end_s",          "ehgg_scheduled_mwh", "ehgg_actual_mwh",
                 "fan_electric_mwh", "grid_import_mwh", "clay_t",          "clay_planned_t",     "band_violation_s",
                 "voltage_violation", "verifier_flagged"};
    for (const auto& p : periods) {
        t.rows.push_back({static_cast<double>(p.period), p.t_start, p.t_end, p.ehgg_scheduled, p.ehgg_actual,
                          p.fan_electric, p.grid_import, p.clay, p.clay_planned, p.band_violation,
                          p.voltage_violation ? 1.0 : 0.0, p.verifier_flagged ? 1.0 : 0.0});
    }
    return t;
}

std::string schedule_summary_json(const ems::Schedule& s, const ems::Forecasts& fc, const ems::DeviceSpecs& dev,
                                  const ems::Schedule* flat) {
    Json j = header("schedule_summary");
    j["periods"] = s.H;
    j["dt_hours"] = s.dt;
    j["objective"] = objective(s.objective);
    j["solver_objective"] = s.solver_objective;
    j["clay_produced_t"] = s.clay_produced;
    j["production_target_t"] = dev.production.daily_target;
    j["kappa_t_per_mwh"] = dev.production.kappa;
    double energy = 0.0;
    double import = 0.0;
    for (std::size_t k = 0; k < s.H; ++k) {
        energy += s.p_ehgg[k] * fc.dt;
        import += s.p_grid[k] * fc.dt;
    }
    j["ehgg_energy_mwh"] = energy;
    j["grid_import_mwh"] = import;
    if (flat) {
        Json f = Json::object();
        f["p_ehgg_mw"] = flat->p_ehgg.empty() ? 0.0 : flat->p_ehgg.front();
        f["objective"] = objective(flat->objective);
        j["flat_schedule"] = std::move(f);
        j["saving_vs_flat"] = flat->objective.total() - s.objective.total();
    }
    return serialize(j);
}

std::string verifier_json(const std::vector<ems::PeriodCheck>& checks, const grid::RadialNetwork& net,
                          double gap_tol) {
    Json j = header("verifier");
    j["gap_tol"] = gap_tol;
    Json ids = Json::array();
    for (const auto& b : net.buses) {
        ids.push_back(b.id);
    }
    j["buses"] = std::move(ids);
    std::size_t flagged = 0;
    double worst = 0.0;
    Json periods = Json::array();
    for (std::size_t k = 0; k < checks.size(); ++k) {
        const auto& c = checks[k];
        Json p = Json::object();
        p["period"] = k;
        p["converged"] = c.converged;
        p["U_exact"] = numbers(c.U_exact);
        p["losses_mw"] = c.losses;
        p["max_gap"] = c.max_gap;
        p["band_violation"] = c.band_violation;
        p["flagged"] = c.flagged;
        p["message"] = c.message;
        periods.push_back(std::move(p));
        flagged += c.flagged ? 1 : 0;
        worst = std::max(worst, c.max_gap);
    }
    j["flagged_periods"] = flagged;
    j["max_gap"] = worst;
    j["periods"] = std::move(periods);
    return serialize(j);
}

std::string kpis_json(const integrate::KpiReport& k, const std::vector<control::SafetyEvent>& events) {
    Json j = header("kpis");
    j["ehgg_scheduled_mwh"] = k.ehgg_scheduled;
    j["ehgg_actual_mwh"] = k.ehgg_actual;
    j["max_ehgg_mismatch_mwh"] = k.max_ehgg_mismatch;
    j["fan_electric_mwh"] = k.fan_electric;
    j["grid_import_mwh"] = k.grid_import;
    j["clay_t"] = k.clay;
    j["clay_planned_t"] = k.clay_planned;
    j["band_violation_minutes"] = k.band_violation_minutes;
    j["realized_cost"] = k.realized_cost;
    j["realized_co2_t"] = k.realized_co2;
    j["realized_co2_cost"] = k.realized_co2_cost;
    j["voltage_violation_periods"] = k.voltage_violation_periods;
    j["flagged_periods"] = k.flagged_periods;
    Json ev = Json::array();
    for (const auto& e : events) {
        Json o = Json::object();
        o["t_s"] = e.t;
        o["temperature_k"] = e.temperature;
        ev.push_back(std::move(o));
    }
    j["safety_events"] = std::move(ev);
    return serialize(j);
}

std::string kappa_json(const integrate::KappaFit& fit, double settle, double window) {
    Json j = header("kappa_fit");
    j["kappa_t_per_mwh"] = fit.kappa;
    j["rms_t_per_h"] = fit.rms;
    j["power_mw"] = numbers(fit.power);
    j["production_t_per_h"] = numbers(fit.production);
    j["residuals_t_per_h"] = numbers(fit.residuals);
    j["settle_s"] = settle;
    j["window_s"] = window;
    j["product"] = "metakaolin at the separator product port";
    return serialize(j);
}

std::string infeasibility_json(const ems::ScheduleInfeasible& e) {
    Json j = header("infeasibility_certificate");
    j["reason"] = e.reason();
    j["message"] = e.what();
    j["required"] = e.required();
    j["achievable"] = e.achievable();
    j["phase1_optimum"] = e.phase1_optimum();
    return serialize(j);
}

std::string error_json(const std::string& stage, const std::string& message) {
    Json j = header("error");
    j["stage"] = stage;
    j["message"] = message;
    return serialize(j);
}

std::string powerflow_json(const grid::RadialNetwork& net, const PowerFlowReport& r) {
    const auto& s = r.sweep;
    const std::size_t E = net.branches.size();
    const std::size_t B = net.buses.size() - 1;
    const auto res = grid::branch_flow_residuals(net, s);
    auto block_norm = [&](std::size_t from, std::size_t n) {
        double m = 0.0;
        for (std::size_t i = from; i < from + n; ++i) {
            m = std::max(m, std::abs(res[i]));
        }
        return m;
    };
    Json j = header("powerflow");
    j["base_mva"] = net.base_mva;
    j["sweeps"] = s.sweeps;
    Json norms = Json::object();
    norms["voltage_drop"] = block_norm(0, E);
    norms["active_balance"] = block_norm(E, B);
    norms["reactive_balance"] = block_norm(E + B, B);
    norms["current_definition"] = block_norm(E + 2 * B, E);
    norms["max"] = block_norm(0, res.size());
    j["residual_inf_norms_pu"] = std::move(norms);

    double load = 0.0;
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        load += s.p_load[i];
    }
    const double losses = grid::active_losses(net, s);
    j["slack_p_pu"] = s.slack_p;
    j["slack_q_pu"] = s.slack_q;
    j["total_load_pu"] = load;
    j["losses_pu"] = losses;
    j["slack_balance_error_pu"] = s.slack_p - (load + losses);
    j["newton_converged"] = r.newton_converged;
    if (r.newton_converged) {
        double d = 0.0;
        auto cmp = [&d](const std::vector<double>& a, const std::vector<double>& b) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                d = std::max(d, std::abs(a[i] - b[i]));
            }
        };
        cmp(s.U, r.newton.U);
        cmp(s.P, r.newton.P);
        cmp(s.Q, r.newton.Q);
        cmp(s.l, r.newton.l);
        j["newton_max_abs_difference"] = d;
    }
    Json buses = Json::array();
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        Json b = Json::object();
        b["id"] = net.buses[i].id;
        b["U"] = s.U[i];
        b["p_load_pu"] = s.p_load[i];
        b["q_load_pu"] = s.q_load[i];
        buses.push_back(std::move(b));
    }
    j["buses"] = std::move(buses);
    Json branches = Json::array();
    for (std::size_t k = 0; k < E; ++k) {
        Json b = Json::object();
        b["id"] = branch_label(net.branches[k]);
        b["P"] = s.P[k];
        b["Q"] = s.Q[k];
        b["l"] = s.l[k];
        branches.push_back(std::move(b));
    }
    j["branches"] = std::move(branches);
    return serialize(j);
}

std::string scalars_json(const std::string& kind, const std::vector<std::pair<std::string, double>>& values) {
    Json j = header(kind);
    for (const auto& [k, v] : values) {
        j[k] = v;
    }
    return serialize(j);
}

std::string manifest_json(const std::string& command, const std::vector<std::pair<std::string, std::string>>& files,
                          const std::string& status) {
    Json j = header("manifest");
    j["command"] = command;
    j["status"] = status;
    Json f = Json::array();
    for (const auto& [name, kind] : files) {
        Json o = Json::object();
        o["file"] = name;
        o["kind"] = kind;
        f.push_back(std::move(o));
    }
    j["files"] = std::move(f);
    return serialize(j);
}

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

}  // namespace clayems::io
