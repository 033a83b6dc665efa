#include "clayems/io/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json_read.hpp"

namespace clayems::io {

using detail::Json;
using detail::Node;

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError(path.string() + ": cannot open file");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

namespace {

void read_cyclone(const Node& n, units::CycloneGeometry& c) {
    n.allow({"volume", "inlet_area", "ua_amb", "separation"});
    c.volume = n.positive("volume", c.volume);
    c.inlet_area = n.positive("inlet_area", c.inlet_area);
    c.ua_amb = n.non_negative("ua_amb", c.ua_amb);
    if (const auto s = n.maybe("separation")) {
        s->allow({"kappa", "exponent", "limit_loading"});
        c.separation.kappa = s->non_negative("kappa", c.separation.kappa);
        c.separation.exponent = s->positive("exponent", c.separation.exponent);
        c.separation.limit_loading = s->non_negative("limit_loading", c.separation.limit_loading);
    }
}

dae::ActuatorRange read_range(const Node& n) {
    const auto v = n.numbers(2);
    if (!(v[0] >= 0.0 && v[0] <= v[1])) {
        n.fail("range must satisfy 0 <= min <= max");
    }
    return {v[0], v[1]};
}

}  // namespace

dae::PlantDescription parse_plant(const std::string& json_text, const std::string& source) {
    const Json j = detail::parse_json(json_text, source);
    const Node root(j, source);
    root.allow({"schema_version", "description", "calciner", "cyclones", "connectors", "ehgg", "fan", "filter",
                "actuators", "ambient_pressure"});
    detail::check_schema_version(root, kSchemaVersion);

    dae::PlantDescription p;
    p.topology = dae::PlantTopology::Loop;
    if (const auto c = root.maybe("calciner")) {
        c->allow({"length", "diameter", "n_cells", "friction_factor", "h_sg", "ua_amb"});
        auto& g = p.calciner;
        g.length = c->positive("length", g.length);
        g.diameter = c->positive("diameter", g.diameter);
        c->read("n_cells", g.n_cells);
        if (g.n_cells < 3) {
            c->at("n_cells").fail("'n_cells' must be >= 3");
        }
        g.friction_factor = c->positive("friction_factor", g.friction_factor);
        g.h_sg = c->positive("h_sg", g.h_sg);
        g.ua_amb = c->non_negative("ua_amb", g.ua_amb);
    }
    if (const auto c = root.maybe("cyclones")) {
        c->allow({"preheater1", "preheater2", "separator"});
        const std::map<std::string, dae::CycloneRole> roles{{"preheater1", dae::CycloneRole::Preheater1},
                                                            {"preheater2", dae::CycloneRole::Preheater2},
                                                            {"separator", dae::CycloneRole::Separator}};
        for (const auto& [name, role] : roles) {
            if (const auto n = c->maybe(name)) {
                read_cyclone(*n, p.cyclones[static_cast<std::size_t>(role)]);
            }
        }
    }
    if (const auto c = root.maybe("connectors")) {
        c->allow({"calciner_separator", "separator_preheater2", "preheater2_preheater1", "loop", "vent"});
        p.c_calciner_separator = c->positive("calciner_separator", p.c_calciner_separator);
        p.c_separator_preheater2 = c->positive("separator_preheater2", p.c_separator_preheater2);
        p.c_preheater2_preheater1 = c->positive("preheater2_preheater1", p.c_preheater2_preheater1);
        p.c_loop = c->positive("loop", p.c_loop);
        // null or absent closes the loop
        if (const auto v = c->maybe("vent")) {
            const double cv = v->number();
            if (!(cv > 0.0)) {
                v->fail("'vent' must be > 0, or null for a closed loop");
            }
            p.c_vent = cv;
        } else {
            p.c_vent.reset();
        }
    }
    if (const auto e = root.maybe("ehgg")) {
        e->allow({"efficiency", "p_min_mw", "p_max_mw"});
        e->read("efficiency", p.ehgg.efficiency);
        p.ehgg.p_min = e->non_negative("p_min_mw", p.ehgg.p_min * 1e-6) * 1e6;
        p.ehgg.p_max = e->non_negative("p_max_mw", p.ehgg.p_max * 1e-6) * 1e6;
        if (!(p.ehgg.efficiency > 0.0 && p.ehgg.efficiency <= 1.0)) {
            e->at("efficiency").fail("'efficiency' must lie in (0, 1]");
        }
        if (p.ehgg.p_min > p.ehgg.p_max) {
            e->fail("'p_min_mw' must not exceed 'p_max_mw'");
        }
    }
    if (const auto f = root.maybe("fan")) {
        f->allow({"efficiency", "dp_range"});
        f->read("efficiency", p.fan.efficiency);
        if (!(p.fan.efficiency > 0.0 && p.fan.efficiency <= 1.0)) {
            f->at("efficiency").fail("'efficiency' must lie in (0, 1]");
        }
        if (const auto r = f->maybe("dp_range")) {
            const auto range = read_range(*r);
            p.fan.dp_min = range.min;
            p.fan.dp_max = range.max;
        }
    }
    if (const auto f = root.maybe("filter")) {
        f->allow({"dust_removal", "k_dp"});
        f->read("dust_removal", p.filter.dust_removal);
        p.filter.k_dp = f->non_negative("k_dp", p.filter.k_dp);
    }
    if (const auto a = root.maybe("actuators")) {
        a->allow({"clay_feed", "fresh_air"});
        if (const auto r = a->maybe("clay_feed")) {
            p.clay_feed = read_range(*r);
        }
        if (const auto r = a->maybe("fresh_air")) {
            p.fresh_air = read_range(*r);
        }
    }
    p.ambient_pressure = root.positive("ambient_pressure", p.ambient_pressure);
    try {
        p.validate();
    } catch (const ValidationError& e) {
        root.fail(e.what());
    }
    return p;
}

grid::RadialNetwork parse_network(const std::string& json_text, const std::string& source) {
    const Json j = detail::parse_json(json_text, source);
    const Node root(j, source);
    root.allow({"schema_version", "description", "base_mva", "base_kv", "u0", "buses", "branches"});
    detail::check_schema_version(root, kSchemaVersion);

    grid::RadialNetwork net;
    net.base_mva = root.positive("base_mva", net.base_mva);
    net.base_kv = root.positive("base_kv", net.base_kv);
    net.u0 = root.positive("u0", net.u0);

    const Node buses = root.at("buses");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const Node b = buses[i];
        b.allow({"id", "type", "devices"});
        grid::Bus bus;
        bus.id = b.at("id").string();
        const std::string type = b.has("type") ? b.at("type").string() : "load";
        if (type == "substation") {
            bus.type = grid::BusType::Substation;
        } else if (type == "load") {
            bus.type = grid::BusType::Load;
        } else {
            b.at("type").fail("bus '" + bus.id + "': type must be \"substation\" or \"load\"");
        }
        if (const auto d = b.maybe("devices")) {
            for (std::size_t k = 0; k < d->size(); ++k) {
                bus.devices.push_back((*d)[k].string());
            }
        }
        net.buses.push_back(std::move(bus));
    }

    const Node branches = root.at("branches");
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const Node b = branches[i];
        b.allow({"id", "from", "to", "r", "x"});
        grid::Branch br;
        br.from = b.at("from").string();
        br.to = b.at("to").string();
        br.id = b.has("id") ? b.at("id").string() : br.from + "-" + br.to;
        br.r = b.num("r");
        br.x = b.num("x");
        if (br.r < 0.0) {
            b.at("r").fail("branch '" + br.id + "': resistance r must be >= 0");
        }
        if (br.x < 0.0) {
            b.at("x").fail("branch '" + br.id + "': reactance x must be >= 0");
        }
        net.branches.push_back(std::move(br));
    }

    const auto issues = grid::validate_radial(net);
    if (!issues.empty()) {
        std::ostringstream os;
        os << "network is not a valid radial feeder:";
        for (const auto& is : issues) {
            os << " [" << is.subject << "] " << is.message << ";";
        }
        root.fail(os.str());
    }
    return net;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

// Locale-independent; rejects trailing garbage.
double parse_double(const std::string& s, bool& ok) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto r = std::from_chars(first, last, v);
    ok = r.ec == std::errc() && r.ptr == last && std::isfinite(v);
    return v;
}

}  // namespace

ems::Forecasts parse_forecast_csv(const std::string& text, double dt_hours, double co2_price,
                                  const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    auto fail = [&](const std::string& msg) -> void {
        throw ValidationError(source + ":" + std::to_string(line_no) + ": " + msg);
    };

    ems::Forecasts fc;
    fc.dt = dt_hours;
    fc.co2_price = co2_price;
    std::vector<std::vector<double>*> target;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        auto cells = split_csv_line(line);
        if (header.empty()) {
            header = cells;
            const std::vector<std::string> fixed{"t", "price", "co2_intensity", "pv_avail", "wind_avail"};
            for (std::size_t i = 0; i < fixed.size(); ++i) {
                if (i >= header.size() || header[i] != fixed[i]) {
                    fail("header must start with t,price,co2_intensity,pv_avail,wind_avail");
                }
            }
            target = {nullptr, &fc.price, &fc.co2_intensity, &fc.pv_avail, &fc.wind_avail};
            for (std::size_t i = fixed.size(); i < header.size(); ++i) {
                const auto& h = header[i];
                const auto colon = h.find(':');
                const std::string kind = colon == std::string::npos ? h : h.substr(0, colon);
                const std::string bus = colon == std::string::npos ? "" : h.substr(colon + 1);
                if ((kind != "load_p" && kind != "load_q") || bus.empty()) {
                    fail("column '" + h + "': expected load_p:<bus> or load_q:<bus>");
                }
                auto& m = kind == "load_p" ? fc.load_p : fc.load_q;
                if (m.count(bus)) {
                    fail("column '" + h + "' appears twice");
                }
                target.push_back(&m[bus]);
            }
            continue;
        }
        if (cells.size() != header.size()) {
            fail("expected " + std::to_string(header.size()) + " values, found " + std::to_string(cells.size()));
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            bool ok = false;
            const double v = parse_double(cells[i], ok);
            if (!ok) {
                fail("column '" + header[i] + "': '" + cells[i] + "' is not a finite number");
            }
            if (i == 0) {
                if (v != static_cast<double>(fc.H)) {
                    fail("t must count periods 0, 1, 2, ...; expected " + std::to_string(fc.H));
                }
                continue;
            }
            target[i]->push_back(v);
        }
        ++fc.H;
    }
    if (header.empty()) {
        throw ValidationError(source + ": empty forecast file");
    }
    try {
        fc.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(source + ": " + e.what());
    }
    return fc;
}

namespace {

ems::Forecasts truncate(const ems::Forecasts& fc, std::size_t H) {
    ems::Forecasts out = fc;
    out.H = H;
    auto cut = [H](std::vector<double>& v) { v.resize(H); };
    cut(out.price);
    cut(out.co2_intensity);
    cut(out.pv_avail);
    cut(out.wind_avail);
    for (auto& [bus, v] : out.load_p) {
        cut(v);
    }
    for (auto& [bus, v] : out.load_q) {
        cut(v);
    }
    return out;
}

std::string relative_file(const Node& n) {
    const auto s = n.string();
    if (s.empty()) {
        n.fail("file name must not be empty");
    }
    return s;
}

control::PIController read_pi(const Node& n) {
    n.allow({"kp", "ki"});
    control::PIController c;
    c.kp = n.num("kp");
    c.ki = n.num("ki");
    return c;
}

}  // namespace

integrate::Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides) {
    const std::string source = path.string();
    const Json j = detail::parse_json(read_text_file(path), source);
    const Node root(j, source);
    root.allow({"schema_version", "name", "description", "plant", "network", "forecast", "chemistry", "ems",
                "devices", "production", "objective_weights", "controller", "simulation", "init"});
    detail::check_schema_version(root, kSchemaVersion);
    const auto dir = path.parent_path();
    auto file = [&](const char* key) { return dir / relative_file(root.at(key)); };

    integrate::Scenario sc;
    const auto plant_path = file("plant");
    sc.plant = parse_plant(read_text_file(plant_path), plant_path.string());
    const auto net_path = file("network");
    sc.network = parse_network(read_text_file(net_path), net_path.string());
    if (root.maybe("chemistry")) {
        const auto chem_path = file("chemistry");
        try {
            sc.chemistry = chem::load_chemistry(chem_path);
        } catch (const ValidationError&) {
            throw;
        } catch (const Error& e) {
            throw ValidationError(chem_path.string() + ": " + e.what());
        }
    }

    const Node ems_node = root.at("ems");
    ems_node.allow({"dt_hours", "horizon_hours", "co2_price", "verify_gap_tol"});
    const double dt_h = ems_node.positive("dt_hours", 1.0);
    const double co2_price = ems_node.non_negative("co2_price", 0.0);
    sc.verify_gap_tol = ems_node.positive("verify_gap_tol", sc.verify_gap_tol);
    const auto fc_path = file("forecast");
    sc.forecasts = parse_forecast_csv(read_text_file(fc_path), dt_h, co2_price, fc_path.string());

    std::optional<double> horizon = overrides.horizon_hours;
    if (!horizon && ems_node.has("horizon_hours")) {
        horizon = ems_node.positive("horizon_hours", 0.0);
    }
    if (horizon) {
        const double periods = *horizon / dt_h;
        const double n = std::round(periods);
        if (!(n >= 1.0) || std::abs(periods - n) > 1e-9 * periods) {
            std::ostringstream os;
            os.precision(17);
            os << "horizon " << *horizon << " h is not a positive multiple of the EMS dt " << dt_h << " h";
            (overrides.horizon_hours ? root : ems_node.at("horizon_hours")).fail(os.str());
        }
        if (static_cast<std::size_t>(n) > sc.forecasts.H) {
            std::ostringstream os;
            os << "horizon of " << n << " periods exceeds the " << sc.forecasts.H << " forecast periods";
            root.fail(os.str());
        }
        sc.forecasts = truncate(sc.forecasts, static_cast<std::size_t>(n));
    }

    const Node dev = root.at("devices");
    dev.allow({"ehgg", "bess", "pv", "wind", "grid_import_max_mw", "voltage"});
    {
        const Node e = dev.at("ehgg");
        e.allow({"bus", "p_min_mw", "p_max_mw"});
        sc.devices.ehgg.bus = e.at("bus").string();
        sc.devices.ehgg.p_min = e.non_negative("p_min_mw", 0.0);
        sc.devices.ehgg.p_max = e.non_negative("p_max_mw", 0.0);
        if (!sc.network.bus_index(sc.devices.ehgg.bus)) {
            e.at("bus").fail("EHGG bus '" + sc.devices.ehgg.bus + "' is not in the network");
        }
    }
    if (const auto b = dev.maybe("bess")) {
        b->allow({"bus", "capacity_mwh", "p_max_mw", "eff_c", "eff_d", "soc0", "soc_min", "soc_max"});
        ems::BessSpec s;
        s.bus = b->at("bus").string();
        if (!sc.network.bus_index(s.bus)) {
            b->at("bus").fail("BESS bus '" + s.bus + "' is not in the network");
        }
        s.capacity = b->positive("capacity_mwh", 0.0);
        s.p_max = b->non_negative("p_max_mw", 0.0);
        b->read("eff_c", s.eff_c);
        b->read("eff_d", s.eff_d);
        b->read("soc0", s.soc0);
        b->read("soc_min", s.soc_min);
        b->read("soc_max", s.soc_max);
        sc.devices.bess = s;
    }
    for (const char* key : {"pv", "wind"}) {
        if (const auto n = dev.maybe(key)) {
            n->allow({"bus"});
            const auto bus = n->at("bus").string();
            if (!sc.network.bus_index(bus)) {
                n->at("bus").fail(std::string(key) + " bus '" + bus + "' is not in the network");
            }
            (std::string(key) == "pv" ? sc.devices.pv_bus : sc.devices.wind_bus) = bus;
        }
    }
    sc.devices.grid_import_max = dev.non_negative("grid_import_max_mw", sc.devices.grid_import_max);
    if (const auto v = dev.maybe("voltage")) {
        v->allow({"u_min", "u_max", "u_nom"});
        v->read("u_min", sc.devices.u_min);
        v->read("u_max", sc.devices.u_max);
        v->read("u_nom", sc.devices.u_nom);
    }

    const Node prod = root.at("production");
    prod.allow({"kappa", "kappa_source", "daily_target_t"});
    sc.devices.production.kappa = prod.non_negative("kappa", 0.0);
    sc.devices.production.daily_target = prod.non_negative("daily_target_t", 0.0);

    if (const auto w = root.maybe("objective_weights")) {
        w->allow({"cost", "co2", "voltage", "clay"});
        auto& ow = sc.devices.weights;
        ow.cost = w->non_negative("cost", ow.cost);
        ow.co2 = w->non_negative("co2", ow.co2);
        ow.voltage = w->non_negative("voltage", ow.voltage);
        ow.clay = w->non_negative("clay", ow.clay);
    }

    const Node ctl = root.at("controller");
    ctl.allow({"band_celsius", "safety_celsius", "temperature", "flow", "loop_flow_setpoint", "fresh_air"});
    auto& cc = sc.controller;
    if (const auto b = ctl.maybe("band_celsius")) {
        const auto v = b->numbers(2);
        cc.band_low_celsius = v[0];
        cc.band_high_celsius = v[1];
    }
    if (const auto b = ctl.maybe("safety_celsius")) {
        const auto v = b->numbers(2);
        cc.safety_low_celsius = v[0];
        cc.safety_high_celsius = v[1];
    }
    cc.temperature = read_pi(ctl.at("temperature"));
    cc.flow = read_pi(ctl.at("flow"));
    cc.loop_flow_setpoint = ctl.positive("loop_flow_setpoint", cc.loop_flow_setpoint);
    cc.fresh_air = ctl.non_negative("fresh_air", cc.fresh_air);

    if (const auto s = root.maybe("simulation")) {
        s->allow({"dt_s", "newton_tol", "max_newton_iter", "fd_epsilon", "tol_alg", "max_dt_halvings",
                  "reuse_jacobian", "central_differences"});
        auto& sv = sc.solver;
        sv.dt = s->positive("dt_s", sv.dt);
        sv.newton_tol = s->positive("newton_tol", sv.newton_tol);
        s->read("max_newton_iter", sv.max_newton_iter);
        sv.fd_epsilon = s->positive("fd_epsilon", sv.fd_epsilon);
        sv.tol_alg = s->positive("tol_alg", sv.tol_alg);
        s->read("max_dt_halvings", sv.max_dt_halvings);
        s->read("reuse_jacobian", sv.reuse_jacobian);
        s->read("central_differences", sv.central_differences);
    }
    if (const auto i = root.maybe("init")) {
        i->allow({"T_amb", "feed_per_mw", "ramp_s", "hold_s", "settle_s", "fan_dp"});
        auto& in = sc.init;
        in.T_amb = i->positive("T_amb", in.T_amb);
        in.feed_per_mw = i->non_negative("feed_per_mw", in.feed_per_mw);
        in.ramp = i->positive("ramp_s", in.ramp);
        in.hold = i->positive("hold_s", in.hold);
        in.settle = i->non_negative("settle_s", in.settle);
        in.fan_dp = i->non_negative("fan_dp", in.fan_dp);
    }

    if (overrides.sim_dt) {
        if (!(*overrides.sim_dt > 0.0)) {
            throw ValidationError("--dt must be > 0");
        }
        sc.solver.dt = *overrides.sim_dt;
    }
    try {
        sc.validate();
    } catch (const ValidationError& e) {
        root.fail(e.what());
    }
    return sc;
}

}  // namespace clayems::io
