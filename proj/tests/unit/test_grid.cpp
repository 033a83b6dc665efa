#include <algorithm>
#include <cmath>
#include <string>

#include "clayems/error.hpp"
#include "clayems/grid/network.hpp"
#include "clayems/grid/power_flow.hpp"
#include "clayems/io/scenario_io.hpp"
#include "doctest.h"
#include "test_data.hpp"

using namespace clayems;
using namespace clayems::grid;

namespace {

Bus bus(std::string id, BusType type = BusType::Load) { return Bus{std::move(id), type, {}}; }

RadialNetwork line3() {
    RadialNetwork net;
    net.buses = {bus("ss", BusType::Substation), bus("1"), bus("2")};
    net.branches = {{"a", "ss", "1", 0.01, 0.02}, {"b", "1", "2", 0.02, 0.03}};
    return net;
}

RadialNetwork two_bus(double r, double x) {
    RadialNetwork net;
    net.buses = {bus("1", BusType::Substation), bus("2")};
    net.branches = {{"12", "1", "2", r, x}};
    return net;
}

RadialNetwork feeder() {
    return io::parse_network(io::read_text_file(test::data_dir() / "scenarios" / "default" / "network.json"));
}

BusInjections feeder_loads(const RadialNetwork& net) {
    auto inj = BusInjections::zero(net);
    const double p[] = {0.0, 0.08, -0.03, 0.2, 0.05, 0.12};
    const double q[] = {0.0, 0.03, 0.0, 0.05, 0.02, 0.04};
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        inj.p[i] = p[i];
        inj.q[i] = q[i];
    }
    return inj;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

bool mentions(const std::vector<NetworkIssue>& issues, const std::string& word) {
    return std::any_of(issues.begin(), issues.end(), [&](const NetworkIssue& i) {
        return i.message.find(word) != std::string::npos || i.subject == word;
    });
}

}  // namespace

TEST_SUITE("radial validation") {
    TEST_CASE("three-bus line is valid") {
        CHECK(validate_radial(line3()).empty());
        const auto topo = radial_topology(line3());
        CHECK(topo.root == 0);
        CHECK(topo.order.front() == 0);
        CHECK(topo.parent_branch[2] == 1);
    }

    TEST_CASE("closing a loop is reported") {
        auto net = line3();
        net.branches.push_back({"c", "2", "ss", 0.01, 0.01});
        const auto issues = validate_radial(net);
        CHECK_FALSE(issues.empty());
        CHECK(mentions(issues, "cycle"));
        CHECK_THROWS_AS(radial_topology(net), ValidationError);
    }

    TEST_CASE("a disconnected bus is reported by id") {
        auto net = line3();
        net.buses.push_back(bus("island"));
        const auto issues = validate_radial(net);
        CHECK(mentions(issues, "island"));
    }

    TEST_CASE("bad data") {
        auto two_roots = line3();
        two_roots.buses[2].type = BusType::Substation;
        CHECK_FALSE(validate_radial(two_roots).empty());

        auto negative = line3();
        negative.branches[1].r = -0.1;
        const auto issues = validate_radial(negative);
        CHECK(mentions(issues, "b"));

        auto unknown = line3();
        unknown.branches[1].to = "nowhere";
        CHECK(mentions(validate_radial(unknown), "nowhere") + mentions(validate_radial(unknown), "b") > 0);

        auto two_parents = line3();
        two_parents.buses.push_back(bus("3"));
        two_parents.branches.push_back({"c", "ss", "2", 0.01, 0.01});
        CHECK_FALSE(validate_radial(two_parents).empty());
    }

    TEST_CASE("shipped feeder") {
        const auto net = feeder();
        CHECK(validate_radial(net).empty());
        CHECK(net.buses.size() == 6);
        CHECK(net.branches.size() == 5);
    }
}

TEST_SUITE("branch flow residuals") {
    TEST_CASE("no-load network") {
        const auto net = line3();
        PowerFlowSolution s;
        s.U.assign(3, 1.0);
        s.P.assign(2, 0.0);
        s.Q.assign(2, 0.0);
        s.l.assign(2, 0.0);
        s.p_load.assign(3, 0.0);
        s.q_load.assign(3, 0.0);
        const auto r = branch_flow_residuals(net, s);
        CHECK(r.size() == 2 * 2 + 2 * 2);
        CHECK(inf_norm(r) == 0.0);
    }

    TEST_CASE("a voltage perturbation only touches adjacent branch rows") {
        const auto net = feeder();
        auto s = solve_power_flow(net, feeder_loads(net), 1.0);
        const std::size_t j = *net.bus_index("B2");
        s.U[j] += 1e-3;
        const auto r = branch_flow_residuals(net, s);
        const std::size_t m = net.branches.size(), n = net.buses.size();
        for (std::size_t k = 0; k < r.size(); ++k) {
            bool adjacent = false;
            if (k < m) {
                adjacent = net.branches[k].from == "B2" || net.branches[k].to == "B2";
            } else if (k >= m + 2 * (n - 1)) {
                adjacent = net.branches[k - m - 2 * (n - 1)].from == "B2";
            }
            if (adjacent) {
                CHECK(std::abs(r[k]) > 1e-5);
            } else {
                CHECK(std::abs(r[k]) < 1e-9);
            }
        }
    }

    TEST_CASE("size mismatch") {
        PowerFlowSolution s;
        CHECK_THROWS_AS(branch_flow_residuals(line3(), s), StructuralError);
    }
}

TEST_SUITE("sweep") {
    TEST_CASE("zero injections converge at once to a flat profile") {
        const auto net = feeder();
        const auto s = solve_power_flow(net, BusInjections::zero(net), 1.0);
        CHECK(s.sweeps <= 2);
        for (double u : s.U) {
            CHECK(u == 1.0);
        }
        CHECK(inf_norm(s.P) == 0.0);
        CHECK(inf_norm(s.Q) == 0.0);
        CHECK(inf_norm(branch_flow_residuals(net, s)) < 1e-10);
    }

    TEST_CASE("two-bus case") {
        const auto net = two_bus(0.01, 0.01);
        auto inj = BusInjections::zero(net);
        inj.p[1] = 0.1;
        inj.q[1] = 0.05;
        const auto s = solve_power_flow(net, inj, 1.0);
        CHECK(inf_norm(branch_flow_residuals(net, s)) <= 1e-10);
        CHECK(s.P[0] == doctest::Approx(0.1).epsilon(1e-3));
        CHECK(s.U[1] == doctest::Approx(0.997).epsilon(1e-4));
        // Hand substitution of the converged pair.
        const double U2 = 1.0 - 2.0 * (0.01 * s.P[0] + 0.01 * s.Q[0]) + 2e-4 * s.l[0];
        CHECK(std::abs(U2 - s.U[1]) < 1e-12);
        CHECK(std::abs(s.l[0] * 1.0 - (s.P[0] * s.P[0] + s.Q[0] * s.Q[0])) < 1e-12);
        CHECK(std::abs(s.P[0] - 0.1 - 0.01 * s.l[0]) < 1e-12);
    }

    TEST_CASE("higher resistance lowers the downstream voltage") {
        auto inj = BusInjections::zero(two_bus(0.01, 0.01));
        inj.p[1] = 0.2;
        inj.q[1] = 0.05;
        const auto a = solve_power_flow(two_bus(0.01, 0.01), inj, 1.0);
        const auto b = solve_power_flow(two_bus(0.02, 0.01), inj, 1.0);
        CHECK(b.U[1] < a.U[1]);
    }

    TEST_CASE("slack balance and squared-current identity on the feeder") {
        const auto net = feeder();
        const auto inj = feeder_loads(net);
        const auto s = solve_power_flow(net, inj, 1.0);
        CHECK(inf_norm(branch_flow_residuals(net, s)) <= 1e-8);
        double load = 0.0;
        for (std::size_t i = 1; i < inj.p.size(); ++i) {
            load += inj.p[i];
        }
        CHECK(std::abs(s.slack_p - load - active_losses(net, s)) <= 1e-8);
        const auto topo = radial_topology(net);
        for (std::size_t k = 0; k < net.branches.size(); ++k) {
            CHECK(std::abs(s.l[k] * s.U[topo.from[k]] - (s.P[k] * s.P[k] + s.Q[k] * s.Q[k])) <= 1e-10);
            CHECK(s.l[k] >= 0.0);
        }
        for (double u : s.U) {
            CHECK(u > 0.0);
        }
    }

    TEST_CASE("lossless limit") {
        auto net = feeder();
        for (auto& br : net.branches) {
            br.r = 0.0;
            br.x = 0.0;
        }
        const auto inj = feeder_loads(net);
        const auto s = solve_power_flow(net, inj, 1.0);
        for (double u : s.U) {
            CHECK(u == 1.0);
        }
        // L01 carries everything, L14 carries B4 + B5.
        CHECK(s.P[0] == doctest::Approx(0.08 - 0.03 + 0.2 + 0.05 + 0.12).epsilon(1e-15));
        CHECK(s.P[3] == doctest::Approx(0.05 + 0.12).epsilon(1e-15));
        CHECK(s.Q[2] == doctest::Approx(0.05).epsilon(1e-15));
    }

    TEST_CASE("Newton on the residuals agrees with the sweep") {
        const auto net = feeder();
        const auto inj = feeder_loads(net);
        const auto a = solve_power_flow(net, inj, 1.0);
        const auto b = solve_power_flow_newton(net, inj, 1.0);
        for (std::size_t i = 0; i < a.U.size(); ++i) {
            CHECK(std::abs(a.U[i] - b.U[i]) <= 1e-7);
        }
        for (std::size_t k = 0; k < a.P.size(); ++k) {
            CHECK(std::abs(a.P[k] - b.P[k]) <= 1e-7);
            CHECK(std::abs(a.Q[k] - b.Q[k]) <= 1e-7);
            CHECK(std::abs(a.l[k] - b.l[k]) <= 1e-7);
        }
    }

    TEST_CASE("voltage collapse raises a divergence carrying the last iterate") {
        const auto net = two_bus(0.1, 0.2);
        auto inj = BusInjections::zero(net);
        inj.p[1] = 5.0;
        inj.q[1] = 3.0;
        try {
            (void)solve_power_flow(net, inj, 1.0);
            FAIL("expected divergence");
        } catch (const PowerFlowDivergence& e) {
            CHECK(e.last_iterate().U.size() == 2);
        }
    }

    TEST_CASE("injection vectors must match the network") {
        const auto net = feeder();
        BusInjections inj;
        CHECK_THROWS_AS(solve_power_flow(net, inj, 1.0), StructuralError);
    }
}
