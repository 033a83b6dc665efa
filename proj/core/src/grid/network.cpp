#include "clayems/grid/network.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "clayems/error.hpp"

namespace clayems::grid {

std::optional<std::size_t> RadialNetwork::bus_index(std::string_view id) const {
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

namespace {

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        parent[b] = a;
        return true;
    }
};

}  // namespace

std::vector<NetworkIssue> validate_radial(const RadialNetwork& net) {
    std::vector<NetworkIssue> issues;
    auto issue = [&](std::string subject, std::string message) {
        issues.push_back({std::move(subject), std::move(message)});
    };

    if (!(std::isfinite(net.u0) && net.u0 > 0.0)) {
        issue("network", "u0 must be > 0");
    }
    if (!(net.base_mva > 0.0) || !(net.base_kv > 0.0)) {
        issue("network", "base_mva and base_kv must be > 0");
    }
    if (net.buses.empty()) {
        issue("network", "no buses");
        return issues;
    }

    std::set<std::string> seen;
    std::size_t substations = 0;
    for (const auto& b : net.buses) {
        if (b.id.empty()) {
            issue("network", "bus with empty id");
        } else if (!seen.insert(b.id).second) {
            issue(b.id, "duplicate bus id");
        }
        if (b.type == BusType::Substation) {
            ++substations;
        }
    }
    if (substations == 0) {
        issue("network", "no substation bus");
    } else if (substations > 1) {
        issue("network", "more than one substation bus (only one is supported)");
    }

    const std::size_t n = net.buses.size();
    if (net.branches.size() + 1 != n) {
        std::ostringstream os;
        os << "radial network needs |E| = |N| - 1, got " << net.branches.size() << " branches for " << n
           << " buses";
        issue("network", os.str());
    }

    std::set<std::string> branch_ids;
    std::vector<std::size_t> parents(n, 0);
    DisjointSets sets(n);
    for (const auto& br : net.branches) {
        const std::string name = br.id.empty() ? br.from + "-" + br.to : br.id;
        if (!branch_ids.insert(name).second) {
            issue(name, "duplicate branch id");
        }
        if (!std::isfinite(br.r) || br.r < 0.0) {
            issue(name, "branch resistance r must be finite and >= 0");
        }
        if (!std::isfinite(br.x) || br.x < 0.0) {
            issue(name, "branch reactance x must be finite and >= 0");
        }
        const auto a = net.bus_index(br.from);
        const auto b = net.bus_index(br.to);
        if (!a) {
            issue(name, "unknown from-bus '" + br.from + "'");
        }
        if (!b) {
            issue(name, "unknown to-bus '" + br.to + "'");
        }
        if (!a || !b) {
            continue;
        }
        if (*a == *b) {
            issue(name, "branch connects a bus to itself");
            continue;
        }
        ++parents[*b];
        if (net.buses[*b].type == BusType::Substation) {
            issue(name, "substation '" + br.to + "' cannot have a parent");
        }
        if (!sets.unite(*a, *b)) {
            issue(name, "branch closes a cycle");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& b = net.buses[i];
        if (b.type != BusType::Substation && parents[i] == 0) {
            issue(b.id, "bus has no parent");
        }
        if (parents[i] > 1) {
            issue(b.id, "bus has more than one parent");
        }
    }
    if (substations >= 1) {
        std::size_t root = 0;
        while (net.buses[root].type != BusType::Substation) {
            ++root;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (sets.find(i) != sets.find(root)) {
                issue(net.buses[i].id, "bus is not connected to the substation");
            }
        }
    }
    return issues;
}

Topology radial_topology(const RadialNetwork& net) {
    const auto issues = validate_radial(net);
    if (!issues.empty()) {
        std::ostringstream os;
        os << "network is not a valid radial network:";
        for (const auto& i : issues) {
            os << "\n  " << i.subject << ": " << i.message;
        }
        throw ValidationError(os.str());
    }
    const std::size_t n = net.buses.size();
    Topology topo;
    topo.parent_branch.assign(n, kNone);
    topo.child_branches.assign(n, {});
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        const auto a = *net.bus_index(net.branches[k].from);
        const auto b = *net.bus_index(net.branches[k].to);
        topo.from.push_back(a);
        topo.to.push_back(b);
        topo.parent_branch[b] = k;
        topo.child_branches[a].push_back(k);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (net.buses[i].type == BusType::Substation) {
            topo.root = i;
        }
    }
    topo.order.push_back(topo.root);
    for (std::size_t head = 0; head < topo.order.size(); ++head) {
        for (auto k : topo.child_branches[topo.order[head]]) {
            topo.order.push_back(topo.to[k]);
        }
    }
    return topo;
}

}  // namespace clayems::grid
