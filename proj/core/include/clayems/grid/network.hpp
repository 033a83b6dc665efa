#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clayems::grid {

inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

enum class BusType { Substation, Load };

struct Bus {
    std::string id;
    BusType type = BusType::Load;
    std::vector<std::string> devices;  // names such as "pv", "wind", "bess", "ehgg"
};

// Directed from the parent (substation side) to the child.
struct Branch {
    std::string id;
    std::string from;
    std::string to;
    double r = 0.0;  // p.u.
    double x = 0.0;  // p.u.
};

struct RadialNetwork {
    double base_mva = 1.0;
    double base_kv = 1.0;
    double u0 = 1.0;  // substation squared voltage, p.u.^2
    std::vector<Bus> buses;
    std::vector<Branch> branches;

    std::optional<std::size_t> bus_index(std::string_view id) const;
};

struct NetworkIssue {
    std::string subject;  // bus or branch identifier, or "network"
    std::string message;
};

// Every violation of the radial assumptions: identifiers, a single
// substation, |E| = |N| - 1, one parent per bus, no cycles, connectivity,
// finite non-negative impedances. Empty when the network is valid.
std::vector<NetworkIssue> validate_radial(const RadialNetwork& net);

// Index form of a validated network.
struct Topology {
    std::size_t root = 0;
    std::vector<std::size_t> from;           // per branch, parent bus
    std::vector<std::size_t> to;             // per branch, child bus
    std::vector<std::size_t> parent_branch;  // per bus, kNone at the root
    std::vector<std::vector<std::size_t>> child_branches;  // per bus
    std::vector<std::size_t> order;          // buses, root first, parents before children
};

// Throws ValidationError listing every issue when the network is not radial.
Topology radial_topology(const RadialNetwork& net);

}  // namespace clayems::grid
