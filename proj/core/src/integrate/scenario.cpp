#include "clayems/integrate/scenario.hpp"

#include <cmath>
#include <sstream>

#include "clayems/error.hpp"

namespace clayems::integrate {

void InitConfig::validate() const {
    if (!(T_amb > 0.0) || !(feed_per_mw >= 0.0) || !(fan_dp >= 0.0)) {
        throw ValidationError("init: T_amb must be > 0, feed_per_mw and fan_dp >= 0");
    }
    if (!(ramp > 0.0) || !(hold >= ramp) || !(settle >= 0.0)) {
        throw ValidationError("init: need ramp > 0, hold >= ramp and settle >= 0");
    }
}

std::size_t Scenario::steps_per_period() const {
    const double ratio = period_seconds() / sim_dt();
    const double n = std::round(ratio);
    if (!(n >= 1.0) || std::abs(ratio - n) > 1e-9 * ratio) {
        std::ostringstream os;
        os.precision(17);
        os << "EMS dt of " << forecasts.dt << " h (" << period_seconds()
           << " s) is not an integer multiple of the simulation dt " << sim_dt() << " s";
        throw ValidationError(os.str());
    }
    return static_cast<std::size_t>(n);
}

void Scenario::validate() const {
    if (plant.topology != dae::PlantTopology::Loop) {
        throw ValidationError("scenario: the plant must use the loop topology");
    }
    plant.validate();
    if (grid::radial_topology(network).root >= network.buses.size()) {
        throw ValidationError("scenario: network has no substation");
    }
    forecasts.validate();
    devices.validate(network);
    controller.validate();
    try {
        solver.validate();
    } catch (const DomainError& e) {
        throw ValidationError(std::string("scenario: ") + e.what());
    }
    init.validate();
    if (!(verify_gap_tol > 0.0)) {
        throw ValidationError("scenario: verify_gap_tol must be > 0");
    }
    steps_per_period();

    auto agree = [](double mw, double w) { return std::abs(mw * 1e6 - w) <= 1e-9 * std::max(1.0, std::abs(w)); };
    if (!agree(devices.ehgg.p_min, plant.ehgg.p_min) || !agree(devices.ehgg.p_max, plant.ehgg.p_max)) {
        std::ostringstream os;
        os.precision(17);
        os << "scenario: EHGG range [" << devices.ehgg.p_min << ", " << devices.ehgg.p_max
           << "] MW in the device specs disagrees with the plant range [" << plant.ehgg.p_min * 1e-6 << ", "
           << plant.ehgg.p_max * 1e-6 << "] MW";
        throw ValidationError(os.str());
    }
}

}  // namespace clayems::integrate
