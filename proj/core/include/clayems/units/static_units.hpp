#pragma once

#include "clayems/chem/thermo.hpp"
#include "clayems/units/stream.hpp"

namespace clayems::units {

// Electric hot gas generator: raises the stream enthalpy by eta_e * P_el and
// returns it at one common temperature. Throws RangeError above 2000 K.
Stream ehgg_outlet(const chem::ThermoLibrary& thermo, const Stream& inflow, double p_el, double eta_e);

struct FanResult {
    Stream outlet;
    double electrical_power = 0.0;  // W
    double hydraulic_power = 0.0;   // W delivered to the gas
};

// Circulating fan. The hydraulic work Q * dp ends up in the gas.
FanResult fan_outlet(const chem::ThermoLibrary& thermo, const Stream& inflow, double delta_p_rise,
                     double eta_fan);

struct FilterResult {
    Stream outlet;
    Stream captured;          // dust removed from the stream
    double pressure_drop = 0.0;  // Pa
};

// Particle filter with quadratic pressure loss k_dp * Q^2.
FilterResult filter_outlet(const Stream& inflow, double dust_removal, double k_dp);

}  // namespace clayems::units
