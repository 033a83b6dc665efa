#pragma once

#include <filesystem>
#include <string>

#include "clayems/chem/kinetics.hpp"
#include "clayems/chem/thermo.hpp"

namespace clayems::chem {

struct Chemistry {
    ThermoLibrary thermo;
    KineticsParams kinetics;
};

// {"species": [{name, phase, molar_mass, formation_enthalpy, cp_coeffs,
//   solid_molar_volume, elements}], "kinetics": {"A", "Ea"}}.
// Species missing from the file keep their defaults.
Chemistry parse_chemistry(const std::string& json_text);
Chemistry load_chemistry(const std::filesystem::path& path);

}  // namespace clayems::chem
