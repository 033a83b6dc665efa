#include "clayems/chem/chemistry_file.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "clayems/error.hpp"

namespace clayems::chem {

using nlohmann::json;

Chemistry parse_chemistry(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("chemistry file: ") + e.what());
    }
    auto species = default_species();
    KineticsParams kin;
    try {
        if (doc.contains("species")) {
            for (const auto& js : doc.at("species")) {
                const SpeciesId id = species_from_name(js.at("name").get<std::string>());
                Species& s = species[index(id)];
                if (js.contains("phase")) {
                    s.phase = js.at("phase").get<std::string>() == "solid" ? Phase::Solid : Phase::Gas;
                }
                if (js.contains("molar_mass")) s.molar_mass = js.at("molar_mass").get<double>();
                if (js.contains("formation_enthalpy")) {
                    s.formation_enthalpy = js.at("formation_enthalpy").get<double>();
                }
                if (js.contains("cp_coeffs")) {
                    const auto v = js.at("cp_coeffs").get<std::vector<double>>();
                    if (v.size() > 5) {
                        throw ValidationError("cp_coeffs: at most 5 coefficients (degree <= 4)");
                    }
                    s.cp_coeffs = {};
                    std::copy(v.begin(), v.end(), s.cp_coeffs.begin());
                }
                if (js.contains("solid_molar_volume")) {
                    s.solid_molar_volume = js.at("solid_molar_volume").get<double>();
                }
                if (js.contains("elements")) {
                    const auto& je = js.at("elements");
                    s.elements = {je.value("Al", 0), je.value("Si", 0), je.value("H", 0), je.value("O", 0),
                                  je.value("N", 0)};
                }
            }
        }
        if (doc.contains("kinetics")) {
            const auto& jk = doc.at("kinetics");
            kin.pre_exponential = jk.value("A", kin.pre_exponential);
            kin.activation_energy = jk.value("Ea", kin.activation_energy);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("chemistry file: ") + e.what());
    }
    kin.validate();
    return Chemistry{ThermoLibrary(species), kin};
}

Chemistry load_chemistry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open chemistry file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_chemistry(ss.str());
}

}  // namespace clayems::chem
