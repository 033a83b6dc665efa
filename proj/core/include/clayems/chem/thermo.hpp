#pragma once

#include <array>

#include "clayems/chem/species.hpp"

namespace clayems::chem {

// Ideal-gas plus incompressible-solid property library. Enthalpies carry the
// formation enthalpy, so H, U differences across the reaction include its heat.
class ThermoLibrary {
  public:
    // Shipped defaults; see data/chemistry.json for the same numbers.
    ThermoLibrary();
    explicit ThermoLibrary(std::array<Species, kNumSpecies> species);

    const Species& species(SpeciesId id) const noexcept { return species_[index(id)]; }

    double cp(SpeciesId id, double T) const noexcept;
    // h_f + integral of cp from the reference temperature; no range check.
    double molar_enthalpy(SpeciesId id, double T) const noexcept;

    // Extensive properties of a mixture. Throw DomainError / RangeError.
    double enthalpy(double T, double P, const Composition& n) const;
    double volume(double T, double P, const Composition& n) const;
    double internal_energy(double T, double P, const Composition& n) const;
    double heat_capacity(double T, const Composition& n) const;  // dH/dT, J/K

    double mass(const Composition& n) const noexcept;  // kg (or kg/m3, kg/s)
    double mean_molar_mass(const Composition& n, Phase phase) const noexcept;

    // Unchecked phase sums, valid for signed amounts (molar flows).
    double phase_enthalpy(Phase phase, double T, const Composition& n) const noexcept;
    double phase_internal_energy(Phase phase, double T, double P, const Composition& n) const noexcept;
    double solid_volume(const Composition& n) const noexcept;

    // Inverse of internal_energy / enthalpy in T by safeguarded Newton on [250, 2000] K.
    double temperature_from_internal_energy(double u_target, double P, const Composition& n,
                                            double T_guess) const;
    double temperature_from_enthalpy(double h_target, double P, const Composition& n,
                                     double T_guess) const;

    std::array<double, kNumElements> element_totals(const Composition& n) const noexcept;

  private:
    std::array<Species, kNumSpecies> species_;
};

std::array<Species, kNumSpecies> default_species();

}  // namespace clayems::chem
