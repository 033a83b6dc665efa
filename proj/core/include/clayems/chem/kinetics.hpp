#pragma once

#include "clayems/chem/species.hpp"

namespace clayems::chem {

// Third-order dehydroxylation kinetics, r = k(T) c_kaolinite^3.
struct KineticsParams {
    double pre_exponential = 1.0e12;      // (m3/mol)^2 / s
    double activation_energy = 2.0e5;     // J/mol
    static constexpr int reaction_order = 3;

    void validate() const;  // throws DomainError
};

double rate_constant(const KineticsParams& kin, double T);

// Production rates (mol/(m3 s)) for a given rate constant; stoichiometry
// Kaolinite -> Metakaolin + 2 H2O.
Composition production_rates(double k, const Composition& c) noexcept;

// Full rate law; validates T > 0 and non-negative concentrations.
Composition reaction_rate(const KineticsParams& kin, double T, const Composition& c);

}  // namespace clayems::chem
