#include "clayems/chem/kinetics.hpp"

#include <cmath>

#include "clayems/error.hpp"

namespace clayems::chem {

void KineticsParams::validate() const {
    if (!(pre_exponential > 0.0)) {
        throw DomainError("kinetics: pre-exponential factor must be > 0");
    }
    if (!(activation_energy > 0.0)) {
        throw DomainError("kinetics: activation energy must be > 0");
    }
}

double rate_constant(const KineticsParams& kin, double T) {
    if (!(T > 0.0)) {
        throw DomainError("rate_constant: temperature must be > 0 K");
    }
    return kin.pre_exponential * std::exp(-kin.activation_energy / (kGasConstant * T));
}

Composition production_rates(double k, const Composition& c) noexcept {
    // Clipped at zero so that Newton iterates slightly below zero stay smooth.
    const double ck = std::max(c[SpeciesId::Kaolinite], 0.0);
    const double r = k * ck * ck * ck;
    Composition R;
    R[SpeciesId::Kaolinite] = -r;
    R[SpeciesId::Metakaolin] = r;
    R[SpeciesId::WaterVapor] = 2.0 * r;
    return R;
}

Composition reaction_rate(const KineticsParams& kin, double T, const Composition& c) {
    if (!c.non_negative()) {
        throw DomainError("reaction_rate: negative concentration");
    }
    return production_rates(rate_constant(kin, T), c);
}

}  // namespace clayems::chem
