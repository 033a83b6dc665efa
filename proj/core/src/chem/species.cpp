#include "clayems/chem/species.hpp"

#include <cmath>

#include "clayems/error.hpp"

namespace clayems::chem {

namespace {
constexpr std::array<std::string_view, kNumSpecies> kNames = {"Kaolinite", "Metakaolin", "WaterVapor",
                                                              "Nitrogen", "Oxygen"};
}

std::string_view species_name(SpeciesId id) noexcept { return kNames[index(id)]; }

SpeciesId species_from_name(std::string_view name) {
    for (auto id : kAllSpecies) {
        if (kNames[index(id)] == name) {
            return id;
        }
    }
    throw ValidationError("unknown species '" + std::string(name) + "'");
}

void Species::validate() const {
    const std::string who(species_name(id));
    if (!(molar_mass > 0.0)) {
        throw DomainError(who + ": molar_mass must be > 0");
    }
    if (phase != phase_of(id)) {
        throw DomainError(who + ": phase does not match the species registry");
    }
    if (phase == Phase::Solid && !(solid_molar_volume > 0.0)) {
        throw DomainError(who + ": solid_molar_volume must be > 0");
    }
    // cp > 0 over the operating window, checked on a 1 K grid.
    for (double T = 250.0; T <= 1400.0; T += 1.0) {
        double cp = 0.0;
        double p = 1.0;
        for (double a : cp_coeffs) {
            cp += a * p;
            p *= T;
        }
        if (!(cp > 0.0)) {
            throw DomainError(who + ": cp(T) must be positive on [250, 1400] K");
        }
    }
}

double Composition::total() const noexcept {
    double s = 0.0;
    for (double v : moles) {
        s += v;
    }
    return s;
}

double Composition::total(Phase phase) const noexcept {
    double s = 0.0;
    for (auto id : kAllSpecies) {
        if (phase_of(id) == phase) {
            s += moles[index(id)];
        }
    }
    return s;
}

bool Composition::non_negative() const noexcept {
    for (double v : moles) {
        if (!(v >= 0.0)) {
            return false;
        }
    }
    return true;
}

Composition Composition::only(Phase phase) const noexcept {
    Composition out;
    for (auto id : kAllSpecies) {
        if (phase_of(id) == phase) {
            out[id] = (*this)[id];
        }
    }
    return out;
}

Composition& Composition::operator+=(const Composition& other) noexcept {
    for (std::size_t i = 0; i < kNumSpecies; ++i) {
        moles[i] += other.moles[i];
    }
    return *this;
}

Composition& Composition::operator-=(const Composition& other) noexcept {
    for (std::size_t i = 0; i < kNumSpecies; ++i) {
        moles[i] -= other.moles[i];
    }
    return *this;
}

Composition& Composition::operator*=(double s) noexcept {
    for (double& v : moles) {
        v *= s;
    }
    return *this;
}

Composition operator+(Composition a, const Composition& b) noexcept { return a += b; }
Composition operator-(Composition a, const Composition& b) noexcept { return a -= b; }
Composition operator*(double s, Composition a) noexcept { return a *= s; }
Composition operator*(Composition a, double s) noexcept { return a *= s; }

Composition air_mole_fractions() noexcept {
    Composition c;
    c[SpeciesId::Nitrogen] = 0.79;
    c[SpeciesId::Oxygen] = 0.21;
    return c;
}

}  // namespace clayems::chem
