#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace clayems::chem {

// Closed species set: the dehydroxylation reactant/products plus the air carrier.
enum class SpeciesId : std::size_t { Kaolinite = 0, Metakaolin, WaterVapor, Nitrogen, Oxygen };

inline constexpr std::size_t kNumSpecies = 5;
inline constexpr std::array<SpeciesId, kNumSpecies> kAllSpecies = {
    SpeciesId::Kaolinite, SpeciesId::Metakaolin, SpeciesId::WaterVapor, SpeciesId::Nitrogen,
    SpeciesId::Oxygen};

enum class Phase { Solid, Gas };

enum class Element : std::size_t { Al = 0, Si, H, O, N };
inline constexpr std::size_t kNumElements = 5;

inline constexpr double kGasConstant = 8.314462618;  // J/(mol K)
inline constexpr double kReferenceTemperature = 298.15;
inline constexpr double kReferencePressure = 1.0e5;
inline constexpr double kMinTemperature = 250.0;
inline constexpr double kMaxTemperature = 2000.0;

constexpr std::size_t index(SpeciesId id) noexcept { return static_cast<std::size_t>(id); }

constexpr Phase phase_of(SpeciesId id) noexcept {
    return (id == SpeciesId::Kaolinite || id == SpeciesId::Metakaolin) ? Phase::Solid : Phase::Gas;
}

std::string_view species_name(SpeciesId id) noexcept;
SpeciesId species_from_name(std::string_view name);  // throws ValidationError

struct Species {
    SpeciesId id = SpeciesId::Nitrogen;
    Phase phase = Phase::Gas;
    double molar_mass = 0.0;          // kg/mol
    double formation_enthalpy = 0.0;  // J/mol at the reference state
    // cp(T) = sum_k a_k T^k, J/(mol K), k = 0..4
    std::array<double, 5> cp_coeffs{};
    double solid_molar_volume = 0.0;  // m3/mol, solids only
    std::array<int, kNumElements> elements{};

    void validate() const;  // throws DomainError
};

// Molar amounts (mol) or concentrations (mol/m3), indexed by SpeciesId.
struct Composition {
    std::array<double, kNumSpecies> moles{};

    double& operator[](SpeciesId id) noexcept { return moles[index(id)]; }
    double operator[](SpeciesId id) const noexcept { return moles[index(id)]; }

    double total() const noexcept;
    double total(Phase phase) const noexcept;
    bool non_negative() const noexcept;
    Composition only(Phase phase) const noexcept;

    Composition& operator+=(const Composition& other) noexcept;
    Composition& operator-=(const Composition& other) noexcept;
    Composition& operator*=(double s) noexcept;
};

Composition operator+(Composition a, const Composition& b) noexcept;
Composition operator-(Composition a, const Composition& b) noexcept;
Composition operator*(double s, Composition a) noexcept;
Composition operator*(Composition a, double s) noexcept;

// Dry air at 79/21 molar N2/O2.
Composition air_mole_fractions() noexcept;

}  // namespace clayems::chem
