#include <cmath>
#include <random>

#include "clayems/chem/chemistry_file.hpp"
#include "clayems/chem/kinetics.hpp"
#include "clayems/chem/thermo.hpp"
#include "clayems/error.hpp"
#include "doctest.h"
#include "test_data.hpp"

using namespace clayems;
using namespace clayems::chem;

namespace {

// Every species at constant cp and zero formation enthalpy, so that the
// closed-form answers are easy to write down.
ThermoLibrary constant_cp_library(double cp, double v_solid) {
    auto sp = default_species();
    for (auto& s : sp) {
        s.cp_coeffs = {cp, 0.0, 0.0, 0.0, 0.0};
        s.formation_enthalpy = 0.0;
        if (s.phase == Phase::Solid) {
            s.solid_molar_volume = v_solid;
        }
    }
    return ThermoLibrary(sp);
}

Composition one(SpeciesId id, double n) {
    Composition c;
    c[id] = n;
    return c;
}

}  // namespace

TEST_SUITE("enthalpy") {
    TEST_CASE("reference temperature returns the formation enthalpy") {
        const ThermoLibrary lib;
        const double h = lib.enthalpy(kReferenceTemperature, 1e5, one(SpeciesId::WaterVapor, 1.0));
        CHECK(h == lib.species(SpeciesId::WaterVapor).formation_enthalpy);
    }

    TEST_CASE("constant cp gives n cp dT") {
        const auto lib = constant_cp_library(30.0, 1e-4);
        const double h = lib.enthalpy(kReferenceTemperature + 100.0, 1e5, one(SpeciesId::Nitrogen, 2.0));
        CHECK(h == doctest::Approx(6000.0).epsilon(1e-12));
    }

    TEST_CASE("empty composition has zero enthalpy") {
        const ThermoLibrary lib;
        CHECK(lib.enthalpy(900.0, 1e5, Composition{}) == 0.0);
    }

    TEST_CASE("pressure does not enter") {
        const ThermoLibrary lib;
        Composition n = air_mole_fractions();
        n[SpeciesId::Kaolinite] = 0.3;
        CHECK(lib.enthalpy(700.0, 5e4, n) == lib.enthalpy(700.0, 3e5, n));
    }

    TEST_CASE("negative moles and out-of-window temperatures are rejected") {
        const ThermoLibrary lib;
        CHECK_THROWS_AS(lib.enthalpy(500.0, 1e5, one(SpeciesId::Oxygen, -1.0)), DomainError);
        CHECK_THROWS_AS(lib.enthalpy(200.0, 1e5, one(SpeciesId::Oxygen, 1.0)), RangeError);
        CHECK_THROWS_AS(lib.enthalpy(2100.0, 1e5, one(SpeciesId::Oxygen, 1.0)), RangeError);
        CHECK_THROWS_AS(lib.enthalpy(-5.0, 1e5, one(SpeciesId::Oxygen, 1.0)), DomainError);
    }
}

TEST_SUITE("volume") {
    TEST_CASE("ideal gas") {
        const ThermoLibrary lib;
        const double v = lib.volume(300.0, 101325.0, one(SpeciesId::Nitrogen, 1.0));
        CHECK(v == doctest::Approx(kGasConstant * 300.0 / 101325.0).epsilon(1e-14));
        CHECK(v == doctest::Approx(0.024616).epsilon(1e-4));
    }

    TEST_CASE("incompressible solid") {
        const auto lib = constant_cp_library(30.0, 9.95e-5);
        const Composition n = one(SpeciesId::Kaolinite, 2.0);
        CHECK(lib.volume(600.0, 1e5, n) == doctest::Approx(1.99e-4).epsilon(1e-14));
        CHECK(lib.volume(600.0, 1e5, n) == lib.volume(600.0, 7e5, n));
    }

    TEST_CASE("extensive and strictly increasing in every entry") {
        const ThermoLibrary lib;
        Composition n = air_mole_fractions();
        n[SpeciesId::Kaolinite] = 0.2;
        n[SpeciesId::Metakaolin] = 0.1;
        n[SpeciesId::WaterVapor] = 0.05;
        const double v = lib.volume(800.0, 1.2e5, n);
        CHECK(lib.volume(800.0, 1.2e5, 2.0 * n) == doctest::Approx(2.0 * v).epsilon(1e-14));
        for (auto id : kAllSpecies) {
            Composition m = n;
            m[id] += 1e-3;
            CHECK(lib.volume(800.0, 1.2e5, m) > v);
        }
    }

    TEST_CASE("non-positive pressure is rejected") {
        const ThermoLibrary lib;
        CHECK_THROWS_AS(lib.volume(300.0, 0.0, one(SpeciesId::Nitrogen, 1.0)), DomainError);
        CHECK_THROWS_AS(lib.volume(300.0, -1.0, one(SpeciesId::Nitrogen, 1.0)), DomainError);
    }
}

TEST_SUITE("internal energy") {
    TEST_CASE("ideal gas subtracts nRT") {
        const ThermoLibrary lib;
        const Composition n = one(SpeciesId::Nitrogen, 1.0);
        for (double P : {5e4, 1e5, 4e5}) {
            const double u = lib.internal_energy(300.0, P, n);
            CHECK(u == doctest::Approx(lib.enthalpy(300.0, P, n) - kGasConstant * 300.0).epsilon(1e-13));
        }
        CHECK(kGasConstant * 300.0 == doctest::Approx(2494.2).epsilon(1e-4));
    }

    TEST_CASE("solid subtracts P v") {
        auto sp = default_species();
        sp[index(SpeciesId::Kaolinite)].solid_molar_volume = 1e-4;
        const ThermoLibrary lib(sp);
        const Composition n = one(SpeciesId::Kaolinite, 1.0);
        const double T = 650.0;
        const double h = lib.enthalpy(T, 1e5, n);
        CHECK(lib.internal_energy(T, 1e5, n) == doctest::Approx(h - 10.0).epsilon(1e-15));
    }

    TEST_CASE("empty composition") {
        const ThermoLibrary lib;
        CHECK(lib.internal_energy(1000.0, 1e5, Composition{}) == 0.0);
    }

    TEST_CASE("U + PV = H on a random grid") {
        const ThermoLibrary lib;
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> T(250.0, 2000.0), P(1e4, 1e6), m(0.0, 5.0);
        for (int i = 0; i < 200; ++i) {
            Composition n;
            for (auto& v : n.moles) {
                v = m(rng);
            }
            const double t = T(rng), p = P(rng);
            const double h = lib.enthalpy(t, p, n);
            const double lhs = lib.internal_energy(t, p, n) + p * lib.volume(t, p, n);
            CHECK(std::abs(lhs - h) <= 1e-12 * std::abs(h));
        }
    }
}

TEST_SUITE("temperature inversion") {
    TEST_CASE("round trip") {
        const ThermoLibrary lib;
        Composition n = air_mole_fractions();
        n[SpeciesId::Kaolinite] = 0.4;
        const double u = lib.internal_energy(700.0, 1e5, n);
        CHECK(lib.temperature_from_internal_energy(u, 1e5, n, 400.0) == doctest::Approx(700.0).epsilon(1e-9));
        const double h = lib.enthalpy(1250.0, 1e5, n);
        CHECK(lib.temperature_from_enthalpy(h, 1e5, n, 600.0) == doctest::Approx(1250.0).epsilon(1e-9));
    }

    TEST_CASE("constant cp closed form") {
        const auto lib = constant_cp_library(29.0, 1e-4);
        const Composition n = one(SpeciesId::Nitrogen, 3.0);
        // U = n cp (T - Tref) - n R T
        const double T = 913.0;
        const double u = 3.0 * 29.0 * (T - kReferenceTemperature) - 3.0 * kGasConstant * T;
        const double got = lib.temperature_from_internal_energy(u, 1e5, n, 300.0);
        CHECK(std::abs(got - T) <= 1e-9 * T);
    }

    TEST_CASE("monotone in the target") {
        const ThermoLibrary lib;
        const Composition n = air_mole_fractions();
        double prev = 0.0;
        for (double T = 300.0; T < 1900.0; T += 100.0) {
            const double got = lib.temperature_from_internal_energy(lib.internal_energy(T, 1e5, n), 1e5, n, 800.0);
            CHECK(got > prev);
            prev = got;
        }
    }

    TEST_CASE("targets outside the window fail to converge") {
        const ThermoLibrary lib;
        const Composition n = air_mole_fractions();
        const double too_hot = lib.internal_energy(2000.0, 1e5, n) + 1e6;
        CHECK_THROWS_AS(lib.temperature_from_internal_energy(too_hot, 1e5, n, 800.0), ConvergenceError);
        CHECK_THROWS_AS(lib.temperature_from_internal_energy(0.0, 1e5, Composition{}, 800.0), DomainError);
    }
}

TEST_SUITE("kinetics") {
    const KineticsParams kin;

    TEST_CASE("no kaolinite, no reaction") {
        Composition c = air_mole_fractions();
        c[SpeciesId::Metakaolin] = 3.0;
        const Composition r = reaction_rate(kin, 1100.0, c);
        for (double v : r.moles) {
            CHECK(v == 0.0);
        }
    }

    TEST_CASE("stoichiometry and third order") {
        Composition c;
        c[SpeciesId::Kaolinite] = 0.7;
        const double T = 800.0;
        const Composition r = reaction_rate(kin, T, c);
        const double k = rate_constant(kin, T);
        CHECK(r[SpeciesId::Kaolinite] == doctest::Approx(-k * 0.343).epsilon(1e-14));
        CHECK(r[SpeciesId::Metakaolin] == -r[SpeciesId::Kaolinite]);
        CHECK(r[SpeciesId::WaterVapor] == -2.0 * r[SpeciesId::Kaolinite]);
        CHECK(r[SpeciesId::Nitrogen] == 0.0);
        CHECK(r[SpeciesId::Oxygen] == 0.0);
        c[SpeciesId::Kaolinite] = 1.4;
        CHECK(reaction_rate(kin, T, c)[SpeciesId::Metakaolin] ==
              doctest::Approx(8.0 * r[SpeciesId::Metakaolin]).epsilon(1e-13));
    }

    TEST_CASE("Arrhenius constant increases with temperature") {
        double prev = 0.0;
        for (double T = 300.0; T <= 1400.0; T += 50.0) {
            const double k = rate_constant(kin, T);
            CHECK(k > prev);
            prev = k;
        }
        CHECK(rate_constant(kin, 900.0) ==
              doctest::Approx(kin.pre_exponential * std::exp(-kin.activation_energy / (kGasConstant * 900.0))));
    }

    TEST_CASE("element totals survive an explicit reaction step") {
        const ThermoLibrary lib;
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, 3.0);
        for (int i = 0; i < 50; ++i) {
            Composition c;
            for (auto& v : c.moles) {
                v = u(rng);
            }
            const Composition next = c + 0.01 * production_rates(u(rng), c);
            const auto e0 = lib.element_totals(c);
            const auto e1 = lib.element_totals(next);
            for (std::size_t k = 0; k < kNumElements; ++k) {
                CHECK(e1[k] == doctest::Approx(e0[k]).epsilon(1e-14));
            }
        }
    }

    TEST_CASE("invalid parameters") {
        KineticsParams bad;
        bad.pre_exponential = 0.0;
        CHECK_THROWS_AS(bad.validate(), DomainError);
        Composition c;
        c[SpeciesId::Kaolinite] = -1.0;
        CHECK_THROWS_AS(reaction_rate(kin, 900.0, c), DomainError);
        CHECK_THROWS_AS(rate_constant(kin, 0.0), DomainError);
    }
}

TEST_SUITE("species data") {
    TEST_CASE("shipped chemistry file loads and matches the defaults") {
        const Chemistry chem = load_chemistry(test::data_dir() / "chemistry.json");
        const ThermoLibrary def;
        for (auto id : kAllSpecies) {
            CHECK(chem.thermo.species(id).molar_mass == def.species(id).molar_mass);
            for (double T = 250.0; T <= 1400.0; T += 25.0) {
                CHECK(chem.thermo.cp(id, T) > 0.0);
            }
        }
        CHECK(chem.kinetics.pre_exponential > 0.0);
        CHECK(chem.kinetics.activation_energy > 0.0);
    }

    TEST_CASE("elements balance across the reaction") {
        const ThermoLibrary lib;
        const auto kao = lib.element_totals(one(SpeciesId::Kaolinite, 1.0));
        Composition prod = one(SpeciesId::Metakaolin, 1.0);
        prod[SpeciesId::WaterVapor] = 2.0;
        CHECK(lib.element_totals(prod) == kao);
        const double dm = lib.mass(prod) - lib.mass(one(SpeciesId::Kaolinite, 1.0));
        CHECK(std::abs(dm) < 1e-4 * lib.species(SpeciesId::Kaolinite).molar_mass);
    }

    TEST_CASE("malformed files are rejected") {
        CHECK_THROWS_AS(parse_chemistry("{"), ValidationError);
        CHECK_THROWS_AS(parse_chemistry(R"({"species":[{"name":"Unobtainium"}]})"), ValidationError);
        CHECK_THROWS_AS(parse_chemistry(R"({"kinetics":{"A":-1,"Ea":1}})"), Error);
        CHECK_THROWS_AS(load_chemistry("/nonexistent/chemistry.json"), ValidationError);
    }

    TEST_CASE("species names round trip") {
        for (auto id : kAllSpecies) {
            CHECK(species_from_name(species_name(id)) == id);
        }
    }
}
