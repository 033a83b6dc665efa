#include "clayems/chem/thermo.hpp"

#include <cmath>
#include <sstream>

#include "clayems/error.hpp"

namespace clayems::chem {

namespace {

void check_temperature(double T) {
    if (!(T > 0.0)) {
        throw DomainError("temperature must be > 0 K");
    }
    if (T < kMinTemperature || T > kMaxTemperature) {
        std::ostringstream os;
        os << "temperature " << T << " K outside [" << kMinTemperature << ", " << kMaxTemperature << "] K";
        throw RangeError(os.str());
    }
}

void check_moles(const Composition& n) {
    if (!n.non_negative()) {
        throw DomainError("composition has a negative or non-finite entry");
    }
}

}  // namespace

std::array<Species, kNumSpecies> default_species() {
    std::array<Species, kNumSpecies> s;
    // Kaolinite, Al2O3.2SiO2.2H2O
    s[0] = {SpeciesId::Kaolinite, Phase::Solid, 0.25816, -4119.6e3, {200.0, 0.15, 0.0, 0.0, 0.0}, 9.93e-5,
            {2, 2, 4, 9, 0}};
    // Metakaolin, Al2O3.2SiO2; formation enthalpy set for ~252 kJ/mol dehydroxylation heat
    s[1] = {SpeciesId::Metakaolin, Phase::Solid, 0.22213, -3384.0e3, {180.0, 0.12, 0.0, 0.0, 0.0}, 8.89e-5,
            {2, 2, 0, 7, 0}};
    s[2] = {SpeciesId::WaterVapor, Phase::Gas, 0.018015, -241.826e3, {30.0, 10.7e-3, 0.0, 0.0, 0.0}, 0.0,
            {0, 0, 2, 1, 0}};
    s[3] = {SpeciesId::Nitrogen, Phase::Gas, 0.0280134, 0.0, {27.0, 5.9e-3, -0.34e-6, 0.0, 0.0}, 0.0,
            {0, 0, 0, 0, 2}};
    s[4] = {SpeciesId::Oxygen, Phase::Gas, 0.031998, 0.0, {25.5, 13.6e-3, -4.27e-6, 0.0, 0.0}, 0.0,
            {0, 0, 0, 2, 0}};
    return s;
}

ThermoLibrary::ThermoLibrary() : ThermoLibrary(default_species()) {}

ThermoLibrary::ThermoLibrary(std::array<Species, kNumSpecies> species) : species_(species) {
    for (std::size_t i = 0; i < kNumSpecies; ++i) {
        if (index(species_[i].id) != i) {
            throw StructuralError("species table must be ordered by SpeciesId");
        }
        species_[i].validate();
    }
}

double ThermoLibrary::cp(SpeciesId id, double T) const noexcept {
    const auto& a = species_[index(id)].cp_coeffs;
    return a[0] + T * (a[1] + T * (a[2] + T * (a[3] + T * a[4])));
}

double ThermoLibrary::molar_enthalpy(SpeciesId id, double T) const noexcept {
    const auto& sp = species_[index(id)];
    const auto& a = sp.cp_coeffs;
    auto antideriv = [&a](double t) {
        return t * (a[0] + t * (a[1] / 2.0 + t * (a[2] / 3.0 + t * (a[3] / 4.0 + t * a[4] / 5.0))));
    };
    return sp.formation_enthalpy + (antideriv(T) - antideriv(kReferenceTemperature));
}

double ThermoLibrary::phase_enthalpy(Phase phase, double T, const Composition& n) const noexcept {
    double h = 0.0;
    for (auto id : kAllSpecies) {
        if (phase_of(id) == phase && n[id] != 0.0) {
            h += n[id] * molar_enthalpy(id, T);
        }
    }
    return h;
}

double ThermoLibrary::solid_volume(const Composition& n) const noexcept {
    return n[SpeciesId::Kaolinite] * species_[0].solid_molar_volume +
           n[SpeciesId::Metakaolin] * species_[1].solid_molar_volume;
}

double ThermoLibrary::phase_internal_energy(Phase phase, double T, double P,
                                            const Composition& n) const noexcept {
    const double h = phase_enthalpy(phase, T, n);
    if (phase == Phase::Solid) {
        return h - P * solid_volume(n);
    }
    return h - n.total(Phase::Gas) * kGasConstant * T;
}

double ThermoLibrary::enthalpy(double T, double /*P*/, const Composition& n) const {
    check_temperature(T);
    check_moles(n);
    return phase_enthalpy(Phase::Solid, T, n) + phase_enthalpy(Phase::Gas, T, n);
}

double ThermoLibrary::volume(double T, double P, const Composition& n) const {
    if (!(P > 0.0)) {
        throw DomainError("pressure must be > 0 Pa");
    }
    if (!(T > 0.0)) {
        throw DomainError("temperature must be > 0 K");
    }
    check_moles(n);
    return solid_volume(n) + n.total(Phase::Gas) * kGasConstant * T / P;
}

double ThermoLibrary::internal_energy(double T, double P, const Composition& n) const {
    return enthalpy(T, P, n) - P * volume(T, P, n);
}

double ThermoLibrary::heat_capacity(double T, const Composition& n) const {
    check_temperature(T);
    check_moles(n);
    double c = 0.0;
    for (auto id : kAllSpecies) {
        c += n[id] * cp(id, T);
    }
    return c;
}

double ThermoLibrary::mass(const Composition& n) const noexcept {
    double m = 0.0;
    for (auto id : kAllSpecies) {
        m += n[id] * species_[index(id)].molar_mass;
    }
    return m;
}

double ThermoLibrary::mean_molar_mass(const Composition& n, Phase phase) const noexcept {
    double m = 0.0;
    double tot = 0.0;
    for (auto id : kAllSpecies) {
        if (phase_of(id) == phase) {
            m += n[id] * species_[index(id)].molar_mass;
            tot += n[id];
        }
    }
    return tot > 0.0 ? m / tot : 0.0;
}

namespace {

// Newton on a monotone scalar function with bisection fallback.
template <class F, class dF>
double invert_monotone(F&& f, dF&& df, double target, double T_guess, const char* what) {
    double lo = kMinTemperature;
    double hi = kMaxTemperature;
    const double f_lo = f(lo) - target;
    const double f_hi = f(hi) - target;
    if (f_lo > 0.0 || f_hi < 0.0) {
        std::ostringstream os;
        os << what << ": target " << target << " not bracketed on [" << lo << ", " << hi
           << "] K (residuals " << f_lo << ", " << f_hi << ")";
        throw ConvergenceError(os.str(), std::min(std::abs(f_lo), std::abs(f_hi)));
    }
    if (f_lo == 0.0) {
        return lo;
    }
    if (f_hi == 0.0) {
        return hi;
    }
    double T = (T_guess > lo && T_guess < hi) ? T_guess : 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double r = f(T) - target;
        if (r == 0.0) {
            return T;
        }
        if (r < 0.0) {
            lo = T;
        } else {
            hi = T;
        }
        const double d = df(T);
        double next = (d > 0.0) ? T - r / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - T) <= 1e-13 * T || hi - lo <= 1e-13 * T) {
            T = next;
            break;
        }
        T = next;
    }
    const double res = f(T) - target;
    if (std::abs(res) > 1e-8 * std::max(1.0, std::abs(target))) {
        std::ostringstream os;
        os << what << ": residual " << res << " above tolerance at T=" << T;
        throw ConvergenceError(os.str(), std::abs(res));
    }
    return T;
}

}  // namespace

double ThermoLibrary::temperature_from_internal_energy(double u_target, double P, const Composition& n,
                                                       double T_guess) const {
    check_moles(n);
    if (!(n.total() > 0.0)) {
        throw DomainError("temperature_from_internal_energy: empty composition");
    }
    if (!(P > 0.0)) {
        throw DomainError("pressure must be > 0 Pa");
    }
    const double ng = n.total(Phase::Gas);
    auto f = [&](double T) {
        return phase_internal_energy(Phase::Solid, T, P, n) + phase_internal_energy(Phase::Gas, T, P, n);
    };
    auto df = [&](double T) {
        double c = -ng * kGasConstant;
        for (auto id : kAllSpecies) {
            c += n[id] * cp(id, T);
        }
        return c;
    };
    return invert_monotone(f, df, u_target, T_guess, "temperature_from_internal_energy");
}

double ThermoLibrary::temperature_from_enthalpy(double h_target, double /*P*/, const Composition& n,
                                                double T_guess) const {
    check_moles(n);
    if (!(n.total() > 0.0)) {
        throw DomainError("temperature_from_enthalpy: empty composition");
    }
    auto f = [&](double T) { return phase_enthalpy(Phase::Solid, T, n) + phase_enthalpy(Phase::Gas, T, n); };
    auto df = [&](double T) {
        double c = 0.0;
        for (auto id : kAllSpecies) {
            c += n[id] * cp(id, T);
        }
        return c;
    };
    return invert_monotone(f, df, h_target, T_guess, "temperature_from_enthalpy");
}

std::array<double, kNumElements> ThermoLibrary::element_totals(const Composition& n) const noexcept {
    std::array<double, kNumElements> e{};
    for (auto id : kAllSpecies) {
        const auto& sp = species_[index(id)];
        for (std::size_t k = 0; k < kNumElements; ++k) {
            e[k] += sp.elements[k] * n[id];
        }
    }
    return e;
}

}  // namespace clayems::chem
