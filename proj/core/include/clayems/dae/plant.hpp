#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clayems/chem/chemistry_file.hpp"
#include "clayems/dae/dae_system.hpp"
#include "clayems/units/calciner.hpp"
#include "clayems/units/cyclone.hpp"
#include "clayems/units/stream.hpp"

namespace clayems::dae {

// "loop": clay feed -> cyclone 1 -> cyclone 2 -> calciner -> separation
// cyclone -> cyclone 2 -> cyclone 1 -> filter/fan -> EHGG -> calciner.
// "calciner_only": a single calciner between a fixed inlet stream and a
// pressure boundary, used to test the assembly against the unit model.
enum class PlantTopology { Loop, CalcinerOnly };

// Cyclones are addressed by role, never by declaration order.
enum class CycloneRole { Preheater1 = 0, Preheater2 = 1, Separator = 2 };
inline constexpr std::size_t kNumCyclones = 3;

struct EhggSpec {
    double efficiency = 0.95;
    double p_min = 0.0;    // W
    double p_max = 3.0e6;  // W
};

struct FanSpec {
    double efficiency = 0.8;
    double dp_min = 0.0;     // Pa
    double dp_max = 2.0e4;   // Pa
};

struct FilterSpec {
    double dust_removal = 0.99;
    double k_dp = 5.0;  // Pa/(m3/s)^2
};

struct ActuatorRange {
    double min = 0.0;
    double max = 0.0;
};

struct PlantDescription {
    PlantTopology topology = PlantTopology::Loop;
    units::CalcinerGeometry calciner;
    std::array<units::CycloneGeometry, kNumCyclones> cyclones;

    // Connector resistances (Eq. 13 form, kg/s per sqrt(Pa^2/K)).
    double c_calciner_separator = 1.0e-2;
    double c_separator_preheater2 = 1.0e-2;
    double c_preheater2_preheater1 = 1.0e-2;
    double c_loop = 1.0e-2;                 // preheater 1 -> filter/fan/EHGG -> calciner
    std::optional<double> c_vent;           // preheater 1 -> ambient; closed loop when empty

    EhggSpec ehgg;
    FanSpec fan;
    FilterSpec filter;
    ActuatorRange clay_feed{0.0, 3.0};   // kg/s kaolinite
    ActuatorRange fresh_air{0.0, 2.0};   // kg/s

    double ambient_pressure = 101325.0;  // Pa

    // calciner_only topology
    units::Stream boundary_inflow;
    double outlet_pressure = 101325.0;
    double c_outlet = 1.0e-2;

    void validate() const;  // throws ValidationError
};

struct PlantInputs {
    double clay_feed = 0.0;  // kg/s
    double fan_dp = 0.0;     // Pa
    double fresh_air = 0.0;  // kg/s
};

struct PlantDisturbances {
    double p_el = 0.0;       // W
    double T_amb = 298.15;   // K
};

struct PlantState {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> y;
    PlantInputs u;
    PlantDisturbances d;
};

// Trailing integrators of x (cumulative boundary exchange since t = 0).
namespace quad {
inline constexpr std::size_t kIn = 0;        // 5 species, mol entering
inline constexpr std::size_t kOut = 5;       // 5 species, mol leaving (product included)
inline constexpr std::size_t kProduct = 10;  // 5 species, mol at the product port
inline constexpr std::size_t kEnergyIn = 15;      // J: stream enthalpy in + eta P_el + fan work
inline constexpr std::size_t kEnergyOut = 16;     // J: stream enthalpy out + ambient losses
inline constexpr std::size_t kEhggElectric = 17;  // J
inline constexpr std::size_t kFanElectric = 18;   // J
inline constexpr std::size_t kCount = 19;
}  // namespace quad

// Everything of interest at one (x, y, u, d), recomputed from the residual pass.
struct PlantDiagnostics {
    std::vector<units::CalcinerCellState> cells;
    std::array<units::CycloneState, kNumCyclones> cyclones;
    std::array<double, kNumCyclones> cyclone_efficiency{};
    double F_calciner_separator = 0.0;  // kg/s
    double F_separator_preheater2 = 0.0;
    double F_preheater2_preheater1 = 0.0;
    double F_loop = 0.0;
    double F_vent = 0.0;
    double T_ehgg = 0.0;                // K
    double filter_dp = 0.0;             // Pa
    double fan_hydraulic_power = 0.0;   // W
    double fan_electric_power = 0.0;    // W
    double ambient_heat = 0.0;          // W into the plant (negative = loss)
    double product_mass_flow = 0.0;     // kg/s of solids
    double product_metakaolin = 0.0;    // kg/s
    double enthalpy_in = 0.0;           // W with boundary streams, excluding P_el and fan
    double enthalpy_out = 0.0;          // W with boundary streams
    double outlet_calcination = 0.0;    // last calciner cell
    double product_calcination = 0.0;   // separator holdup
};

class PlantModel final : public DaeSystem {
  public:
    PlantModel(PlantDescription desc, chem::Chemistry chemistry);

    std::size_t n_differential() const override;
    std::size_t n_algebraic() const override;
    std::size_t n_quadrature() const override { return quad::kCount; }

    void residuals(double t, std::span<const double> x, std::span<const double> y, std::span<double> f,
                   std::span<double> g) const override;
    void scales(std::span<double> x_scale, std::span<double> g_scale) const override;
    void check_state(std::span<const double> x, std::span<const double> y) const override;

    // Inputs and disturbances used by residuals().
    void set_inputs(const PlantInputs& u, const PlantDisturbances& d);
    const PlantInputs& inputs() const noexcept { return u_; }
    const PlantDisturbances& disturbances() const noexcept { return d_; }

    // Full evaluation at explicit inputs; throws StructuralError on size mismatch.
    void evaluate(std::span<const double> x, std::span<const double> y, const PlantInputs& u,
                  const PlantDisturbances& d, std::span<double> f, std::span<double> g,
                  PlantDiagnostics* diag = nullptr) const;
    PlantDiagnostics diagnostics(const PlantState& state) const;

    // Solves g(x, y) = 0 for y at fixed x and the state's inputs. When the
    // direct solve fails, the fan pressure rise is raised geometrically from
    // 1 Pa so the flows grow from a converged low-flow solution instead of
    // the linearization at rest. Throws ConvergenceError.
    void make_consistent(PlantState& state, double tol = 1e-9) const;

    const PlantDescription& description() const noexcept { return desc_; }
    const chem::ThermoLibrary& thermo() const noexcept { return chem_.thermo; }
    const chem::KineticsParams& kinetics() const noexcept { return chem_.kinetics; }
    std::size_t n_cells() const noexcept { return static_cast<std::size_t>(desc_.calciner.n_cells); }
    bool is_loop() const noexcept { return desc_.topology == PlantTopology::Loop; }

    // Canonical layout.
    //   x: per cell [c(5), u_s, u_g]; per cyclone [n(5), U]; quadratures.
    //   y: per cell [T_s, T_g, P]; per cyclone [T, P]; pressures are gauge
    //      values relative to ambient_pressure;
    //      loop: [F_a, F_b, F_c, F_loop, F_vent, T_ehgg]; calciner_only: [F_out].
    std::size_t x_cell(std::size_t k) const noexcept { return 7 * k; }
    std::size_t x_cyclone(std::size_t j) const noexcept { return 7 * n_cells() + 6 * j; }
    std::size_t x_quad() const noexcept { return n_differential() - quad::kCount; }
    std::size_t y_cell(std::size_t k) const noexcept { return 3 * k; }
    std::size_t y_cyclone(std::size_t j) const noexcept { return 3 * n_cells() + 2 * j; }
    std::size_t y_flows() const noexcept { return 3 * n_cells() + (is_loop() ? 2 * kNumCyclones : 0); }
    std::size_t y_ehgg() const noexcept { return y_flows() + 5; }

    std::vector<std::string> x_names() const;
    std::vector<std::string> y_names() const;

    // Cold loop filled with air at T_amb and ambient pressure, no solids.
    PlantState ambient_state(double T_amb) const;
    // Every unit at temperature T and pressure P; gas of the given mole
    // fractions, solids at the given concentrations per m3 of unit volume.
    PlantState uniform_state(double T, double P, const chem::Composition& gas_fractions,
                             const chem::Composition& solids_per_m3) const;

    // Element totals (Al, Si, H, O, N) held in the units, mol.
    std::array<double, chem::kNumElements> element_inventory(std::span<const double> x) const;
    // Net elemental exchange with the surroundings, in minus out, mol.
    std::array<double, chem::kNumElements> element_exchange(std::span<const double> x) const;
    // Internal energy held in the units, J.
    double energy_inventory(std::span<const double> x) const;
    // Energy in minus out through boundaries, P_el and fan, J.
    double energy_exchange(std::span<const double> x) const;

  private:
    PlantDescription desc_;
    chem::Chemistry chem_;
    PlantInputs u_;
    PlantDisturbances d_;
};

// f and g for a complete PlantState.
void assemble_residuals(const PlantModel& model, const PlantState& state, std::vector<double>& f,
                        std::vector<double>& g);

// Composition helper: fresh air of a given mass flow as a molar flow.
chem::Composition air_flow(const chem::ThermoLibrary& thermo, double mass_flow);

}  // namespace clayems::dae
