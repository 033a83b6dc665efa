#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "clayems/chem/chemistry_file.hpp"
#include "clayems/dae/integrator.hpp"
#include "clayems/dae/newton.hpp"
#include "clayems/dae/plant.hpp"
#include "clayems/error.hpp"
#include "clayems/io/scenario_io.hpp"
#include "clayems/units/calciner.hpp"
#include "doctest.h"
#include "test_data.hpp"

using namespace clayems;
using namespace clayems::dae;

namespace {

// x' = a x + b y + c,  0 = y - (p x + q), all scalars.
struct LinearDae : DaeSystem {
    double a = 0.0, b = 0.0, c = 0.0, p = 0.0, q = 0.0;
    std::size_t n_differential() const override { return 1; }
    std::size_t n_algebraic() const override { return 1; }
    void residuals(double, std::span<const double> x, std::span<const double> y, std::span<double> f,
                   std::span<double> g) const override {
        f[0] = a * x[0] + b * y[0] + c;
        g[0] = y[0] - (p * x[0] + q);
    }
};

// x' = -x with no algebraic part.
struct Decay : DaeSystem {
    std::size_t n_differential() const override { return 1; }
    std::size_t n_algebraic() const override { return 0; }
    void residuals(double, std::span<const double> x, std::span<const double>, std::span<double> f,
                   std::span<double>) const override {
        f[0] = -x[0];
    }
};

double decay_error(double dt) {
    Decay sys;
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.newton_tol = 1e-14;
    DaeState s{0.0, {1.0}, {}};
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    for (int i = 0; i < steps; ++i) {
        s = step_implicit_euler(sys, s, cfg);
    }
    return std::abs(s.x[0] - std::exp(-1.0));
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("newton") {
    TEST_CASE("scalar square root") {
        auto fn = [](std::span<const double> z, std::span<double> r) { r[0] = z[0] * z[0] - 4.0; };
        NewtonConfig cfg;
        cfg.tol = 1e-13;
        const auto res = newton_solve(fn, std::vector<double>{3.0}, cfg);
        CHECK(res.z[0] == doctest::Approx(2.0).epsilon(1e-10));
    }

    TEST_CASE("affine map converges in one iteration") {
        auto fn = [](std::span<const double> z, std::span<double> r) {
            r[0] = 3.0 * z[0] + 1.0 * z[1] - 5.0;
            r[1] = -2.0 * z[0] + 4.0 * z[1] - 6.0;
        };
        NewtonConfig cfg;
        cfg.tol = 1e-6;
        const auto res = newton_solve(fn, std::vector<double>{10.0, -7.0}, cfg);
        CHECK(res.iterations == 1);
        CHECK(res.z[0] == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(res.z[1] == doctest::Approx(2.0).epsilon(1e-7));
    }

    TEST_CASE("Rosenbrock gradient root") {
        auto fn = [](std::span<const double> z, std::span<double> r) {
            r[0] = -2.0 * (1.0 - z[0]) - 400.0 * z[0] * (z[1] - z[0] * z[0]);
            r[1] = 200.0 * (z[1] - z[0] * z[0]);
        };
        NewtonConfig cfg;
        cfg.tol = 1e-10;
        const auto res = newton_solve(fn, std::vector<double>{-1.2, 1.0}, cfg);
        CHECK(res.z[0] == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(res.z[1] == doctest::Approx(1.0).epsilon(1e-8));
        std::vector<double> r(2);
        fn(res.z, r);
        CHECK(std::abs(r[0]) <= 1e-10);
        CHECK(std::abs(r[1]) <= 1e-10);
    }

    TEST_CASE("iteration limit reports the last residual") {
        auto fn = [](std::span<const double> z, std::span<double> r) { r[0] = z[0] * z[0] + 1.0; };
        NewtonConfig cfg;
        cfg.max_iter = 5;
        try {
            (void)newton_solve(fn, std::vector<double>{0.5}, cfg);
            FAIL("no error thrown");
        } catch (const ConvergenceError& e) {
            CHECK(e.last_residual() >= 1.0);
        }
    }

    TEST_CASE("a chord workspace reaches the same root") {
        auto fn = [](std::span<const double> z, std::span<double> r) {
            r[0] = std::exp(z[0]) - 2.0;
            r[1] = z[1] * z[1] * z[1] - z[0];
        };
        NewtonConfig cfg;
        cfg.tol = 1e-12;
        NewtonWorkspace ws;
        const auto a = newton_solve(fn, std::vector<double>{0.0, 1.0}, cfg, {}, &ws);
        const auto b = newton_solve(fn, std::vector<double>{0.1, 0.9}, cfg, {}, &ws);
        CHECK(a.z[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
        CHECK(b.z[1] == doctest::Approx(std::cbrt(std::log(2.0))).epsilon(1e-12));
    }
}

TEST_SUITE("finite differences") {
    TEST_CASE("affine map returns its matrix") {
        auto fn = [](std::span<const double> z, std::span<double> r) {
            r[0] = 2.0 * z[0] - 3.0 * z[1] + 1.0;
            r[1] = 0.5 * z[0] + 7.0 * z[2];
            r[2] = -z[1] + 4.0;
        };
        const std::vector<double> z{0.3, -2.0, 5.0};
        const auto J = fd_jacobian(fn, z, 1e-7, 3);
        const double A[3][3] = {{2.0, -3.0, 0.0}, {0.5, 0.0, 7.0}, {0.0, -1.0, 0.0}};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                CHECK(std::abs(J(i, j) - A[i][j]) < 1e-7);
            }
        }
    }

    TEST_CASE("square at three") {
        auto fn = [](std::span<const double> z, std::span<double> r) { r[0] = z[0] * z[0]; };
        const auto J = fd_jacobian(fn, std::vector<double>{3.0}, 1e-7, 1);
        CHECK(std::abs(J(0, 0) - 6.0) < 1e-5);
        const auto Jc = fd_jacobian(fn, std::vector<double>{3.0}, 1e-7, 1, true);
        CHECK(std::abs(Jc(0, 0) - 6.0) < 1e-7);
    }

    TEST_CASE("quadratic form gradient") {
        const double Q[3][3] = {{4.0, 1.0, 0.5}, {1.0, 3.0, -1.0}, {0.5, -1.0, 2.0}};
        // r = gradient of z'Qz/2 + z0^3, Jacobian Q + diag(6 z0, 0, 0)
        auto fn = [&](std::span<const double> z, std::span<double> r) {
            for (int i = 0; i < 3; ++i) {
                r[i] = Q[i][0] * z[0] + Q[i][1] * z[1] + Q[i][2] * z[2];
            }
            r[0] += 3.0 * z[0] * z[0];
        };
        const std::vector<double> z{0.7, -1.1, 2.4};
        const auto J = fd_jacobian(fn, z, 1e-7, 3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double exact = Q[i][j] + (i == 0 && j == 0 ? 6.0 * z[0] : 0.0);
                CHECK(std::abs(J(i, j) - exact) < 1e-6);
            }
        }
    }

    TEST_CASE("non-finite output is an error") {
        auto fn = [](std::span<const double> z, std::span<double> r) { r[0] = std::log(z[0]); };
        CHECK_THROWS_AS(fd_jacobian(fn, std::vector<double>{-1.0}, 1e-7, 1), Error);
    }
}

TEST_SUITE("implicit euler") {
    TEST_CASE("one decay step") {
        Decay sys;
        SolverConfig cfg;
        cfg.dt = 0.1;
        cfg.newton_tol = 1e-14;
        const auto s = step_implicit_euler(sys, DaeState{0.0, {1.0}, {}}, cfg);
        CHECK(s.x[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-12));
        CHECK(s.t == doctest::Approx(0.1));
    }

    TEST_CASE("zero system leaves the state unchanged") {
        LinearDae sys;  // f = 0, g = y
        SolverConfig cfg;
        const auto s = step_implicit_euler(sys, DaeState{2.0, {3.5}, {0.0}}, cfg);
        CHECK(s.x[0] == 3.5);
        CHECK(s.y[0] == 0.0);
    }

    TEST_CASE("index-1 linear DAE follows the hand recursion") {
        LinearDae sys;
        sys.b = 1.0;
        sys.p = -1.0;  // x' = y, y = -x
        SolverConfig cfg;
        cfg.dt = 0.05;
        cfg.newton_tol = 1e-15;
        DaeState s{0.0, {1.0}, {-1.0}};
        double x = 1.0;
        for (int i = 0; i < 100; ++i) {
            s = step_implicit_euler(sys, s, cfg);
            x /= 1.0 + cfg.dt;
            CHECK(std::abs(s.x[0] - x) <= 1e-12);
            CHECK(std::abs(s.y[0] + s.x[0]) <= 1e-12);
        }
    }

    TEST_CASE("first-order convergence") {
        const double e1 = decay_error(0.1), e2 = decay_error(0.05), e3 = decay_error(0.025);
        CHECK(std::log2(e1 / e2) == doctest::Approx(1.0).epsilon(0.2));
        CHECK(std::log2(e2 / e3) == doctest::Approx(1.0).epsilon(0.2));
    }

    TEST_CASE("a steady state is a fixed point") {
        LinearDae sys;
        sys.a = -2.0;
        sys.b = 1.0;
        sys.c = 3.0;
        sys.p = 0.5;
        sys.q = 1.0;
        // Steady: -2x + (0.5x + 1) + 3 = 0
        auto fn = [&](std::span<const double> z, std::span<double> r) {
            std::vector<double> f(1), g(1);
            sys.residuals(0.0, z.subspan(0, 1), z.subspan(1, 1), f, g);
            r[0] = f[0];
            r[1] = g[0];
        };
        NewtonConfig ncfg;
        ncfg.tol = 1e-14;
        const auto ss = newton_solve(fn, std::vector<double>{0.0, 0.0}, ncfg);
        SolverConfig cfg;
        cfg.dt = 5.0;
        const auto s = step_implicit_euler(sys, DaeState{0.0, {ss.z[0]}, {ss.z[1]}}, cfg);
        CHECK(s.x[0] == doctest::Approx(ss.z[0]).epsilon(1e-12));
        CHECK(s.y[0] == doctest::Approx(ss.z[1]).epsilon(1e-12));
    }

    TEST_CASE("integrator driver is deterministic") {
        LinearDae sys;
        sys.a = -1.0;
        sys.b = 0.3;
        sys.c = 1.0;
        sys.p = 2.0;
        SolverConfig cfg;
        cfg.dt = 0.2;
        for (Scheme scheme : {Scheme::ImplicitEuler, Scheme::Bdf2}) {
            Integrator i1(sys, cfg, scheme), i2(sys, cfg, scheme);
            DaeState a{0.0, {0.0}, {0.0}}, b = a;
            for (int k = 0; k < 50; ++k) {
                a = i1.step(a);
                b = i2.step(b);
            }
            CHECK(a.x[0] == b.x[0]);
            CHECK(a.y[0] == b.y[0]);
            CHECK(a.t == doctest::Approx(10.0));
        }
    }

    TEST_CASE("BDF2 is second order") {
        Decay sys;
        auto err = [&](double dt) {
            SolverConfig cfg;
            cfg.dt = dt;
            cfg.newton_tol = 1e-15;
            Integrator integ(sys, cfg, Scheme::Bdf2);
            DaeState s{0.0, {1.0}, {}};
            for (int i = 0; i < static_cast<int>(std::lround(1.0 / dt)); ++i) {
                s = integ.step(s);
            }
            return std::abs(s.x[0] - std::exp(-1.0));
        };
        CHECK(std::log2(err(0.01) / err(0.005)) == doctest::Approx(2.0).epsilon(0.1));
    }

    TEST_CASE("invalid solver configuration") {
        SolverConfig cfg;
        cfg.dt = 0.0;
        CHECK_THROWS_AS(cfg.validate(), DomainError);
    }
}

TEST_SUITE("plant assembly") {
    const auto chemistry = chem::load_chemistry(test::data_dir() / "chemistry.json");
    const auto plant_text = slurp(test::data_dir() / "scenarios" / "default" / "plant.json");

    TEST_CASE("uniform isothermal loop at rest has zero residuals") {
        auto desc = io::parse_plant(plant_text);
        PlantModel model(desc, chemistry);
        chem::Composition solids;
        solids[chem::SpeciesId::Metakaolin] = 2.0;
        PlantState s = model.uniform_state(900.0, desc.ambient_pressure, chem::air_mole_fractions(), solids);
        s.d.p_el = 0.0;
        s.u = PlantInputs{};
        // Close the vent so the loop sits at ambient pressure without flow.
        std::vector<double> f, g;
        assemble_residuals(model, s, f, g);
        for (std::size_t i = 0; i < model.x_quad(); ++i) {
            CHECK(std::abs(f[i]) <= 1e-9 * std::max(1.0, std::abs(s.x[i])));
        }
        std::vector<double> xs(model.n_differential()), gs(model.n_algebraic());
        model.scales(xs, gs);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(std::abs(g[i] / gs[i]) <= 1e-9);
        }
    }

    TEST_CASE("declaration order in the plant file does not matter") {
        auto reordered = plant_text;
        // Swap the order in which the cyclones and the connectors are listed.
        const auto a = reordered.find("\"preheater1\"");
        const auto b = reordered.find("\"separator\": {");
        const auto end = reordered.find("}}", b) + 2;
        const std::string sep = reordered.substr(b, end - b);
        reordered.erase(b, end - b);
        reordered.insert(a, sep + ",\n    ");
        const auto trailing = reordered.rfind(",", reordered.find("\n  },\n  \"connectors\""));
        reordered.erase(trailing, 1);
        CHECK(reordered != plant_text);

        PlantModel m1(io::parse_plant(plant_text), chemistry);
        PlantModel m2(io::parse_plant(reordered), chemistry);
        chem::Composition solids;
        solids[chem::SpeciesId::Kaolinite] = 1.0;
        PlantState s = m1.uniform_state(800.0, 101400.0, chem::air_mole_fractions(), solids);
        s.u.fan_dp = 1500.0;
        s.u.clay_feed = 0.5;
        s.u.fresh_air = 0.2;
        s.d.p_el = 1.0e6;
        std::vector<double> f1, g1, f2, g2;
        assemble_residuals(m1, s, f1, g1);
        assemble_residuals(m2, s, f2, g2);
        CHECK(f1 == f2);
        CHECK(g1 == g2);
    }

    TEST_CASE("dimension mismatch is a structural error") {
        PlantModel model(io::parse_plant(plant_text), chemistry);
        PlantState s = model.ambient_state(298.15);
        s.x.pop_back();
        std::vector<double> f, g;
        CHECK_THROWS_AS(assemble_residuals(model, s, f, g), StructuralError);
    }

    TEST_CASE("calciner-only plant reproduces the unit model") {
        PlantDescription desc;
        desc.topology = PlantTopology::CalcinerOnly;
        desc.calciner.n_cells = 8;
        desc.boundary_inflow.flow = 20.0 * chem::air_mole_fractions();
        desc.boundary_inflow.flow[chem::SpeciesId::Kaolinite] = 0.8;
        desc.boundary_inflow.T_gas = 1150.0;
        desc.boundary_inflow.T_solid = 500.0;
        PlantModel model(desc, chemistry);

        chem::Composition solids;
        solids[chem::SpeciesId::Kaolinite] = 3.0;
        solids[chem::SpeciesId::Metakaolin] = 1.0;
        PlantState s = model.uniform_state(950.0, 101500.0, chem::air_mole_fractions(), solids);
        s.d.T_amb = 298.15;
        // Perturb the cells so every term of the balance is active.
        for (std::size_t k = 0; k < model.n_cells(); ++k) {
            s.y[model.y_cell(k)] -= 30.0 * static_cast<double>(k);
            s.y[model.y_cell(k) + 2] -= 12.0 * static_cast<double>(k);
        }
        std::vector<double> f, g;
        assemble_residuals(model, s, f, g);
        const auto diag = model.diagnostics(s);

        units::CalcinerModel unit{desc.calciner, &model.thermo(), &model.kinetics(), 298.15, 0.0};
        const auto out = units::cell_outflow(model.thermo(), diag.cells.back(), s.y[model.y_flows()]);
        const auto ref = units::calciner_residuals(diag.cells, desc.boundary_inflow, out, unit);
        for (std::size_t k = 0; k < model.n_cells(); ++k) {
            const std::size_t xi = model.x_cell(k);
            for (std::size_t i = 0; i < chem::kNumSpecies; ++i) {
                const double r = ref.rates[k].dc_dt.moles[i];
                CHECK(f[xi + i] == doctest::Approx(r).epsilon(1e-9).scale(1e-9));
            }
            CHECK(f[xi + 5] == doctest::Approx(ref.rates[k].du_s_dt).epsilon(1e-9));
            CHECK(f[xi + 6] == doctest::Approx(ref.rates[k].du_g_dt).epsilon(1e-9));
            CHECK(g[model.y_cell(k)] == doctest::Approx(ref.algebraic[k][0]).epsilon(1e-9).scale(1e-9));
        }
    }
}
