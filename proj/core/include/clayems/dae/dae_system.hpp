#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace clayems::dae {

// Semi-explicit DAE  x' = f(t, x, y),  0 = g(t, x, y).
// The last n_quadrature() entries of x are pure integrators: nothing in f or
// g depends on them, so the steppers update them after the Newton solve.
class DaeSystem {
  public:
    virtual ~DaeSystem() = default;

    virtual std::size_t n_differential() const = 0;
    virtual std::size_t n_algebraic() const = 0;
    virtual std::size_t n_quadrature() const { return 0; }

    virtual void residuals(double t, std::span<const double> x, std::span<const double> y, std::span<double> f,
                           std::span<double> g) const = 0;

    // Typical magnitudes used to scale Newton residuals. Defaults to 1.
    virtual void scales(std::span<double> x_scale, std::span<double> g_scale) const;

    // Rejects physically inadmissible accepted states (throws StateError).
    virtual void check_state(std::span<const double> /*x*/, std::span<const double> /*y*/) const {}
};

struct DaeState {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> y;
};

}  // namespace clayems::dae
