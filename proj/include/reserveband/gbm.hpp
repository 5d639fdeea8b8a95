// Geometric Brownian motion sampling on a uniform grid.
//
// Stepping is exact in the marginal law: X_{k+1} = X_k exp((mu - sigma^2/2) dt
// + sigma sqrt(dt) xi_k), so Monte Carlo error isolates reflection and
// quadrature effects rather than scheme bias.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "reserveband/errors.hpp"
#include "reserveband/model.hpp"
#include "reserveband/rng.hpp"

namespace reserveband {

struct SamplePath {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> values;  // length N+1, values[k] at time t0 + k*dt

    std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }
};

inline std::size_t grid_steps(double horizon, double dt) {
    if (!(dt > 0.0) || !(horizon > 0.0) || horizon < dt)
        throw InvalidGrid("need horizon >= dt > 0");
    // Round to the nearest integer number of steps; the effective horizon
    // is steps*dt.
    return static_cast<std::size_t>(std::llround(horizon / dt));
}

// Fills `out` in place (reuses its storage across calls in hot loops).
inline void sample_path_into(const MarketParams& market, double horizon, double dt,
                             const Seed& seed, SamplePath& out) {
    const std::size_t n = grid_steps(horizon, dt);
    out.t0 = 0.0;
    out.dt = dt;
    out.values.resize(n + 1);

    const double drift = (market.mu - 0.5 * market.sigma * market.sigma) * dt;
    const double vol = market.sigma * std::sqrt(dt);
    double x = market.x0;
    out.values[0] = x;
    for (std::size_t k = 0; k < n; ++k) {
        x *= std::exp(drift + vol * normal_variate(seed, k));
        out.values[k + 1] = x;
    }
}

inline SamplePath sample_path(const MarketParams& market, double horizon, double dt,
                              const Seed& seed) {
    SamplePath p;
    sample_path_into(market, horizon, dt, seed, p);
    return p;
}

// E[X_t] = x0 exp(mu t); moment oracle for tests and horizon sizing.
inline double expected_level(const MarketParams& market, double t) {
    return market.x0 * std::exp(market.mu * t);
}

}  // namespace reserveband
