// Parameter containers, validation, and the derived unit gain/cost rates.
#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "reserveband/errors.hpp"

namespace reserveband {

// Geometric Brownian dynamics of the uncontrolled excess reserve:
// dX = mu X dt + sigma X dB, X_0 = x0.
struct MarketParams {
    double mu = 0.0;     // drift rate (1/time)
    double sigma = 0.0;  // volatility (1/sqrt(time))
    double x0 = 1.0;     // initial excess reserve (currency)
};

// Transaction-cost and discounting structure.
//
// lambda discounts holding costs, sale proceeds and the n-fraction of
// purchase costs; lambda_bar discounts the remaining (1-n)-fraction.
struct CostModel {
    double h = 1.0;           // holding cost rate (1/time)
    double alpha = 0.0;       // proportional purchase cost
    double beta = 0.0;        // proportional sale cost
    double n = 1.0;           // discount blend in [0,1]
    double lambda = 1.0;      // primary discount rate (1/time)
    double lambda_bar = 1.0;  // secondary discount rate, lambda >= lambda_bar
};

// Reflection band [a, b]. b == a is the degenerate zero-width band; it is
// representable (sweeps touch it) but most operations want b > a.
struct BandPolicy {
    double a = 0.0;  // floor barrier, exogenous
    double b = 0.0;  // ceiling barrier, chosen

    bool degenerate() const { return b == a; }
};

// A feasible policy: either a two-sided band, or reflection at the floor
// only (never sell). The floor-only variant exists as a comparison policy
// for optimality scans.
struct PolicySpec {
    enum class Kind { Band, FloorOnly };

    Kind kind = Kind::Band;
    BandPolicy band{};   // valid when kind == Band
    double floor = 0.0;  // valid when kind == FloorOnly

    static PolicySpec make_band(BandPolicy p) {
        PolicySpec s;
        s.kind = Kind::Band;
        s.band = p;
        s.floor = p.a;
        return s;
    }
    static PolicySpec make_floor_only(double a) {
        PolicySpec s;
        s.kind = Kind::FloorOnly;
        s.floor = a;
        s.band = BandPolicy{a, a};
        return s;
    }
};

// Unit sale revenue r = h/lambda - beta and unit purchase cost
// c = h/lambda + n*alpha. Always c - r = beta + n*alpha >= 0.
inline std::pair<double, double> unit_rates(const CostModel& costs) {
    const double hl = costs.h / costs.lambda;
    return {hl - costs.beta, hl + costs.n * costs.alpha};
}

enum class ValidationMode { Analytic, Simulation };

// Everything downstream code needs, checked once. Immutable after
// construction; safe to share across workers.
struct ValidatedModel {
    MarketParams market{};
    CostModel costs{};
    double floor = 0.0;  // regulatory floor a
    double r = 0.0;      // unit sale revenue
    double c = 0.0;      // unit purchase cost
    ValidationMode mode = ValidationMode::Analytic;
    std::vector<std::string> warnings{};
};

// Checks the standing assumptions and returns the validated bundle.
// Analytic mode additionally enforces sigma > 0, lambda > mu,
// lambda_bar > mu and r > 0 (finiteness of the discounted functionals and
// existence of a sale barrier). Simulation mode permits sigma = 0
// (deterministic oracle runs) and only warns where analytic mode rejects.
inline ValidatedModel validate(const MarketParams& market, const CostModel& costs, double floor,
                               ValidationMode mode) {
    std::vector<std::string> bad;
    std::vector<std::string> warn;

    auto finite = [](double v) { return std::isfinite(v); };
    for (double v : {market.mu, market.sigma, market.x0, costs.h, costs.alpha, costs.beta,
                     costs.n, costs.lambda, costs.lambda_bar, floor}) {
        if (!finite(v)) {
            bad.push_back("all parameters must be finite");
            break;
        }
    }

    if (market.x0 <= 0.0) bad.push_back("x0 must be positive");
    if (market.sigma < 0.0) bad.push_back("sigma must be nonnegative");
    if (costs.h <= 0.0) bad.push_back("holding rate h must be positive");
    if (costs.alpha < 0.0) bad.push_back("alpha must be nonnegative");
    if (costs.beta < 0.0) bad.push_back("beta must be nonnegative");
    if (costs.n < 0.0 || costs.n > 1.0) bad.push_back("blend n must lie in [0,1]");
    if (costs.lambda_bar <= 0.0) bad.push_back("lambda_bar must be positive");
    if (costs.lambda < costs.lambda_bar)
        bad.push_back("lambda must be >= lambda_bar");
    if (floor <= 0.0) bad.push_back("floor a must be positive");

    if (!bad.empty()) throw ValidationError(std::move(bad));

    const auto [r, c] = unit_rates(costs);

    if (mode == ValidationMode::Analytic) {
        if (market.sigma == 0.0)
            throw NonPositiveVolatility("analytic mode requires sigma > 0");
        if (costs.lambda <= market.mu)
            throw DiscountBelowDrift("analytic mode requires lambda > mu (got lambda = " +
                                     std::to_string(costs.lambda) + ", mu = " +
                                     std::to_string(market.mu) + ")");
        if (costs.lambda_bar <= market.mu)
            throw DiscountBelowDrift("analytic mode requires lambda_bar > mu");
        if (r <= 0.0)
            throw DegenerateSaleRevenue("r = h/lambda - beta = " + std::to_string(r) +
                                        " <= 0: no sale barrier exists");
    } else {
        if (costs.lambda <= market.mu)
            warn.push_back("lambda <= mu: discounted holding cost diverges as the horizon grows");
        if (r <= 0.0) warn.push_back("r <= 0: selling is never profitable");
    }

    ValidatedModel m;
    m.market = market;
    m.costs = costs;
    m.floor = floor;
    m.r = r;
    m.c = c;
    m.mode = mode;
    m.warnings = std::move(warn);
    return m;
}

// Idempotent overload: a validated model revalidates to itself.
inline ValidatedModel validate(const ValidatedModel& m) { return m; }

}  // namespace reserveband
