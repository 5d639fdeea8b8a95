// Closed forms for the band-policy gain problem.
//
// Conventions carried throughout:
//   * roots: -gamma1 < 0 < gamma2 solve sigma^2 g^2/2 + (mu - sigma^2/2) g = rate,
//     so x^{gamma2} and x^{-gamma1} span the solutions of Gamma u = rate * u,
//     Gamma u = mu x u' + (sigma^2/2) x^2 u''.
//   * v1(x) = A x^{gamma2} + B x^{-gamma1} on [a,b] with the coefficients
//     pinned by the boundary derivatives v1'(a) = c and v1'(b) = r. That is
//     the pair of conditions the martingale argument needs; the textbook-style
//     normalizers r/g'(b/a), c/g'(a/b) give v'(a) = c/b and v'(b) = r/a
//     instead and are kept only behind the comparison evaluator
//     band_value_literal for reporting.
//   * v2(x) = -K x^{gbar2} with K = (1-n) alpha / (gbar2 a^{gbar2-1}), where
//     gbar2 is the positive root at the secondary rate; this makes
//     Gamma v2 = lambda_bar v2 and v2'(a) = -(1-n) alpha hold identically.
//   * Both value components extend below the floor linearly along the forced
//     time-0 purchase: v(x) = v(a) - slope*(a-x) with slope c resp. (1-n)alpha.
#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "reserveband/errors.hpp"
#include "reserveband/model.hpp"

namespace reserveband {

// Positive characteristic exponents at a given discount rate.
struct Roots {
    double gamma1 = 0.0;  // -gamma1 is the negative root
    double gamma2 = 0.0;  // positive root
    double rate = 0.0;
};

inline Roots characteristic_roots(const MarketParams& market, double rate) {
    if (market.sigma <= 0.0) throw NonPositiveVolatility();
    if (rate <= 0.0) throw NonPositiveArgument("discount rate must be positive");
    const double s2 = market.sigma * market.sigma;
    const double nu = market.mu - 0.5 * s2;
    const double disc = std::sqrt(nu * nu + 2.0 * s2 * rate);
    return Roots{(disc + nu) / s2, (disc - nu) / s2, rate};
}

// Residuals of the defining quadratic at -gamma1 and gamma2.
inline std::pair<double, double> root_residuals(const Roots& roots, const MarketParams& market) {
    const double s2 = market.sigma * market.sigma;
    const double nu = market.mu - 0.5 * s2;
    auto quad = [&](double g) { return 0.5 * s2 * g * g + nu * g - roots.rate; };
    return {std::fabs(quad(-roots.gamma1)), std::fabs(quad(roots.gamma2))};
}

// g(y) = gamma1 y^{gamma2} + gamma2 y^{-gamma1}; strictly decreasing on (0,1)
// with g'(1) = 0.
inline double g_eval(double y, const Roots& roots) {
    if (!(y > 0.0)) throw NonPositiveArgument("g is defined on y > 0");
    return roots.gamma1 * std::pow(y, roots.gamma2) + roots.gamma2 * std::pow(y, -roots.gamma1);
}

inline double g_deriv(double y, const Roots& roots) {
    if (!(y > 0.0)) throw NonPositiveArgument("g' is defined on y > 0");
    return roots.gamma1 * roots.gamma2 *
           (std::pow(y, roots.gamma2 - 1.0) - std::pow(y, -roots.gamma1 - 1.0));
}

// log g(y), evaluated in log space so monotonicity checks survive exponents
// large enough to overflow y^{-gamma1} near 0.
inline double log_g_eval(double y, const Roots& roots) {
    if (!(y > 0.0)) throw NonPositiveArgument("g is defined on y > 0");
    const double ly = std::log(y);
    const double t1 = std::log(roots.gamma1) + roots.gamma2 * ly;
    const double t2 = std::log(roots.gamma2) - roots.gamma1 * ly;
    const double hi = std::max(t1, t2);
    return hi + std::log1p(std::exp(std::min(t1, t2) - hi));
}

struct V1Coefficients {
    double A = 0.0;  // multiplies x^{gamma2}
    double B = 0.0;  // multiplies x^{-gamma1}
};

// Solves the 2x2 boundary-derivative system v1'(a) = c, v1'(b) = r.
inline V1Coefficients solve_v1_coefficients(double a, double b, double r, double c,
                                            const Roots& roots) {
    const double g1 = roots.gamma1, g2 = roots.gamma2;
    const double m11 = g2 * std::pow(a, g2 - 1.0), m12 = -g1 * std::pow(a, -g1 - 1.0);
    const double m21 = g2 * std::pow(b, g2 - 1.0), m22 = -g1 * std::pow(b, -g1 - 1.0);
    const double det = m11 * m22 - m12 * m21;
    const double scale = std::max(std::fabs(m11 * m22), std::fabs(m12 * m21));
    if (std::fabs(det) <= 1e-14 * scale)
        throw SingularSystem("boundary system singular (b = " + std::to_string(b) +
                             " too close to a = " + std::to_string(a) + ")");
    return V1Coefficients{(c * m22 - m12 * r) / det, (m11 * r - c * m21) / det};
}

struct BStar {
    double value = 0.0;
    bool degenerate = false;  // r == c collapses the band to b* = a
};

// Root of g(1)/g(a/b) = r/c on (a, infinity). The map is strictly
// decreasing from 1 (b -> a) to 0 (b -> infinity) because g decreases on
// (0,1), so doubling the upper end until the target is crossed always
// brackets the root; bisection then converges unconditionally.
inline BStar solve_b_star(double a, double r, double c, const Roots& roots) {
    if (r <= 0.0) throw DegenerateSaleRevenue();
    if (!(c >= r)) throw Error("unit purchase cost c must satisfy c >= r");
    if (r == c) return BStar{a, true};

    const double target = r / c;
    const double g1v = g_eval(1.0, roots);
    auto ratio = [&](double b) { return g1v / g_eval(a / b, roots); };

    double hi = 2.0 * a;
    int guard = 0;
    while (ratio(hi) > target) {
        hi *= 2.0;
        if (++guard > 600) throw Error("failed to bracket b*");
    }

    // Monotone-bracket evidence: the ratio must be strictly decreasing on
    // the bracket used for this solve.
    {
        const double blo = a * (1.0 + 1e-9);
        double prev = ratio(blo);
        for (int j = 1; j < 100; ++j) {
            const double bj = blo + (hi - blo) * static_cast<double>(j) / 99.0;
            const double rj = ratio(bj);
            if (!(rj < prev))
                throw Error("threshold map g(1)/g(a/b) failed to decrease at b = " +
                            std::to_string(bj));
            prev = rj;
        }
    }

    double lo = a;
    for (int it = 0; it < 300 && (hi - lo) > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ratio(mid) > target ? lo : hi) = mid;
    }
    return BStar{0.5 * (lo + hi), false};
}

// Golden-section maximization of a unimodal function on [lo, hi].
template <typename F>
double golden_section_maximize(F&& f, double lo, double hi, double rel_tol = 1e-10,
                               int max_iter = 400) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (hi - lo) > rel_tol * (std::fabs(lo) + std::fabs(hi)); ++i) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

// Gain of the interior expansion at x for the band [a,b], coefficients
// re-solved for each b. Used by the argmax oracle and the scan's analytic
// column.
inline double band_value_at(double x, double a, double b, double r, double c,
                            const Roots& roots) {
    const auto [A, B] = solve_v1_coefficients(a, b, r, c, roots);
    return A * std::pow(x, roots.gamma2) + B * std::pow(x, -roots.gamma1);
}

// Maximizes b -> v1(x_probe; [a,b]) by golden section. The sign of the
// b-derivative is independent of the probe point (it is B'(b) times a
// positive function of x), so the argmax does not depend on x_probe; the
// caller may still sweep probes as a diagnostic.
inline double argmax_b_oracle(double a, double r, double c, const Roots& roots, double x_probe) {
    if (r <= 0.0) throw DegenerateSaleRevenue();
    if (!(x_probe > a)) throw NonPositiveArgument("x_probe must exceed the floor");
    if (r == c) return a;

    auto value = [&](double b) { return band_value_at(x_probe, a, b, r, c, roots); };

    double hi = 2.0 * a;
    int guard = 0;
    while (value(2.0 * hi) >= value(hi)) {
        hi *= 2.0;
        if (++guard > 400) throw Error("failed to bracket the gain argmax in b");
    }
    return golden_section_maximize(value, a * (1.0 + 1e-12), 2.0 * hi, 1e-12);
}

// Central-difference residual of the first-order condition d v_b(x)/db at b.
inline double first_order_condition_residual(double a, double r, double c, const Roots& roots,
                                             double b, double x_probe) {
    const double h = 1e-5 * b;
    return (band_value_at(x_probe, a, b + h, r, c, roots) -
            band_value_at(x_probe, a, b - h, r, c, roots)) /
           (2.0 * h);
}

// Solved gain problem for one band. b_star is the Eq.-style threshold when
// produced by solve_gain, but the same container serves any fixed ceiling.
struct GainSolution {
    Roots roots{};      // at lambda
    Roots roots_bar{};  // at lambda_bar
    double a = 0.0;
    double b_star = 0.0;
    double coef_A = 0.0;
    double coef_B = 0.0;
    double coef_K = 0.0;  // v2(x) = -K x^{gbar2}
    double r = 0.0;
    double c = 0.0;
    double alpha = 0.0;
    double n = 1.0;
    bool degenerate = false;
};

inline double v2_coefficient(double a, double alpha, double n, const Roots& roots_bar) {
    return (1.0 - n) * alpha / (roots_bar.gamma2 * std::pow(a, roots_bar.gamma2 - 1.0));
}

// Secondary-rate component. Power form down to the floor, linear below it.
// Identically zero (positive zero, not -0.0) when n = 1 or alpha = 0.
inline double v2_eval(double x, double a, double alpha, double n, const Roots& roots_bar) {
    const double K = v2_coefficient(a, alpha, n, roots_bar);
    if (K == 0.0) return 0.0;
    if (x >= a) return -K * std::pow(x, roots_bar.gamma2);
    return -K * std::pow(a, roots_bar.gamma2) - (1.0 - n) * alpha * (a - x);
}

// Primary-rate component: interior expansion on [a, b], linear
// continuations with the matched boundary slopes outside.
inline double v1_eval(double x, const GainSolution& sol) {
    if (sol.degenerate)
        throw Error("degenerate band (r = c): the two-sided gain expansion does not exist");
    auto interior = [&](double y) {
        return sol.coef_A * std::pow(y, sol.roots.gamma2) +
               sol.coef_B * std::pow(y, -sol.roots.gamma1);
    };
    if (x > sol.b_star) return interior(sol.b_star) + (x - sol.b_star) * sol.r;
    if (x < sol.a) return interior(sol.a) - sol.c * (sol.a - x);
    return interior(x);
}

inline double total_gain(double x, const GainSolution& sol) {
    return v1_eval(x, sol) + v2_eval(x, sol.a, sol.alpha, sol.n, sol.roots_bar);
}

// Assembles the solution for the band [a, b]; b defaults to the threshold
// solving g(1)/g(a/b) = r/c.
inline GainSolution solve_gain_for_band(const ValidatedModel& m, double b) {
    GainSolution sol;
    sol.roots = characteristic_roots(m.market, m.costs.lambda);
    sol.roots_bar = characteristic_roots(m.market, m.costs.lambda_bar);
    sol.a = m.floor;
    sol.b_star = b;
    sol.r = m.r;
    sol.c = m.c;
    sol.alpha = m.costs.alpha;
    sol.n = m.costs.n;
    sol.coef_K = v2_coefficient(m.floor, m.costs.alpha, m.costs.n, sol.roots_bar);
    if (b == m.floor) {
        sol.degenerate = true;
        sol.coef_A = std::numeric_limits<double>::quiet_NaN();
        sol.coef_B = std::numeric_limits<double>::quiet_NaN();
        return sol;
    }
    const auto coef = solve_v1_coefficients(m.floor, b, m.r, m.c, sol.roots);
    sol.coef_A = coef.A;
    sol.coef_B = coef.B;
    return sol;
}

inline GainSolution solve_gain(const ValidatedModel& m) {
    const Roots roots = characteristic_roots(m.market, m.costs.lambda);
    const BStar bs = solve_b_star(m.floor, m.r, m.c, roots);
    return solve_gain_for_band(m, bs.value);
}

// b -> infinity limit of the band family: never sell, reflect at the floor
// only. A -> 0 and B -> -c a^{gamma1+1}/gamma1 from the floor condition.
inline double floor_only_value(double x, double a, double c, const Roots& roots) {
    const double B = -c * std::pow(a, roots.gamma1 + 1.0) / roots.gamma1;
    if (x >= a) return B * std::pow(x, -roots.gamma1);
    return B * std::pow(a, -roots.gamma1) - c * (a - x);
}

// Literal two-term normalization r/g'(b/a) g(x/a) + c/g'(a/b) g(x/b).
// Retained for comparison output only: its boundary derivatives are c/b and
// r/a, not the smooth-pasting values, and the verify report quantifies the
// gap against v1_eval.
inline double band_value_literal(double x, double a, double b, double r, double c,
                                 const Roots& roots) {
    auto inner = [&](double y) {
        return r / g_deriv(b / a, roots) * g_eval(y / a, roots) +
               c / g_deriv(a / b, roots) * g_eval(y / b, roots);
    };
    if (x > b) return inner(b) + (x - b) * r;
    return inner(x);
}

enum class CostVariant { Abm, Gbm };

// Cost recovered from gain through the discounted-holding offset. The
// arithmetic-Brownian offset h x/lambda + h mu/lambda^2 and the geometric
// offset h x/(lambda - mu) are both available; they coincide when mu = 0
// and Monte Carlo arbitrates otherwise.
inline double cost_from_gain(double x, double gain, double h, double mu, double lambda,
                             CostVariant variant) {
    if (variant == CostVariant::Abm) return h * x / lambda + h * mu / (lambda * lambda) - gain;
    if (lambda <= mu) throw DiscountBelowDrift("corrected offset requires lambda > mu");
    return h * x / (lambda - mu) - gain;
}

// Max-abs residual of Gamma u - rate*u over grid_n strictly interior points
// of [lo, hi], derivatives by central differences with abscissa-scaled
// steps (1e-6 x for u', 1e-4 x for u'').
template <typename F>
double generator_residual(F&& fn, double lo, double hi, const MarketParams& market, double rate,
                          int grid_n) {
    if (grid_n < 3) throw InvalidGrid("generator check needs at least 3 grid points");
    if (!(lo > 0.0) || !(hi > lo)) throw InvalidGrid("need 0 < lo < hi");
    const double s2 = market.sigma * market.sigma;
    double worst = 0.0;
    for (int j = 0; j < grid_n; ++j) {
        const double x = lo + (hi - lo) * static_cast<double>(j + 1) / (grid_n + 1);
        const double h1 = 1e-6 * x;
        const double h2 = 1e-4 * x;
        const double d1 = (fn(x + h1) - fn(x - h1)) / (2.0 * h1);
        const double d2 = (fn(x + h2) - 2.0 * fn(x) + fn(x - h2)) / (h2 * h2);
        const double res = market.mu * x * d1 + 0.5 * s2 * x * x * d2 - rate * fn(x);
        worst = std::max(worst, std::fabs(res));
    }
    return worst;
}

// Central-difference slope with an abscissa-scaled step.
template <typename F>
double fd_slope(F&& fn, double x, double rel_step = 1e-6) {
    const double h = rel_step * std::fabs(x);
    return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

}  // namespace reserveband
