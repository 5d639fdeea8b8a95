#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "reserveband/gbm.hpp"
#include "reserveband/reflection.hpp"

using namespace reserveband;

namespace {

// Direct O(N^2) transcription of the double-Skorokhod net-control formula,
// used as the oracle for the O(N) library evaluation. Min/max trees over
// identical leaves are exact in floating point, so the two must agree bit
// for bit.
std::vector<double> net_control_bruteforce(const std::vector<double>& x, double a, double b) {
    std::vector<double> w(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        double inf0t = std::numeric_limits<double>::infinity();
        for (std::size_t u = 0; u <= t; ++u) inf0t = std::min(inf0t, x[u] - a);
        const double first = std::min(std::max(x[0] - b, 0.0), inf0t);
        double sup = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s <= t; ++s) {
            double infst = std::numeric_limits<double>::infinity();
            for (std::size_t u = s; u <= t; ++u) infst = std::min(infst, x[u] - a);
            sup = std::max(sup, std::min(x[s] - b, infst));
        }
        w[t] = -std::max(first, sup);
    }
    return w;
}

SamplePath make_path(std::vector<double> values, double dt = 0.1) {
    SamplePath p;
    p.t0 = 0.0;
    p.dt = dt;
    p.values = std::move(values);
    return p;
}

}  // namespace

TEST_SUITE("reflection") {

TEST_CASE("closed form matches the brute-force formula bit for bit") {
    const BandPolicy band{1.0, 2.0};
    for (std::uint64_t i = 0; i < 40; ++i) {
        const auto p = sample_path(MarketParams{0.0, 1.0, 1.4}, 2.0, 0.01, Seed{500, i});
        const auto fast = net_control_closed_form(p, band);
        const auto slow = net_control_bruteforce(p.values, band.a, band.b);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t k = 0; k < fast.size(); ++k) CHECK(fast[k] == slow[k]);
    }
}

TEST_CASE("interior path needs no control") {
    const auto p = make_path(std::vector<double>(12, 1.5));
    const auto w = net_control_closed_form(p, BandPolicy{1.0, 2.0});
    for (double v : w) CHECK(v == 0.0);
    const auto c = apply_band(p, BandPolicy{1.0, 2.0});
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        CHECK(c.l[k] == 0.0);
        CHECK(c.u[k] == 0.0);
        CHECK(c.z[k] == 1.5);
    }
}

TEST_CASE("start above the ceiling forces a time-0 sale") {
    const auto p = make_path({3.0, 3.0, 3.0});
    const auto w = net_control_closed_form(p, BandPolicy{1.0, 2.0});
    CHECK(w[0] == -1.0);
    const auto c = apply_band(p, BandPolicy{1.0, 2.0});
    CHECK(c.u[0] == 1.0);
    CHECK(c.l[0] == 0.0);
    CHECK(c.z[0] == 2.0);
}

TEST_CASE("start below the floor forces a time-0 purchase") {
    const auto p = make_path({0.5, 0.5});
    const auto c = apply_band(p, BandPolicy{1.0, 2.0});
    CHECK(c.l[0] == 0.5);
    CHECK(c.z[0] == 1.0);
    const auto w = net_control_closed_form(p, BandPolicy{1.0, 2.0});
    CHECK(w[0] == 0.5);
}

TEST_CASE("linearly decreasing path reflects at the floor only") {
    // X falls 1.5 -> 0.5; L_t = (1 - X_t)^+, U stays 0
    std::vector<double> xs;
    for (int k = 0; k <= 10; ++k) xs.push_back(1.5 - 0.1 * k);
    const auto p = make_path(xs);
    const auto w = net_control_closed_form(p, BandPolicy{1.0, 2.0});
    for (std::size_t k = 0; k < xs.size(); ++k)
        CHECK(w[k] == doctest::Approx(std::max(1.0 - xs[k], 0.0)).epsilon(1e-15));
    CHECK(w.back() == doctest::Approx(0.5).epsilon(1e-15));

    const auto c = apply_band(p, BandPolicy{1.0, 2.0});
    CHECK(c.u.back() == 0.0);
    CHECK(c.l.back() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("monotone increasing path sells off the excess") {
    std::vector<double> xs;
    for (int k = 0; k <= 20; ++k) xs.push_back(1.0 + 0.1 * k);
    const auto p = make_path(xs);
    const auto c = apply_band(p, BandPolicy{1.0, 2.0});
    for (std::size_t k = 0; k < xs.size(); ++k) {
        CHECK(c.l[k] == 0.0);
        CHECK(c.u[k] == doctest::Approx(std::max(xs[k] - 2.0, 0.0)).epsilon(1e-13));
    }
    const auto w = net_control_closed_form(p, BandPolicy{1.0, 2.0});
    for (std::size_t k = 0; k < xs.size(); ++k)
        CHECK(w[k] == doctest::Approx(-std::max(xs[k] - 2.0, 0.0)).epsilon(1e-13));
}

TEST_CASE("incremental regulator equals the closed form on random paths") {
    const BandPolicy band{1.0, 1.6};
    for (std::uint64_t i = 0; i < 30; ++i) {
        const auto p = sample_path(MarketParams{0.02, 0.9, 1.2}, 5.0, 1e-3, Seed{550, i});
        const auto c = apply_band(p, band);
        const auto w = net_control_closed_form(p, band);
        double worst = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k)
            worst = std::max(worst, std::fabs((c.l[k] - c.u[k]) - w[k]));
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("regulator invariants hold exactly") {
    const BandPolicy band{1.0, 1.6};
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto p = sample_path(MarketParams{0.0, 1.1, 0.8}, 3.0, 1e-3, Seed{600, i});
        const auto c = apply_band(p, band);
        double lsum = 0.0, usum = 0.0;
        double prev_l = 0.0, prev_u = 0.0;
        for (std::size_t k = 0; k < c.z.size(); ++k) {
            CHECK(c.z[k] >= band.a);
            CHECK(c.z[k] <= band.b);
            const double dl = c.l[k] - prev_l;
            const double du = c.u[k] - prev_u;
            CHECK(dl >= 0.0);
            CHECK(du >= 0.0);
            CHECK_FALSE((dl > 0.0 && du > 0.0));
            if (c.z[k] > band.a) lsum += dl;
            if (c.z[k] < band.b) usum += du;
            // algebraic identity z = x + l - u, up to rounding
            CHECK(c.z[k] == doctest::Approx(p.values[k] + c.l[k] - c.u[k]).epsilon(1e-12));
            prev_l = c.l[k];
            prev_u = c.u[k];
        }
        CHECK(lsum == 0.0);  // complementarity, exact by construction
        CHECK(usum == 0.0);
    }
}

TEST_CASE("floor-only policy never sells") {
    const auto interior = make_path(std::vector<double>(5, 1.5));
    const auto c1 = apply_policy(interior, PolicySpec::make_floor_only(1.0));
    for (std::size_t k = 0; k < c1.z.size(); ++k) {
        CHECK(c1.l[k] == 0.0);
        CHECK(c1.u[k] == 0.0);
    }

    std::vector<double> falling;
    for (int k = 0; k <= 10; ++k) falling.push_back(1.5 - 0.1 * k);
    const auto c2 = apply_policy(make_path(falling), PolicySpec::make_floor_only(1.0));
    CHECK(c2.l.back() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c2.z.back() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c2.u.back() == 0.0);

    // one-sided Skorokhod formula l_t = sup_{s<=t} (a - X_s)^+
    for (std::uint64_t i = 0; i < 10; ++i) {
        const auto p = sample_path(MarketParams{0.0, 0.8, 1.1}, 2.0, 1e-2, Seed{61, i});
        const auto c = apply_policy(p, PolicySpec::make_floor_only(1.0));
        double run = 0.0;
        for (std::size_t k = 0; k < p.values.size(); ++k) {
            run = std::max(run, 1.0 - p.values[k]);
            CHECK(c.l[k] == doctest::Approx(std::max(run, 0.0)).epsilon(1e-11));
        }
    }
}

TEST_CASE("band policy dispatch matches apply_band") {
    const auto p = sample_path(MarketParams{0.0, 1.0, 1.3}, 1.0, 1e-2, Seed{62, 0});
    const auto via_policy = apply_policy(p, PolicySpec::make_band(BandPolicy{1.0, 2.0}));
    const auto direct = apply_band(p, BandPolicy{1.0, 2.0});
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        CHECK(via_policy.z[k] == direct.z[k]);
        CHECK(via_policy.l[k] == direct.l[k]);
        CHECK(via_policy.u[k] == direct.u[k]);
    }
}

}  // TEST_SUITE
