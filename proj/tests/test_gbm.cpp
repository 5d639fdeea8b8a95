#include <cmath>
#include <vector>

#include "doctest.h"
#include "reserveband/gbm.hpp"

using namespace reserveband;

TEST_SUITE("gbm") {

TEST_CASE("zero drift zero noise gives a constant path") {
    const auto p = sample_path(MarketParams{0.0, 0.0, 1.0}, 1.0, 0.1, Seed{1, 0});
    REQUIRE(p.values.size() == 11);
    for (double v : p.values) CHECK(v == 1.0);
}

TEST_CASE("sigma = 0 reproduces the exponential level at every node") {
    const MarketParams m{0.1, 0.0, 2.0};
    const auto p = sample_path(m, 1.0, 0.01, Seed{1, 0});
    REQUIRE(p.values.size() == 101);
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        const double t = static_cast<double>(k) * 0.01;
        CHECK(p.values[k] == doctest::Approx(expected_level(m, t)).epsilon(1e-12));
    }
    CHECK(p.values.back() == doctest::Approx(2.0 * std::exp(0.1)).epsilon(1e-12));
}

TEST_CASE("identical seeds give bit-identical paths") {
    const MarketParams m{0.05, 0.4, 1.3};
    const auto p1 = sample_path(m, 2.0, 0.01, Seed{77, 5});
    const auto p2 = sample_path(m, 2.0, 0.01, Seed{77, 5});
    REQUIRE(p1.values.size() == p2.values.size());
    for (std::size_t k = 0; k < p1.values.size(); ++k) CHECK(p1.values[k] == p2.values[k]);

    const auto p3 = sample_path(m, 2.0, 0.01, Seed{77, 6});
    CHECK(p3.values[1] != p1.values[1]);
}

TEST_CASE("paths stay positive") {
    const MarketParams m{-0.5, 1.5, 0.01};
    for (std::uint64_t i = 0; i < 50; ++i) {
        const auto p = sample_path(m, 1.0, 0.005, Seed{3, i});
        for (double v : p.values) CHECK(v > 0.0);
    }
}

TEST_CASE("grid preconditions") {
    const MarketParams m{0.0, 0.2, 1.0};
    CHECK_THROWS_AS(sample_path(m, 1.0, 0.0, Seed{1, 0}), InvalidGrid);
    CHECK_THROWS_AS(sample_path(m, 1.0, -0.1, Seed{1, 0}), InvalidGrid);
    CHECK_THROWS_AS(sample_path(m, 0.05, 0.1, Seed{1, 0}), InvalidGrid);
}

TEST_CASE("expected level oracle") {
    CHECK(expected_level(MarketParams{0.0, 0.3, 1.0}, 5.0) == 1.0);
    CHECK(expected_level(MarketParams{0.1, 0.3, 2.0}, 1.0) ==
          doctest::Approx(2.0 * std::exp(0.1)).epsilon(1e-15));
}

TEST_CASE("terminal marginal law matches the lognormal within 3 standard errors") {
    const MarketParams m{0.05, 0.2, 1.0};
    const double T = 1.0, dt = 0.05;
    const std::size_t n = 20000;
    double sum = 0.0, sum2 = 0.0, lsum = 0.0, lsum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = sample_path(m, T, dt, Seed{40, i});
        const double xT = p.values.back();
        const double lx = std::log(xT / m.x0);
        sum += xT;
        sum2 += xT * xT;
        lsum += lx;
        lsum2 += lx * lx;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sum2 / n - mean * mean) * n / (n - 1.0));
    CHECK(std::fabs(mean - expected_level(m, T)) < 3.0 * sd / std::sqrt(static_cast<double>(n)));

    const double lmean = lsum / n;
    const double lvar = (lsum2 / n - lmean * lmean) * n / (n - 1.0);
    const double want_mean = (m.mu - 0.5 * m.sigma * m.sigma) * T;
    const double want_var = m.sigma * m.sigma * T;
    CHECK(std::fabs(lmean - want_mean) <
          3.0 * std::sqrt(lvar / static_cast<double>(n)));
    CHECK(std::fabs(lvar - want_var) <
          3.0 * want_var * std::sqrt(2.0 / static_cast<double>(n)));
}

}  // TEST_SUITE
