#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "longmem/arfima.hpp"
#include "longmem/errors.hpp"

using namespace longmem;

namespace {

double sample_acf1(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) {
        den += (v[t] - mean) * (v[t] - mean);
        if (t + 1 < v.size()) num += (v[t] - mean) * (v[t + 1] - mean);
    }
    return num / den;
}

double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("frac_coeffs recursion") {
    const auto psi0 = frac_coeffs(0.0, 10);
    CHECK(psi0[0] == 1.0);
    for (std::size_t j = 1; j < psi0.size(); ++j) CHECK(psi0[j] == 0.0);

    const auto psi = frac_coeffs(0.12, 5);
    CHECK(psi[1] == doctest::Approx(0.12));  // psi_1 = d always

    // Boundary values of the raw recursion itself.
    std::vector<double> raw(3);
    detail::psi_recursion(0.5, raw);
    CHECK(raw[1] == doctest::Approx(0.5));
    CHECK(raw[2] == doctest::Approx(0.375));

    CHECK_THROWS_AS(frac_coeffs(0.5, 10), ConfigError);
    CHECK_THROWS_AS(frac_coeffs(-0.6, 10), ConfigError);
}

TEST_CASE("frac_coeffs with d > 0 are positive and decreasing") {
    for (double d : {0.04, 0.12, 0.3}) {
        const auto psi = frac_coeffs(d, 200);
        for (std::size_t j = 1; j < psi.size(); ++j) {
            CHECK(psi[j] > 0.0);
            if (j >= 2) CHECK(psi[j] < psi[j - 1]);
        }
    }
}

TEST_CASE("simulate is deterministic and finite") {
    ArfimaSpec spec;
    spec.d = 0.12;
    spec.ar_coeffs = {{1, 0.2}};
    SimConfig cfg;
    cfg.length = 500;
    cfg.seed = 31415;

    const auto a = simulate(spec, cfg);
    const auto b = simulate(spec, cfg);
    REQUIRE(a.size() == 500);
    CHECK(a.values == b.values);
    for (double v : a.values) CHECK(std::isfinite(v));

    spec.noise = FracNoiseMethod::fbm_increments;
    const auto c = simulate(spec, cfg);
    const auto d2 = simulate(spec, cfg);
    CHECK(c.values == d2.values);
    CHECK(c.values != a.values);
}

TEST_CASE("white-noise case: lag-1 autocorrelation near zero") {
    const std::size_t T = 20000;
    const auto z = simulate_gaussian(T, 7);
    CHECK(std::abs(sample_acf1(z.values)) < 3.0 / std::sqrt(static_cast<double>(T)));
    CHECK(std::abs(sample_mean(z.values)) < 4.0 / std::sqrt(static_cast<double>(T)));
}

TEST_CASE("simulate_gaussian is reproducible") {
    const auto a = simulate_gaussian(64, 123);
    const auto b = simulate_gaussian(64, 123);
    const auto c = simulate_gaussian(64, 124);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
}

TEST_CASE("AR(1) theory oracle: sample lag-1 autocorrelation near the coefficient") {
    ArfimaSpec spec;
    spec.ar_coeffs = {{1, 0.20}};
    SimConfig cfg;
    cfg.length = 50000;
    cfg.seed = 99;
    const auto z = simulate(spec, cfg);
    // SE of r1 for AR(1) is roughly sqrt((1-rho^2)/T).
    const double se = std::sqrt((1 - 0.04) / static_cast<double>(cfg.length));
    CHECK(std::abs(sample_acf1(z.values) - 0.20) < 3.0 * se);
}

TEST_CASE("fbm_increments path matches the fGn lag-1 autocorrelation") {
    ArfimaSpec spec;
    spec.d = 0.12;
    spec.noise = FracNoiseMethod::fbm_increments;
    SimConfig cfg;
    cfg.length = 50000;
    cfg.seed = 55;
    const auto z = simulate(spec, cfg);
    const double expected = detail::fgn_autocov(0.62, 1);  // 2^{2H-1} - 1
    CHECK(expected == doctest::Approx(std::pow(2.0, 0.24) - 1.0));
    CHECK(std::abs(sample_acf1(z.values) - expected) < 0.02);
}

TEST_CASE("spec validation") {
    SimConfig cfg;
    cfg.length = 100;
    cfg.seed = 1;

    ArfimaSpec bad_d;
    bad_d.d = 0.5;
    CHECK_THROWS_AS(simulate(bad_d, cfg), ConfigError);

    ArfimaSpec bad_lag;
    bad_lag.ar_coeffs = {{11, 0.1}};
    CHECK_THROWS_AS(simulate(bad_lag, cfg), ConfigError);

    ArfimaSpec bad_coeff;
    bad_coeff.ar_coeffs = {{1, 1.0}};
    CHECK_THROWS_AS(simulate(bad_coeff, cfg), ConfigError);

    ArfimaSpec ok;
    SimConfig too_short;
    too_short.length = 8;
    too_short.seed = 1;
    CHECK_THROWS_AS(simulate(ok, too_short), ConfigError);
}
