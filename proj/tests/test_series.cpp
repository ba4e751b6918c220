#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <set>

#include "longmem/errors.hpp"
#include "longmem/rng.hpp"
#include "longmem/series.hpp"

using namespace longmem;

namespace {

// Weekday trading calendar covering the reference sample period: prices on
// every Mon-Fri from 1995-08-31 through 2005-08-30 give 2608 daily returns.
std::vector<Date> weekday_calendar(Date first, Date last) {
    std::vector<Date> dates;
    for (Date d = first; d <= last; d += std::chrono::days{1}) {
        const std::chrono::weekday wd{d};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) dates.push_back(d);
    }
    return dates;
}

ReturnSeries gaussian_returns(std::size_t n, std::uint64_t seed) {
    GaussianSampler gauss(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = gauss.next();
    return make_return_series(std::move(v));
}

}  // namespace

TEST_CASE("log_returns basics") {
    auto r = log_returns(make_price_series({100.0, 100.0}));
    REQUIRE(r.size() == 1);
    CHECK(r.values[0] == doctest::Approx(0.0));

    const double e = std::exp(1.0);
    r = log_returns(make_price_series({1.0, e, e * e}));
    REQUIRE(r.size() == 2);
    CHECK(r.values[0] == doctest::Approx(1.0));
    CHECK(r.values[1] == doctest::Approx(1.0));

    r = log_returns(make_price_series({100.0, 105.0, 99.0}));
    CHECK(r.values[0] == doctest::Approx(std::log(1.05)));
    CHECK(r.values[1] == doctest::Approx(std::log(99.0 / 105.0)));
}

TEST_CASE("log_returns carries the later price's date") {
    const Date d0 = parse_iso_date("2020-01-01");
    const Date d1 = parse_iso_date("2020-01-02");
    const Date d2 = parse_iso_date("2020-01-03");
    const auto r = log_returns(make_price_series({1.0, 2.0, 3.0}, {d0, d1, d2}));
    REQUIRE(r.dates.size() == 2);
    CHECK(r.dates[0] == d1);
    CHECK(r.dates[1] == d2);
}

TEST_CASE("non-positive price is rejected with its row") {
    CHECK_THROWS_WITH_AS(make_price_series({100.0, -1.0, 50.0}),
                         doctest::Contains("row 2"), InputError);
    CHECK_THROWS_AS(make_price_series({100.0, 0.0}), InputError);
}

TEST_CASE("price round-trip up to a scale factor") {
    Xoshiro256StarStar rng(99);
    std::vector<double> prices(50);
    double level = 100.0;
    for (auto& p : prices) {
        level *= std::exp(0.02 * (rng.uniform01() - 0.5));
        p = level;
    }
    const auto r = log_returns(make_price_series(prices));
    // Reconstruct from an arbitrary positive base.
    double base = 7.0;
    for (std::size_t t = 0; t < r.size(); ++t) {
        base *= std::exp(r.values[t]);
        CHECK(base / prices[t + 1] == doctest::Approx(7.0 / prices[0]).epsilon(1e-12));
    }
}

TEST_CASE("fixed-block aggregation") {
    std::vector<double> v(10);
    std::iota(v.begin(), v.end(), 1.0);
    auto r = make_return_series(v);

    auto agg = aggregate(r, make_aggregation_plan(r, AggregationMode::fixed_block, 5));
    REQUIRE(agg.size() == 2);
    CHECK(agg.values[0] == doctest::Approx(1 + 2 + 3 + 4 + 5));
    CHECK(agg.values[1] == doctest::Approx(6 + 7 + 8 + 9 + 10));

    v.push_back(11.0);  // trailing partial block is dropped
    r = make_return_series(v);
    agg = aggregate(r, make_aggregation_plan(r, AggregationMode::fixed_block, 5));
    REQUIRE(agg.size() == 2);
    CHECK(agg.values[1] == doctest::Approx(40.0));

    // fixed_block(1) is the identity.
    agg = aggregate(r, make_aggregation_plan(r, AggregationMode::fixed_block, 1));
    REQUIRE(agg.size() == r.size());
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(agg.values[i] == r.values[i]);
}

TEST_CASE("calendar aggregation reproduces the reference sample counts") {
    const auto dates = weekday_calendar(parse_iso_date("1995-08-31"),
                                        parse_iso_date("2005-08-30"));
    REQUIRE(dates.size() == 2609);
    std::vector<double> prices(dates.size(), 0.0);
    double level = 100.0;
    Xoshiro256StarStar rng(1);
    for (auto& p : prices) {
        level *= std::exp(0.01 * (rng.uniform01() - 0.5));
        p = level;
    }
    const auto returns = log_returns(make_price_series(prices, dates));
    REQUIRE(returns.size() == 2608);

    const auto weekly = aggregate(returns, make_aggregation_plan(returns, AggregationMode::calendar_week));
    const auto monthly = aggregate(returns, make_aggregation_plan(returns, AggregationMode::calendar_month));
    const auto quarterly = aggregate(returns, make_aggregation_plan(returns, AggregationMode::calendar_quarter));
    CHECK(weekly.size() == 522);
    CHECK(monthly.size() == 120);
    CHECK(quarterly.size() == 40);

    // Conservation of total log return under every aggregation.
    const double total = std::accumulate(returns.values.begin(), returns.values.end(), 0.0);
    for (const auto* agg : {&weekly, &monthly, &quarterly}) {
        const double sum = std::accumulate(agg->values.begin(), agg->values.end(), 0.0);
        CHECK(sum == doctest::Approx(total).epsilon(1e-9));
    }

    CHECK(weekly.scale == ScaleLabel::weekly);
    CHECK(monthly.dates.size() == monthly.size());
}

TEST_CASE("calendar aggregation requires dates") {
    const auto r = gaussian_returns(100, 5);
    CHECK_THROWS_AS(make_aggregation_plan(r, AggregationMode::calendar_month), InputError);
}

TEST_CASE("describe moments") {
    const auto s = describe(make_return_series({-1.0, 1.0, -1.0, 1.0}));
    CHECK(s.mean == doctest::Approx(0.0));
    REQUIRE(s.skewness.has_value());
    CHECK(*s.skewness == doctest::Approx(0.0));
    CHECK(*s.kurtosis == doctest::Approx(1.0));

    const auto c = describe(make_return_series({3.14, 3.14, 3.14, 3.14}));
    CHECK(c.mean == doctest::Approx(3.14));
    CHECK(c.std_dev == 0.0);
    CHECK_FALSE(c.skewness.has_value());
    CHECK_FALSE(c.kurtosis.has_value());
}

TEST_CASE("describe: large Gaussian sample has kurtosis near 3") {
    const auto r = gaussian_returns(100000, 2024);
    const auto s = describe(r);
    REQUIRE(s.kurtosis.has_value());
    CHECK(std::abs(*s.kurtosis - 3.0) < 0.2);
    CHECK(std::abs(*s.skewness) < 0.1);
    CHECK(s.std_dev == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("shuffle surrogate invariants") {
    const auto r = gaussian_returns(500, 77);
    const auto s1 = shuffle_surrogate(r, 42);
    const auto s2 = shuffle_surrogate(r, 42);
    const auto s3 = shuffle_surrogate(r, 43);

    CHECK(s1.values == s2.values);  // determinism
    CHECK(s1.values != s3.values);
    CHECK(s1.values != r.values);

    auto sorted_r = r.values, sorted_s = s1.values;
    std::sort(sorted_r.begin(), sorted_r.end());
    std::sort(sorted_s.begin(), sorted_s.end());
    CHECK(sorted_r == sorted_s);  // multiset preserved

    // Daily-scale moments are permutation invariant.
    const auto d0 = describe(r);
    const auto d1 = describe(s1);
    CHECK(d0.mean == doctest::Approx(d1.mean).epsilon(1e-12));
    CHECK(d0.std_dev == doctest::Approx(d1.std_dev).epsilon(1e-12));
    CHECK(*d0.kurtosis == doctest::Approx(*d1.kurtosis).epsilon(1e-12));
}

TEST_CASE("shuffle keeps dates in place so block structure survives") {
    const auto dates = weekday_calendar(parse_iso_date("2001-01-01"),
                                        parse_iso_date("2001-06-29"));
    std::vector<double> v(dates.size());
    Xoshiro256StarStar rng(3);
    for (auto& x : v) x = rng.uniform01() - 0.5;
    const auto r = make_return_series(v, dates);
    const auto s = shuffle_surrogate(r, 7);
    CHECK(s.dates == r.dates);

    const auto plan = make_aggregation_plan(r, AggregationMode::calendar_month);
    const auto plan_s = make_aggregation_plan(s, AggregationMode::calendar_month);
    CHECK(plan.ranges == plan_s.ranges);

    // Aggregated moments generally change under a shuffle.
    const auto agg_r = aggregate(r, plan);
    const auto agg_s = aggregate(s, plan);
    CHECK(agg_r.size() == agg_s.size());
}
