#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace longmem {

using Date = std::chrono::sys_days;

Date parse_iso_date(const std::string& text);
std::string format_iso_date(Date d);

/// Closing price levels, optionally dated. All prices strictly positive,
/// dates strictly increasing, length >= 2.
struct PriceSeries {
    std::vector<double> values;
    std::vector<Date> dates;  // empty, or same length as values

    bool has_dates() const { return !dates.empty(); }
    std::size_t size() const { return values.size(); }
};

/// Validating constructor for PriceSeries.
PriceSeries make_price_series(std::vector<double> values, std::vector<Date> dates = {});

enum class ScaleLabel { daily, weekly, monthly, quarterly, blocks };

std::string to_string(ScaleLabel label);

/// Log returns, optionally dated, tagged with the time scale they live on.
struct ReturnSeries {
    std::vector<double> values;
    std::vector<Date> dates;  // empty, or same length as values
    ScaleLabel scale = ScaleLabel::daily;
    int block_size = 1;  // meaningful when scale == blocks

    bool has_dates() const { return !dates.empty(); }
    std::size_t size() const { return values.size(); }
};

ReturnSeries make_return_series(std::vector<double> values, std::vector<Date> dates = {});

/// value_t = ln(p_{t+1} / p_t); output carries the later price's date.
ReturnSeries log_returns(const PriceSeries& prices);

struct DescriptiveStats {
    std::size_t n_obs = 0;
    double mean = 0.0;
    double std_dev = 0.0;  // sample, divisor N-1
    // Undefined (absent) when the second central moment is zero.
    std::optional<double> skewness;  // m3 / m2^1.5, population moments
    std::optional<double> kurtosis;  // m4 / m2^2, Normal = 3
};

DescriptiveStats describe(const ReturnSeries& r);

enum class AggregationMode { calendar_week, calendar_month, calendar_quarter, fixed_block };

/// Contiguous, non-overlapping index ranges covering a prefix of the series.
/// Calendar modes use windows anchored at the first return date (7 days, one
/// month, three months); fixed_block drops a trailing partial block.
struct AggregationPlan {
    AggregationMode mode;
    int block = 1;  // fixed_block size
    std::vector<std::pair<std::size_t, std::size_t>> ranges;  // [first, last)
};

AggregationPlan make_aggregation_plan(const ReturnSeries& r, AggregationMode mode, int block = 1);

/// Sums the log returns inside each block; output carries the block-end date.
ReturnSeries aggregate(const ReturnSeries& r, const AggregationPlan& plan);

/// Uniform random permutation of the values (Fisher-Yates, seeded); dates
/// keep their original positions so block structure survives re-aggregation.
ReturnSeries shuffle_surrogate(const ReturnSeries& r, std::uint64_t seed);

}  // namespace longmem
