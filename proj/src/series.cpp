#include "longmem/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "longmem/errors.hpp"
#include "longmem/rng.hpp"

namespace longmem {

namespace {

using std::chrono::day;
using std::chrono::days;
using std::chrono::month;
using std::chrono::months;
using std::chrono::year;
using std::chrono::year_month_day;

void check_dates(const std::vector<double>& values, const std::vector<Date>& dates) {
    if (dates.empty()) return;
    if (dates.size() != values.size())
        throw InputError("dates and values must have the same length");
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (dates[i] <= dates[i - 1])
            throw InputError("dates must be strictly increasing (violated at row " +
                             std::to_string(i + 1) + ")");
    }
}

Date add_months_clamped(Date base, int n) {
    const year_month_day ymd{base};
    auto ym = ymd.year() / ymd.month() + months{n};
    year_month_day shifted = ym / ymd.day();
    if (!shifted.ok()) shifted = ym / std::chrono::last;
    return Date{shifted};
}

}  // namespace

Date parse_iso_date(const std::string& text) {
    int y = 0, m = 0, d = 0;
    char tail = '\0';
    if (std::sscanf(text.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail) != 3)
        throw InputError("invalid ISO-8601 date: '" + text + "'");
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw InputError("invalid calendar date: '" + text + "'");
    return Date{ymd};
}

std::string format_iso_date(Date d) {
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string to_string(ScaleLabel label) {
    switch (label) {
        case ScaleLabel::daily: return "daily";
        case ScaleLabel::weekly: return "weekly";
        case ScaleLabel::monthly: return "monthly";
        case ScaleLabel::quarterly: return "quarterly";
        case ScaleLabel::blocks: return "blocks";
    }
    return "?";
}

PriceSeries make_price_series(std::vector<double> values, std::vector<Date> dates) {
    if (values.size() < 2) throw InputError("price series needs at least 2 observations");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
            throw InputError("non-positive price at row " + std::to_string(i + 1));
    }
    check_dates(values, dates);
    return {std::move(values), std::move(dates)};
}

ReturnSeries make_return_series(std::vector<double> values, std::vector<Date> dates) {
    if (values.empty()) throw InputError("return series must not be empty");
    for (double v : values) {
        if (!std::isfinite(v)) throw InputError("non-finite return value");
    }
    check_dates(values, dates);
    ReturnSeries r;
    r.values = std::move(values);
    r.dates = std::move(dates);
    return r;
}

ReturnSeries log_returns(const PriceSeries& prices) {
    if (prices.size() < 2) throw InputError("price series needs at least 2 observations");
    ReturnSeries r;
    r.values.resize(prices.size() - 1);
    for (std::size_t t = 0; t + 1 < prices.size(); ++t)
        r.values[t] = std::log(prices.values[t + 1] / prices.values[t]);
    if (prices.has_dates())
        r.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    return r;
}

DescriptiveStats describe(const ReturnSeries& r) {
    const std::size_t n = r.size();
    if (n < 2) throw InputError("describe: need at least 2 observations");
    double mean = 0.0;
    for (double v : r.values) mean += v;
    mean /= static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : r.values) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    DescriptiveStats s;
    s.n_obs = n;
    s.mean = mean;
    s.std_dev = std::sqrt(m2 / static_cast<double>(n - 1));
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2);
    }
    return s;
}

AggregationPlan make_aggregation_plan(const ReturnSeries& r, AggregationMode mode, int block) {
    AggregationPlan plan;
    plan.mode = mode;
    plan.block = block;

    if (mode == AggregationMode::fixed_block) {
        if (block < 1) throw ConfigError("fixed_block size must be >= 1");
        const std::size_t k = static_cast<std::size_t>(block);
        const std::size_t full = r.size() / k;
        plan.ranges.reserve(full);
        for (std::size_t b = 0; b < full; ++b)
            plan.ranges.emplace_back(b * k, (b + 1) * k);
        return plan;
    }

    if (!r.has_dates())
        throw InputError("calendar aggregation requires dated returns");

    const Date anchor = r.dates.front();
    auto window_index = [&](Date d) -> long {
        switch (mode) {
            case AggregationMode::calendar_week:
                return (d - anchor).count() / 7;
            case AggregationMode::calendar_month:
            case AggregationMode::calendar_quarter: {
                const int step = mode == AggregationMode::calendar_month ? 1 : 3;
                // Largest k with anchor + k*step months <= d.
                long k = ((d - anchor).count() / 31) / step;  // lower bound
                while (add_months_clamped(anchor, static_cast<int>((k + 1) * step)) <= d) ++k;
                return k;
            }
            default: return 0;
        }
    };

    std::size_t start = 0;
    long current = window_index(r.dates[0]);
    for (std::size_t i = 1; i < r.size(); ++i) {
        const long w = window_index(r.dates[i]);
        if (w != current) {
            plan.ranges.emplace_back(start, i);
            start = i;
            current = w;
        }
    }
    plan.ranges.emplace_back(start, r.size());
    return plan;
}

ReturnSeries aggregate(const ReturnSeries& r, const AggregationPlan& plan) {
    ReturnSeries out;
    out.values.reserve(plan.ranges.size());
    const bool dated = r.has_dates();
    if (dated) out.dates.reserve(plan.ranges.size());
    for (const auto& [first, last] : plan.ranges) {
        if (last > r.size() || first >= last)
            throw ConfigError("aggregation plan does not match the series");
        double sum = 0.0;
        for (std::size_t i = first; i < last; ++i) sum += r.values[i];
        out.values.push_back(sum);
        if (dated) out.dates.push_back(r.dates[last - 1]);
    }
    switch (plan.mode) {
        case AggregationMode::calendar_week: out.scale = ScaleLabel::weekly; break;
        case AggregationMode::calendar_month: out.scale = ScaleLabel::monthly; break;
        case AggregationMode::calendar_quarter: out.scale = ScaleLabel::quarterly; break;
        case AggregationMode::fixed_block:
            out.scale = ScaleLabel::blocks;
            out.block_size = plan.block;
            break;
    }
    return out;
}

ReturnSeries shuffle_surrogate(const ReturnSeries& r, std::uint64_t seed) {
    ReturnSeries out = r;
    Xoshiro256StarStar rng(seed);
    for (std::size_t i = out.values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(out.values[i - 1], out.values[j]);
    }
    return out;
}

}  // namespace longmem
