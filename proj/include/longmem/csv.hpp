#pragma once

#include <iosfwd>
#include <string>

#include "longmem/series.hpp"

namespace longmem {

/// A parsed input file: either raw returns (`value` header) or dated prices
/// (`date,price` header).
struct LoadedSeries {
    bool is_prices = false;
    PriceSeries prices;    // valid when is_prices
    ReturnSeries returns;  // valid when !is_prices
};

/// Reads a CSV with a mandatory header row of either `value` or `date,price`.
/// Rows with missing fields are rejected with their line number. A path of
/// "-" reads standard input.
LoadedSeries load_series_csv(const std::string& path);

/// Returns from either file kind: prices are converted via log_returns.
ReturnSeries load_returns_from_csv(const std::string& path);

/// One value per line under a `value` header; `date,value` when dated.
void write_returns_csv(std::ostream& out, const ReturnSeries& r);
void write_returns_csv(const std::string& path, const ReturnSeries& r);

}  // namespace longmem
