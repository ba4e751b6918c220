#include "longmem/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "longmem/errors.hpp"

namespace longmem {

namespace {

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_number(const std::string& text, const std::string& path, std::size_t line_no) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw InputError(path + ":" + std::to_string(line_no) + ": invalid number '" + text + "'");
    return v;
}

}  // namespace

LoadedSeries load_series_csv(const std::string& path) {
    std::ifstream file;
    if (path != "-") {
        file.open(path);
        if (!file) throw InputError("cannot open '" + path + "'");
    }
    std::istream& in = path == "-" ? std::cin : file;

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw InputError(path + ": empty file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_csv_line(lower(line));
    LoadedSeries loaded;
    bool prices_mode = false;
    if (header.size() == 1 && header[0] == "value") {
        prices_mode = false;
    } else if (header.size() == 2 && header[0] == "date" && header[1] == "price") {
        prices_mode = true;
    } else {
        throw InputError(path + ":1: header must be 'value' or 'date,price'");
    }

    std::vector<double> values;
    std::vector<Date> dates;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (prices_mode) {
            if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
                throw InputError(path + ":" + std::to_string(line_no) +
                                 ": expected 'date,price' row");
            try {
                dates.push_back(parse_iso_date(fields[0]));
            } catch (const InputError& e) {
                throw InputError(path + ":" + std::to_string(line_no) + ": " + e.what());
            }
            values.push_back(parse_number(fields[1], path, line_no));
        } else {
            if (fields.size() != 1 || fields[0].empty())
                throw InputError(path + ":" + std::to_string(line_no) + ": expected one value");
            values.push_back(parse_number(fields[0], path, line_no));
        }
    }

    loaded.is_prices = prices_mode;
    if (prices_mode) {
        loaded.prices = make_price_series(std::move(values), std::move(dates));
    } else {
        loaded.returns = make_return_series(std::move(values));
    }
    return loaded;
}

ReturnSeries load_returns_from_csv(const std::string& path) {
    LoadedSeries loaded = load_series_csv(path);
    if (loaded.is_prices) return log_returns(loaded.prices);
    return std::move(loaded.returns);
}

void write_returns_csv(std::ostream& out, const ReturnSeries& r) {
    std::ostringstream buf;
    buf.precision(17);
    if (r.has_dates()) {
        buf << "date,value\n";
        for (std::size_t i = 0; i < r.size(); ++i)
            buf << format_iso_date(r.dates[i]) << ',' << r.values[i] << '\n';
    } else {
        buf << "value\n";
        for (double v : r.values) buf << v << '\n';
    }
    out << buf.str();
}

void write_returns_csv(const std::string& path, const ReturnSeries& r) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    write_returns_csv(out, r);
}

}  // namespace longmem
