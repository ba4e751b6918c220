#include "longmem/rra.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "longmem/errors.hpp"
#include "longmem/ols.hpp"

namespace longmem {

namespace {

constexpr int kMinScale = 4;

// Sum of R_m/S_m over the M subperiods starting at `offset`. `label_base`
// numbers the subperiods 1..M for the forward pass, M+1..2M backward.
double rescaled_range_pass(std::span<const double> z, int n, std::size_t offset,
                           std::size_t subperiods, std::size_t label_base) {
    double total = 0.0;
    const auto nn = static_cast<std::size_t>(n);
    for (std::size_t m = 0; m < subperiods; ++m) {
        const double* w = z.data() + offset + m * nn;
        double mean = 0.0;
        for (std::size_t t = 0; t < nn; ++t) mean += w[t];
        mean /= static_cast<double>(n);

        double ss = 0.0;
        for (std::size_t t = 0; t < nn; ++t) {
            const double d = w[t] - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        if (sd == 0.0)
            throw NumericError("zero-variance subperiod (n=" + std::to_string(n) +
                               ", subperiod " + std::to_string(label_base + m + 1) + ")");

        // Cumulative deviations; the terminal value is zero by construction
        // and participates in the max/min.
        double cum = 0.0, hi = 0.0, lo = 0.0;
        for (std::size_t t = 0; t + 1 < nn; ++t) {
            cum += w[t] - mean;
            hi = std::max(hi, cum);
            lo = std::min(lo, cum);
        }
        total += (hi - lo) / sd;
    }
    return total;
}

std::vector<double> log_scales(const std::vector<RsPoint>& points) {
    std::vector<double> lnn(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        lnn[i] = std::log(static_cast<double>(points[i].n));
    return lnn;
}

std::vector<double> log_rs(const std::vector<RsPoint>& points) {
    std::vector<double> v(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) v[i] = std::log(points[i].rs);
    return v;
}

}  // namespace

bool ScaleGrid::contains(int n) const {
    return std::binary_search(scales.begin(), scales.end(), n);
}

ScaleGrid make_scale_grid(std::vector<int> scales) {
    if (scales.empty()) throw ConfigError("scale grid must not be empty");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (scales[i] < kMinScale)
            throw ConfigError("scale grid entries must be >= 4");
        if (i > 0 && scales[i] <= scales[i - 1])
            throw ConfigError("scale grid must be strictly increasing");
    }
    return {std::move(scales)};
}

ScaleGrid build_scale_grid(double ln_min, double ln_max, double step) {
    if (!(ln_min < ln_max) || !(step > 0.0))
        throw ConfigError("scale grid requires ln_min < ln_max and step > 0");
    std::set<int> unique;
    const auto count = static_cast<long>(std::floor((ln_max - ln_min) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) {
        const double ln_n = ln_min + step * static_cast<double>(i);
        // Round half away from zero.
        const int n = static_cast<int>(std::floor(std::exp(ln_n) + 0.5));
        unique.insert(n);
    }
    return make_scale_grid({unique.begin(), unique.end()});
}

const ScaleGrid& default_scale_grid() {
    static const ScaleGrid grid = build_scale_grid();
    return grid;
}

const ScaleGrid& study_scale_grid() {
    static const ScaleGrid grid = build_scale_grid(1.6, 3.7, 0.1);
    return grid;
}

RsPoint rs_statistic(std::span<const double> z, int n) {
    const std::size_t N = z.size();
    if (n < kMinScale) throw ConfigError("rs_statistic requires n >= 4");
    const auto nn = static_cast<std::size_t>(n);
    if (N < nn) throw ConfigError("rs_statistic requires at least one full subperiod");

    const std::size_t M = N / nn;
    const std::size_t L = N - nn * M;  // unused head for the backward pass
    double total = rescaled_range_pass(z, n, 0, M, 0);
    total += rescaled_range_pass(z, n, L, M, M);

    RsPoint point;
    point.n = n;
    point.num_subperiods = static_cast<int>(2 * M);
    point.rs = total / static_cast<double>(2 * M);
    return point;
}

RsPoint rs_statistic(const ReturnSeries& z, int n) { return rs_statistic(z.values, n); }

std::vector<RsPoint> compute_rs_points(std::span<const double> z, const ScaleGrid& grid,
                                       std::vector<int>* dropped) {
    const std::size_t N = z.size();
    std::vector<RsPoint> points;
    points.reserve(grid.size());
    for (int n : grid.scales) {
        if (static_cast<std::size_t>(n) * 2 > N) {
            if (dropped) dropped->push_back(n);
            continue;
        }
        points.push_back(rs_statistic(z, n));
    }
    if (points.size() < 3)
        throw NumericError("fewer than 3 usable grid scales for a series of length " +
                           std::to_string(N));
    return points;
}

void fit_hurst(RraResult& result) {
    const auto lnn = log_scales(result.points);
    const auto lr = log_rs(result.points);
    const LineFit line = ols_line(lnn, lr);
    result.intercept = line.intercept;
    result.hurst = line.slope;
}

void fit_hurst_split(RraResult& result, int knot) {
    const double ln_knot = std::log(static_cast<double>(knot));
    std::size_t below = 0, above = 0;
    for (const auto& p : result.points) {
        if (p.n < knot) ++below;
        if (p.n > knot) ++above;
    }
    if (below < 3 || above < 3)
        throw ConfigError("split fit needs >= 3 grid points on each side of the knot");

    const auto lnn = log_scales(result.points);
    std::vector<std::vector<double>> cols(3, std::vector<double>(lnn.size()));
    for (std::size_t i = 0; i < lnn.size(); ++i) {
        cols[0][i] = 1.0;
        cols[1][i] = lnn[i];
        cols[2][i] = std::max(0.0, lnn[i] - ln_knot);
    }
    const OlsFit fit = ols(cols, log_rs(result.points));
    result.split_intercept = fit.coef[0];
    result.hurst_short = fit.coef[1];
    result.hurst_long = fit.coef[1] + fit.coef[2];
    result.knot = knot;
    result.has_split = true;
}

RraResult estimate_hurst(const ReturnSeries& z, const ScaleGrid& grid) {
    RraResult result;
    result.points = compute_rs_points(z.values, grid, &result.dropped_scales);
    fit_hurst(result);
    return result;
}

RraResult estimate_hurst_split(const ReturnSeries& z, const ScaleGrid& grid, int knot) {
    if (!grid.contains(knot))
        throw ConfigError("knot " + std::to_string(knot) + " is not a grid scale");
    RraResult result;
    result.points = compute_rs_points(z.values, grid, &result.dropped_scales);
    fit_hurst_split(result, knot);
    return result;
}

RraResult analyze_rra(const ReturnSeries& z, const ScaleGrid& grid, int knot) {
    if (!grid.contains(knot))
        throw ConfigError("knot " + std::to_string(knot) + " is not a grid scale");
    RraResult result;
    result.points = compute_rs_points(z.values, grid, &result.dropped_scales);
    fit_hurst(result);
    fit_hurst_split(result, knot);
    return result;
}

double variance_scaling_hurst(const ReturnSeries& z, const ScaleGrid& grid) {
    const std::size_t N = z.size();
    const int max_scale = grid.scales.back();
    if (N < 2 * static_cast<std::size_t>(max_scale))
        throw ConfigError("variance scaling requires len(z) >= 2 * max(grid)");

    std::vector<double> lnn, lnvar;
    lnn.reserve(grid.size());
    lnvar.reserve(grid.size());
    for (int n : grid.scales) {
        const auto nn = static_cast<std::size_t>(n);
        const std::size_t blocks = N / nn;
        double mean = 0.0;
        std::vector<double> sums(blocks);
        for (std::size_t b = 0; b < blocks; ++b) {
            double s = 0.0;
            for (std::size_t t = b * nn; t < (b + 1) * nn; ++t) s += z.values[t];
            sums[b] = s;
            mean += s;
        }
        mean /= static_cast<double>(blocks);
        double var = 0.0;
        for (double s : sums) var += (s - mean) * (s - mean);
        var /= static_cast<double>(blocks);
        if (var == 0.0)
            throw NumericError("zero variance at scale n=" + std::to_string(n));
        lnn.push_back(std::log(static_cast<double>(n)));
        lnvar.push_back(std::log(var));
    }
    return ols_line(lnn, lnvar).slope / 2.0;
}

}  // namespace longmem
