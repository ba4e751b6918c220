#pragma once

#include <span>
#include <vector>

#include "longmem/series.hpp"

namespace longmem {

/// Ordered set of subperiod lengths n over which (R/S)_n is evaluated.
struct ScaleGrid {
    std::vector<int> scales;  // strictly increasing, min >= 4

    std::size_t size() const { return scales.size(); }
    bool contains(int n) const;
};

ScaleGrid make_scale_grid(std::vector<int> scales);

/// Grid from an equally spaced ln(n) lattice: n = round(e^ln), rounding half
/// away from zero, duplicates collapsed. The defaults give exactly 40 scales
/// from 5 to 299.
ScaleGrid build_scale_grid(double ln_min = 1.6, double ln_max = 5.7, double step = 0.1);

/// Default analysis grid (ln 1.6..5.7 step 0.1 -> scales 5..299).
const ScaleGrid& default_scale_grid();

/// Short-scale grid used by the simulation studies (ln 1.6..3.7 -> 5..40).
const ScaleGrid& study_scale_grid();

struct RsPoint {
    int n = 0;
    double rs = 0.0;            // (R/S)_n > 0
    int num_subperiods = 0;     // 2M
};

/// Mean rescaled range over the 2M forward/backward subperiods of length n.
/// A subperiod with zero standard deviation is a hard error.
RsPoint rs_statistic(std::span<const double> z, int n);
RsPoint rs_statistic(const ReturnSeries& z, int n);

struct RraResult {
    double hurst = 0.0;            // slope of ln(R/S) on ln(n)
    double intercept = 0.0;        // ln(c)
    double hurst_short = 0.0;      // spline slope below the knot
    double hurst_long = 0.0;       // spline slope above the knot
    double split_intercept = 0.0;  // spline intercept (short segment)
    bool has_split = false;
    int knot = 40;
    std::vector<RsPoint> points;
    std::vector<int> dropped_scales;  // grid entries > N/2, skipped with a warning
};

/// R/S points for every usable grid scale (n <= N/2; larger scales are
/// reported in dropped_scales). Fewer than 3 usable scales is an error.
std::vector<RsPoint> compute_rs_points(std::span<const double> z, const ScaleGrid& grid,
                                       std::vector<int>* dropped = nullptr);

/// OLS of ln(R/S)_n on ln(n): slope is the Hurst exponent.
RraResult estimate_hurst(const ReturnSeries& z, const ScaleGrid& grid);

/// Continuous piecewise-linear fit in ln(n) with one knot: basis
/// {1, ln n, max(0, ln n - ln knot)}. hurst_short is the slope below the
/// knot, hurst_long the slope above it.
RraResult estimate_hurst_split(const ReturnSeries& z, const ScaleGrid& grid, int knot = 40);

/// Both fits from one set of R/S points.
RraResult analyze_rra(const ReturnSeries& z, const ScaleGrid& grid, int knot = 40);

/// Fit helpers operating on precomputed points (shared by the Monte Carlo
/// harness so each replicate evaluates its subperiods once).
void fit_hurst(RraResult& result);
void fit_hurst_split(RraResult& result, int knot);

/// Variance-scaling estimator: aggregate into non-overlapping n-blocks,
/// regress ln of the block variance on ln n; H = slope / 2.
double variance_scaling_hurst(const ReturnSeries& z, const ScaleGrid& grid);

}  // namespace longmem
