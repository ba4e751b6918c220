#pragma once

#include <map>
#include <vector>

#include "longmem/series.hpp"

namespace longmem {

/// Sample ACF/PACF up to max_lag with the +-1.96/sqrt(N) significance band.
struct CorrelogramResult {
    std::vector<double> acf;   // lags 0..max_lag, acf[0] == 1
    std::vector<double> pacf;  // lags 1..max_lag (pacf[0] unused, kept 0)
    std::size_t n_obs = 0;
    double threshold = 0.0;    // 1.96 / sqrt(N)
};

/// ACF denominator is the total sum of squared deviations; PACF via the
/// Durbin-Levinson recursion on the sample ACF.
CorrelogramResult correlogram(const ReturnSeries& z, int max_lag = 10);

/// Lags k in 1..max_lag with |pacf_k| strictly above the significance band.
std::vector<int> select_lags(const CorrelogramResult& c);

/// OLS fit of z_t on an intercept and the selected lags only.
struct SparseArFit {
    std::vector<int> selected_lags;
    std::map<int, double> coefficients;
    double intercept = 0.0;
    ReturnSeries residuals;  // length N - max(selected_lags); = z when no lags
};

SparseArFit fit_sparse_ar(const ReturnSeries& z, const std::vector<int>& lags);

/// correlogram -> select_lags -> fit_sparse_ar.
SparseArFit prefilter(const ReturnSeries& z);

}  // namespace longmem
