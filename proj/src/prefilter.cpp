#include "longmem/prefilter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "longmem/errors.hpp"
#include "longmem/ols.hpp"

namespace longmem {

CorrelogramResult correlogram(const ReturnSeries& z, int max_lag) {
    if (max_lag < 1) throw ConfigError("correlogram requires max_lag >= 1");
    const std::size_t N = z.size();
    if (N <= static_cast<std::size_t>(max_lag))
        throw ConfigError("correlogram requires N > max_lag");

    double mean = 0.0;
    for (double v : z.values) mean += v;
    mean /= static_cast<double>(N);

    double denom = 0.0;
    for (double v : z.values) denom += (v - mean) * (v - mean);
    if (denom == 0.0) throw NumericError("correlogram: zero-variance input");

    CorrelogramResult c;
    c.n_obs = N;
    c.threshold = 1.96 / std::sqrt(static_cast<double>(N));
    c.acf.resize(static_cast<std::size_t>(max_lag) + 1);
    c.acf[0] = 1.0;
    for (int k = 1; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t t = 0; t + static_cast<std::size_t>(k) < N; ++t)
            s += (z.values[t] - mean) * (z.values[t + static_cast<std::size_t>(k)] - mean);
        c.acf[static_cast<std::size_t>(k)] = s / denom;
    }

    // Durbin-Levinson on the sample ACF.
    c.pacf.assign(static_cast<std::size_t>(max_lag) + 1, 0.0);
    std::vector<double> phi(static_cast<std::size_t>(max_lag) + 1, 0.0);
    std::vector<double> prev(static_cast<std::size_t>(max_lag) + 1, 0.0);
    double v = 1.0;
    for (int k = 1; k <= max_lag; ++k) {
        double num = c.acf[static_cast<std::size_t>(k)];
        for (int j = 1; j < k; ++j)
            num -= prev[static_cast<std::size_t>(j)] * c.acf[static_cast<std::size_t>(k - j)];
        const double refl = num / v;
        phi[static_cast<std::size_t>(k)] = refl;
        for (int j = 1; j < k; ++j)
            phi[static_cast<std::size_t>(j)] = prev[static_cast<std::size_t>(j)] -
                                               refl * prev[static_cast<std::size_t>(k - j)];
        v *= (1.0 - refl * refl);
        c.pacf[static_cast<std::size_t>(k)] = refl;
        prev = phi;
    }
    return c;
}

std::vector<int> select_lags(const CorrelogramResult& c) {
    std::vector<int> lags;
    for (std::size_t k = 1; k < c.pacf.size(); ++k) {
        if (std::abs(c.pacf[k]) > c.threshold) lags.push_back(static_cast<int>(k));
    }
    return lags;
}

SparseArFit fit_sparse_ar(const ReturnSeries& z, const std::vector<int>& lags) {
    SparseArFit fit;
    fit.selected_lags = lags;
    if (lags.empty()) {
        fit.residuals = z;
        return fit;
    }
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (lags[i] < 1 || lags[i] > 10)
            throw ConfigError("AR lags must lie in 1..10");
        if (i > 0 && lags[i] <= lags[i - 1])
            throw ConfigError("AR lags must be strictly increasing");
    }
    const std::size_t N = z.size();
    if (N <= 12 + lags.size())
        throw ConfigError("series too short for the sparse AR fit");

    const auto max_lag = static_cast<std::size_t>(lags.back());
    const std::size_t rows = N - max_lag;
    std::vector<std::vector<double>> cols;
    cols.emplace_back(rows, 1.0);
    for (int lag : lags) {
        std::vector<double> col(rows);
        for (std::size_t t = 0; t < rows; ++t)
            col[t] = z.values[t + max_lag - static_cast<std::size_t>(lag)];
        cols.push_back(std::move(col));
    }
    std::vector<double> y(z.values.begin() + static_cast<long>(max_lag), z.values.end());

    OlsFit ols_fit = ols(cols, y);
    fit.intercept = ols_fit.coef[0];
    for (std::size_t i = 0; i < lags.size(); ++i)
        fit.coefficients[lags[i]] = ols_fit.coef[i + 1];

    fit.residuals.values = std::move(ols_fit.residuals);
    if (z.has_dates())
        fit.residuals.dates.assign(z.dates.begin() + static_cast<long>(max_lag),
                                   z.dates.end());
    fit.residuals.scale = z.scale;
    return fit;
}

SparseArFit prefilter(const ReturnSeries& z) {
    return fit_sparse_ar(z, select_lags(correlogram(z)));
}

}  // namespace longmem
