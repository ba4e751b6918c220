#include "longmem/ols.hpp"

#include <cmath>
#include <cstddef>

#include "longmem/errors.hpp"

namespace longmem {

OlsFit ols(const std::vector<std::vector<double>>& columns, std::span<const double> y) {
    const std::size_t p = columns.size();
    const std::size_t n = y.size();
    if (p == 0) throw ConfigError("ols: no regressors");
    for (const auto& c : columns) {
        if (c.size() != n) throw ConfigError("ols: column length mismatch");
    }
    if (n < p) throw NumericError("ols: fewer observations than regressors");

    // Normal equations: G = X'X, b = X'y.
    std::vector<double> g(p * p, 0.0), xty(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j < p; ++j) {
            double s = 0.0;
            const double* a = columns[i].data();
            const double* b = columns[j].data();
            for (std::size_t t = 0; t < n; ++t) s += a[t] * b[t];
            g[i * p + j] = s;
            g[j * p + i] = s;
        }
        double s = 0.0;
        const double* a = columns[i].data();
        for (std::size_t t = 0; t < n; ++t) s += a[t] * y[t];
        xty[i] = s;
    }

    // Cholesky G = L L'.
    std::vector<double> l(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = g[i * p + j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i * p + k] * l[j * p + k];
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s))
                    throw NumericError("ols: singular design matrix");
                l[i * p + i] = std::sqrt(s);
            } else {
                l[i * p + j] = s / l[j * p + j];
            }
        }
    }

    // Solve L z = X'y, then L' b = z.
    std::vector<double> b(p);
    for (std::size_t i = 0; i < p; ++i) {
        double s = xty[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i * p + k] * b[k];
        b[i] = s / l[i * p + i];
    }
    for (std::size_t ii = p; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < p; ++k) s -= l[k * p + ii] * b[k];
        b[ii] = s / l[ii * p + ii];
    }

    OlsFit fit;
    fit.coef = b;
    fit.residuals.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        double pred = 0.0;
        for (std::size_t i = 0; i < p; ++i) pred += b[i] * columns[i][t];
        fit.residuals[t] = y[t] - pred;
    }
    return fit;
}

LineFit ols_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("ols_line: need two equally sized samples");
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw NumericError("ols_line: no variation in regressor");
    const double slope = sxy / sxx;
    return {my - slope * mx, slope};
}

}  // namespace longmem
