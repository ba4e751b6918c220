#pragma once

#include <span>
#include <vector>

namespace longmem {

struct OlsFit {
    std::vector<double> coef;       // one per regressor column, in input order
    std::vector<double> residuals;  // y - X b
};

/// Ordinary least squares of y on the given regressor columns (no implicit
/// intercept; pass a ones column if one is wanted). Solves the normal
/// equations by Cholesky. Throws NumericError on a singular design.
OlsFit ols(const std::vector<std::vector<double>>& columns, std::span<const double> y);

/// Slope/intercept convenience for simple regression y = a + b x.
struct LineFit {
    double intercept;
    double slope;
};
LineFit ols_line(std::span<const double> x, std::span<const double> y);

}  // namespace longmem
