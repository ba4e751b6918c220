#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "longmem/series.hpp"

namespace longmem {

/// How the fractional component (1-L)^{-d} eps is realised.
///
///  - ma_truncated: truncated MA(inf) with the binomial psi recursion,
///    truncation max(1000, T) and an equally long default burn-in.
///  - fbm_increments: exact stationary Gaussian noise with the fractional
///    Brownian motion increment autocovariance for H = d + 0.5, simulated by
///    the Hosking recursion (O(T^2), no truncation bias). This is the
///    generator that reproduces the reference Monte Carlo tables.
enum class FracNoiseMethod { ma_truncated, fbm_increments };

/// Sparse AR structure plus fractional integration order.
struct ArfimaSpec {
    std::map<int, double> ar_coeffs;  // lag (1..10) -> coefficient
    double d = 0.0;                   // |d| < 0.5
    double innovation_sd = 1.0;
    FracNoiseMethod noise = FracNoiseMethod::ma_truncated;
};

struct SimConfig {
    std::size_t length = 0;                // T >= 16
    std::optional<std::size_t> burn_in;    // default depends on noise method
    std::uint64_t seed = 0;
};

/// MA(inf) expansion coefficients of (1-L)^{-d}: psi_0 = 1,
/// psi_j = psi_{j-1} (j-1+d)/j. Rejects |d| >= 0.5.
std::vector<double> frac_coeffs(double d, std::size_t max_index);

/// x_t = sum_k phi_k x_{t-k} + u_t with u the fractional noise; burn-in
/// values are discarded; exactly cfg.length values are returned.
/// Deterministic in (spec, cfg).
ReturnSeries simulate(const ArfimaSpec& spec, const SimConfig& cfg);

/// i.i.d. standard Gaussian series (d = 0, no AR terms, unit sd).
ReturnSeries simulate_gaussian(std::size_t length, std::uint64_t seed);

namespace detail {

/// The raw psi recursion without the |d| < 0.5 gate (for boundary checks).
void psi_recursion(double d, std::span<double> psi);

/// Autocovariance of fBm increments at lag k for unit variance scale:
/// 0.5 ((k+1)^{2H} - 2 k^{2H} + |k-1|^{2H}).
double fgn_autocov(double hurst, std::size_t lag);

/// u_t = sum_j psi_j eps_{t-j} for t in [psi.size()-1, eps.size());
/// `parallel` splits the outer loop across threads, bit-identical results.
std::vector<double> ma_convolve(std::span<const double> eps, std::span<const double> psi,
                                bool parallel);

}  // namespace detail

}  // namespace longmem
