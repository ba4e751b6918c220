#include "longmem/arfima.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "longmem/errors.hpp"
#include "longmem/rng.hpp"

namespace longmem {

namespace {

constexpr std::size_t kMinLength = 16;
constexpr int kMaxArLag = 10;

void validate(const ArfimaSpec& spec, const SimConfig& cfg) {
    if (!(std::abs(spec.d) < 0.5))
        throw ConfigError("fractional order must satisfy |d| < 0.5, got d=" +
                          std::to_string(spec.d));
    if (!(spec.innovation_sd > 0.0)) throw ConfigError("innovation_sd must be positive");
    double abs_sum = 0.0;
    for (const auto& [lag, coeff] : spec.ar_coeffs) {
        if (lag < 1 || lag > kMaxArLag)
            throw ConfigError("AR lag out of range 1..10: " + std::to_string(lag));
        abs_sum += std::abs(coeff);
    }
    // Sufficient stationarity condition; covers every single-lag case |c|<1.
    if (spec.ar_coeffs.size() == 1) {
        if (!(std::abs(spec.ar_coeffs.begin()->second) < 1.0))
            throw ConfigError("single-lag AR coefficient must satisfy |c| < 1");
    } else if (!spec.ar_coeffs.empty() && !(abs_sum < 1.0)) {
        throw ConfigError("AR coefficients fail the stationarity check (sum |c| >= 1)");
    }
    if (cfg.length < kMinLength)
        throw ConfigError("simulation length must be >= " + std::to_string(kMinLength));
}

void apply_ar(const std::map<int, double>& ar, std::vector<double>& x) {
    if (ar.empty()) return;
    const std::size_t n = x.size();
    for (std::size_t t = 0; t < n; ++t) {
        double v = x[t];
        for (const auto& [lag, coeff] : ar) {
            const auto l = static_cast<std::size_t>(lag);
            if (t >= l) v += coeff * x[t - l];
        }
        x[t] = v;
    }
}

// Hosking's recursive simulation of a stationary Gaussian process from its
// autocovariance sequence. O(n^2) time, O(n) memory.
std::vector<double> hosking_simulate(double hurst, double sd, std::size_t n,
                                     GaussianSampler& gauss) {
    std::vector<double> acv(n);
    for (std::size_t k = 0; k < n; ++k) acv[k] = detail::fgn_autocov(hurst, k) * sd * sd;

    std::vector<double> x(n), phi(n, 0.0), phi_prev(n, 0.0);
    double v = acv[0];
    x[0] = std::sqrt(v) * gauss.next();
    for (std::size_t t = 1; t < n; ++t) {
        double num = acv[t];
        for (std::size_t j = 1; j < t; ++j) num -= phi_prev[j] * acv[t - j];
        const double refl = num / v;
        phi[t] = refl;
        for (std::size_t j = 1; j < t; ++j)
            phi[j] = phi_prev[j] - refl * phi_prev[t - j];
        v *= (1.0 - refl * refl);
        if (!(v > 0.0)) throw NumericError("fbm increment covariance lost positivity");
        double mean = 0.0;
        for (std::size_t j = 1; j <= t; ++j) mean += phi[j] * x[t - j];
        x[t] = mean + std::sqrt(v) * gauss.next();
        std::copy(phi.begin() + 1, phi.begin() + static_cast<long>(t) + 1,
                  phi_prev.begin() + 1);
    }
    return x;
}

}  // namespace

std::vector<double> frac_coeffs(double d, std::size_t max_index) {
    if (!(std::abs(d) < 0.5))
        throw ConfigError("frac_coeffs requires |d| < 0.5 (stationary regime)");
    if (max_index < 1) throw ConfigError("frac_coeffs requires max_index >= 1");
    std::vector<double> psi(max_index + 1);
    detail::psi_recursion(d, psi);
    return psi;
}

ReturnSeries simulate(const ArfimaSpec& spec, const SimConfig& cfg) {
    validate(spec, cfg);
    const std::size_t T = cfg.length;
    GaussianSampler gauss(cfg.seed);

    std::vector<double> u;
    std::size_t burn = 0;
    if (spec.d == 0.0) {
        burn = cfg.burn_in.value_or(spec.ar_coeffs.empty() ? 0 : 200);
        u.resize(burn + T);
        for (auto& v : u) v = spec.innovation_sd * gauss.next();
    } else if (spec.noise == FracNoiseMethod::ma_truncated) {
        const std::size_t trunc = std::max<std::size_t>(1000, T);
        burn = cfg.burn_in.value_or(trunc);
        std::vector<double> eps(trunc + burn + T);
        for (auto& v : eps) v = spec.innovation_sd * gauss.next();
        const std::vector<double> psi = frac_coeffs(spec.d, trunc);
        u = detail::ma_convolve(eps, psi, /*parallel=*/false);
    } else {
        burn = cfg.burn_in.value_or(200);
        u = hosking_simulate(spec.d + 0.5, spec.innovation_sd, burn + T, gauss);
    }

    apply_ar(spec.ar_coeffs, u);

    ReturnSeries out;
    out.values.assign(u.begin() + static_cast<long>(burn), u.end());
    for (double v : out.values) {
        if (!std::isfinite(v)) throw NumericError("simulation produced a non-finite value");
    }
    return out;
}

ReturnSeries simulate_gaussian(std::size_t length, std::uint64_t seed) {
    ArfimaSpec spec;
    SimConfig cfg;
    cfg.length = length;
    cfg.burn_in = 0;
    cfg.seed = seed;
    return simulate(spec, cfg);
}

namespace detail {

void psi_recursion(double d, std::span<double> psi) {
    if (psi.empty()) return;
    psi[0] = 1.0;
    for (std::size_t j = 1; j < psi.size(); ++j)
        psi[j] = psi[j - 1] * (static_cast<double>(j) - 1.0 + d) / static_cast<double>(j);
}

double fgn_autocov(double hurst, std::size_t lag) {
    if (lag == 0) return 1.0;
    const double k = static_cast<double>(lag);
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(k - 1.0, h2));
}

std::vector<double> ma_convolve(std::span<const double> eps, std::span<const double> psi,
                                bool parallel) {
    const std::size_t m = psi.size();           // window length (psi_0..psi_{m-1})
    if (eps.size() < m) throw ConfigError("ma_convolve: innovation stream shorter than window");
    const std::size_t n = eps.size() - m + 1;   // outputs with a full history
    std::vector<double> u(n);
    const double* e = eps.data();
    const double* p = psi.data();
#pragma omp parallel for schedule(static) if (parallel)
    for (long long t = 0; t < static_cast<long long>(n); ++t) {
        double s = 0.0;
        const double* base = e + t;
        for (std::size_t j = 0; j < m; ++j) s += p[j] * base[m - 1 - j];
        u[static_cast<std::size_t>(t)] = s;
    }
    return u;
}

}  // namespace detail

}  // namespace longmem
