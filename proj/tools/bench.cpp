// Compares the serial reference paths against the OpenMP ones on two
// workloads: the Monte Carlo replication loop and the truncated-MA
// convolution. Verifies that both paths produce identical results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "longmem/arfima.hpp"
#include "longmem/mc.hpp"
#include "longmem/rng.hpp"

using namespace longmem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool identical(const mc::CriticalValues& a, const mc::CriticalValues& b) {
    if (a.mean != b.mean || a.sd != b.sd) return false;
    for (const auto& [p, v] : a.quantiles) {
        if (b.quantiles.at(p) != v) return false;
    }
    return true;
}

}  // namespace

int main() {
#ifdef _OPENMP
    const int hw = omp_get_max_threads();
#else
    const int hw = 1;
#endif
    std::printf("longmem benchmark (hardware threads: %d)\n\n", hw);

    // Monte Carlo null distribution: serial reference vs OpenMP.
    mc::McConfig cfg;
    cfg.replications = 400;
    cfg.series_length = 1000;
    cfg.master_seed = 42;
    cfg.grid = study_scale_grid();

    cfg.workers = 1;
    auto t0 = Clock::now();
    const mc::CriticalValues serial = mc::null_critical_values(cfg);
    const double t_serial = seconds_since(t0);

    cfg.workers = 0;
    t0 = Clock::now();
    const mc::CriticalValues parallel = mc::null_critical_values(cfg);
    const double t_parallel = seconds_since(t0);

    std::printf("null_critical_values  (T=1000, 400 reps)\n");
    std::printf("  serial reference : %8.3f s\n", t_serial);
    std::printf("  OpenMP           : %8.3f s   speedup %.2fx\n", t_parallel,
                t_serial / t_parallel);
    std::printf("  results identical: %s\n\n", identical(serial, parallel) ? "yes" : "NO");

    // Truncated-MA convolution: serial vs OpenMP inner kernel.
    const std::size_t T = 30000;
    GaussianSampler gauss(7);
    std::vector<double> eps(2 * T);
    for (auto& v : eps) v = gauss.next();
    const std::vector<double> psi = frac_coeffs(0.2, T - 1);

    t0 = Clock::now();
    const auto u_serial = detail::ma_convolve(eps, psi, false);
    const double c_serial = seconds_since(t0);
    t0 = Clock::now();
    const auto u_parallel = detail::ma_convolve(eps, psi, true);
    const double c_parallel = seconds_since(t0);

    bool same = u_serial.size() == u_parallel.size();
    for (std::size_t i = 0; same && i < u_serial.size(); ++i)
        same = u_serial[i] == u_parallel[i];

    std::printf("ma_convolve           (window %zu, %zu outputs)\n", psi.size(),
                u_serial.size());
    std::printf("  serial reference : %8.3f s\n", c_serial);
    std::printf("  OpenMP           : %8.3f s   speedup %.2fx\n", c_parallel,
                c_serial / c_parallel);
    std::printf("  results identical: %s\n", same ? "yes" : "NO");

    return (identical(serial, parallel) && same) ? 0 : 1;
}
