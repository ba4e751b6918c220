#include "longmem/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "longmem/errors.hpp"
#include "longmem/prefilter.hpp"
#include "longmem/rng.hpp"

namespace longmem::mc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate(const McConfig& cfg) {
    if (cfg.replications < 100) throw ConfigError("replications must be >= 100");
    if (cfg.series_length < 64) throw ConfigError("series_length must be >= 64");
}

ReturnSeries apply_prefilter(const ReturnSeries& z, const PrefilterMode& mode) {
    switch (mode.kind) {
        case PrefilterMode::Kind::none: return z;
        case PrefilterMode::Kind::ar1: return fit_sparse_ar(z, {1}).residuals;
        case PrefilterMode::Kind::pacf_sparse: return prefilter(z).residuals;
        case PrefilterMode::Kind::fixed_lags: return fit_sparse_ar(z, mode.lags).residuals;
    }
    return z;
}

// Seed-space tags keeping the null, study and power streams disjoint.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t tag) {
    return derive_seed(master, 0x100000000ULL + tag);
}

struct Accumulated {
    double mean = 0.0, sd = 0.0, min = 0.0, max = 0.0;
    std::size_t failed = 0;
    std::vector<double> sorted_values;
};

Accumulated accumulate(const std::vector<double>& estimates, std::size_t abort_permille) {
    Accumulated acc;
    std::vector<double> ok;
    ok.reserve(estimates.size());
    for (double v : estimates) {
        if (std::isnan(v)) {
            ++acc.failed;
        } else {
            ok.push_back(v);
        }
    }
    if (acc.failed * 1000 > abort_permille * estimates.size())
        throw NumericError("replicate failure rate above " +
                           std::to_string(abort_permille) + " per mille (" +
                           std::to_string(acc.failed) + " of " +
                           std::to_string(estimates.size()) + ")");
    if (ok.empty()) throw NumericError("all replicates failed");

    double sum = 0.0;
    acc.min = ok.front();
    acc.max = ok.front();
    for (double v : ok) {
        sum += v;
        acc.min = std::min(acc.min, v);
        acc.max = std::max(acc.max, v);
    }
    acc.mean = sum / static_cast<double>(ok.size());
    double ss = 0.0;
    for (double v : ok) ss += (v - acc.mean) * (v - acc.mean);
    acc.sd = ok.size() > 1 ? std::sqrt(ss / static_cast<double>(ok.size() - 1)) : 0.0;
    std::sort(ok.begin(), ok.end());
    acc.sorted_values = std::move(ok);
    return acc;
}

double interpolated_quantile(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::map<double, double> quantile_map(const std::vector<double>& sorted) {
    std::map<double, double> q;
    for (double p : quantile_probs()) q[p] = interpolated_quantile(sorted, p);
    return q;
}

SummaryRow to_row(const Accumulated& acc) {
    return {acc.mean, acc.sd, acc.min, acc.max, acc.failed};
}

// One filtered/unfiltered comparison over a grid of generating processes.
std::vector<BiasRow> run_bias_specs(const std::vector<ArfimaSpec>& specs,
                                    const StudyConfig& cfg, const PrefilterMode& filter) {
    if (cfg.replications < 100) throw ConfigError("replications must be >= 100");
    std::vector<BiasRow> rows;
    rows.reserve(specs.size());
    std::uint64_t spec_tag = 0;
    for (const auto& spec : specs) {
        const std::uint64_t base = stream_seed(cfg.master_seed, 0x2000 + spec_tag++);
        std::vector<double> raw(cfg.replications, kNaN), flt(cfg.replications, kNaN);
        run_replications(cfg.replications, cfg.workers, [&](std::size_t i) {
            try {
                SimConfig sim;
                sim.length = cfg.series_length;
                sim.seed = derive_seed(base, i);
                const ReturnSeries z = simulate(spec, sim);
                RraResult r;
                r.points = compute_rs_points(z.values, cfg.grid, nullptr);
                fit_hurst(r);
                raw[i] = r.hurst;
                const ReturnSeries zf = apply_prefilter(z, filter);
                RraResult rf;
                rf.points = compute_rs_points(zf.values, cfg.grid, nullptr);
                fit_hurst(rf);
                flt[i] = rf.hurst;
            } catch (const std::exception&) {
                raw[i] = kNaN;
                flt[i] = kNaN;
            }
        });
        BiasRow row;
        row.spec = spec;
        row.unfiltered = to_row(accumulate(raw, 1));
        row.filtered = to_row(accumulate(flt, 1));
        if (cfg.dump_replicates) {
            row.unfiltered_estimates = std::move(raw);
            row.filtered_estimates = std::move(flt);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

const char* to_string(EstimatorVariant v) {
    switch (v) {
        case EstimatorVariant::h: return "H";
        case EstimatorVariant::h_short: return "H_S";
        case EstimatorVariant::h_long: return "H_L";
    }
    return "?";
}

const char* to_string(Tail t) { return t == Tail::upper ? "upper" : "two_sided"; }

std::string to_string(const PrefilterMode& mode) {
    switch (mode.kind) {
        case PrefilterMode::Kind::none: return "none";
        case PrefilterMode::Kind::ar1: return "ar1";
        case PrefilterMode::Kind::pacf_sparse: return "pacf_sparse";
        case PrefilterMode::Kind::fixed_lags: {
            std::ostringstream out;
            out << "fixed_lags(";
            for (std::size_t i = 0; i < mode.lags.size(); ++i)
                out << (i ? "," : "") << mode.lags[i];
            out << ")";
            return out.str();
        }
    }
    return "?";
}

const char* to_string(Significance s) {
    switch (s) {
        case Significance::ns: return "ns";
        case Significance::p10: return "0.10";
        case Significance::p05: return "0.05";
        case Significance::p01: return "0.01";
    }
    return "?";
}

const std::vector<double>& quantile_probs() {
    static const std::vector<double> probs = {0.005, 0.01, 0.025, 0.05,  0.10,
                                              0.90,  0.95, 0.975, 0.99, 0.995};
    return probs;
}

double CriticalValues::quantile(double p) const {
    const auto it = quantiles.find(p);
    if (it == quantiles.end())
        throw ConfigError("quantile " + std::to_string(p) + " not stored");
    return it->second;
}

void run_replications(std::size_t count, int workers,
                      const std::function<void(std::size_t)>& body) {
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
#ifdef _OPENMP
    const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(count); ++i)
        body(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < count; ++i) body(i);
#endif
}

ReplicateSummary summarize(const std::vector<double>& estimates,
                           std::size_t abort_failures_above_permille) {
    const Accumulated acc = accumulate(estimates, abort_failures_above_permille);
    ReplicateSummary s;
    s.mean = acc.mean;
    s.sd = acc.sd;
    s.min = acc.min;
    s.max = acc.max;
    s.failed = acc.failed;
    s.quantiles = quantile_map(acc.sorted_values);
    return s;
}

NullPanel null_panel(const McConfig& cfg, std::vector<double>* out_h,
                     std::vector<double>* out_short, std::vector<double>* out_long) {
    validate(cfg);
    if (!cfg.grid.contains(cfg.knot))
        throw ConfigError("knot must be a grid scale for the split variants");

    const std::size_t n = cfg.replications;
    std::vector<double> est_h(n, kNaN), est_s(n, kNaN), est_l(n, kNaN);
    run_replications(n, cfg.workers, [&](std::size_t i) {
        try {
            const std::uint64_t seed = derive_seed(cfg.master_seed, i);
            ReturnSeries z = simulate_gaussian(cfg.series_length, seed);
            z = apply_prefilter(z, cfg.prefilter);
            RraResult r;
            r.points = compute_rs_points(z.values, cfg.grid, nullptr);
            fit_hurst(r);
            fit_hurst_split(r, cfg.knot);
            est_h[i] = r.hurst;
            est_s[i] = r.hurst_short;
            est_l[i] = r.hurst_long;
        } catch (const std::exception&) {
            est_h[i] = est_s[i] = est_l[i] = kNaN;
        }
    });
    if (out_h) *out_h = est_h;
    if (out_short) *out_short = est_s;
    if (out_long) *out_long = est_l;

    auto build = [&](const std::vector<double>& est, EstimatorVariant variant) {
        const Accumulated acc = accumulate(est, 1);
        CriticalValues cv;
        cv.mean = acc.mean;
        cv.sd = acc.sd;
        cv.quantiles = quantile_map(acc.sorted_values);
        cv.replications = cfg.replications;
        cv.failed = acc.failed;
        cv.series_length = cfg.series_length;
        cv.master_seed = cfg.master_seed;
        cv.variant = variant;
        cv.prefilter = cfg.prefilter;
        return cv;
    };
    return {build(est_h, EstimatorVariant::h), build(est_s, EstimatorVariant::h_short),
            build(est_l, EstimatorVariant::h_long)};
}

CriticalValues null_critical_values(const McConfig& cfg, std::vector<double>* estimates_out) {
    validate(cfg);
    if (cfg.variant != EstimatorVariant::h) {
        const bool want_short = cfg.variant == EstimatorVariant::h_short;
        const NullPanel panel = null_panel(cfg, nullptr, want_short ? estimates_out : nullptr,
                                           want_short ? nullptr : estimates_out);
        return want_short ? panel.h_short : panel.h_long;
    }

    const std::size_t n = cfg.replications;
    std::vector<double> est(n, kNaN);
    run_replications(n, cfg.workers, [&](std::size_t i) {
        try {
            const std::uint64_t seed = derive_seed(cfg.master_seed, i);
            ReturnSeries z = simulate_gaussian(cfg.series_length, seed);
            z = apply_prefilter(z, cfg.prefilter);
            RraResult r;
            r.points = compute_rs_points(z.values, cfg.grid, nullptr);
            fit_hurst(r);
            est[i] = r.hurst;
        } catch (const std::exception&) {
            est[i] = kNaN;
        }
    });
    if (estimates_out) *estimates_out = est;

    const Accumulated acc = accumulate(est, 1);
    CriticalValues cv;
    cv.mean = acc.mean;
    cv.sd = acc.sd;
    cv.quantiles = quantile_map(acc.sorted_values);
    cv.replications = cfg.replications;
    cv.failed = acc.failed;
    cv.series_length = cfg.series_length;
    cv.master_seed = cfg.master_seed;
    cv.variant = cfg.variant;
    cv.prefilter = cfg.prefilter;
    return cv;
}

std::vector<BiasRow> prefilter_bias_study(const std::vector<ArfimaSpec>& specs,
                                          const StudyConfig& cfg) {
    return run_bias_specs(specs, cfg, cfg.filter);
}

std::vector<BiasRow> sparse_lag4_study(const std::vector<double>& d_grid, double phi4,
                                       const StudyConfig& cfg) {
    std::vector<ArfimaSpec> specs;
    specs.reserve(d_grid.size());
    for (double d : d_grid) {
        ArfimaSpec spec;
        spec.d = d;
        spec.ar_coeffs = {{4, phi4}};
        spec.noise = FracNoiseMethod::fbm_increments;
        specs.push_back(std::move(spec));
    }
    return run_bias_specs(specs, cfg, PrefilterMode::fixed({4}));
}

std::vector<ArfimaSpec> reference_bias_grid() {
    std::vector<ArfimaSpec> specs;
    for (double d : {0.0, 0.04, 0.08, 0.12}) {
        for (double rho : {0.0, 0.10, 0.20}) {
            ArfimaSpec spec;
            spec.d = d;
            if (rho != 0.0) spec.ar_coeffs = {{1, rho}};
            spec.noise = FracNoiseMethod::fbm_increments;
            specs.push_back(std::move(spec));
        }
    }
    return specs;
}

PowerResult power_analysis(const std::vector<double>& hurst_grid,
                           const std::vector<std::size_t>& length_grid, double alpha,
                           const PowerConfig& cfg) {
    for (double h : hurst_grid) {
        if (!(h > 0.5) || !(h < 1.0))
            throw ConfigError("power analysis requires 0.5 < H < 1.0");
    }
    PowerResult result;
    result.alpha = alpha;
    result.tail = Tail::upper;
    result.replications = cfg.replications;
    result.null_replications = cfg.null_replications;
    result.master_seed = cfg.master_seed;

    std::uint64_t cell_tag = 0;
    for (std::size_t ti = 0; ti < length_grid.size(); ++ti) {
        const std::size_t T = length_grid[ti];
        McConfig null_cfg;
        null_cfg.replications = cfg.null_replications;
        null_cfg.series_length = T;
        null_cfg.master_seed = stream_seed(cfg.master_seed, 0x9000 + ti);
        null_cfg.grid = cfg.grid;
        null_cfg.workers = cfg.workers;
        const CriticalValues cv = null_critical_values(null_cfg);

        for (double h : hurst_grid) {
            ArfimaSpec spec;
            spec.d = h - 0.5;
            spec.noise = FracNoiseMethod::fbm_increments;
            const std::uint64_t base = stream_seed(cfg.master_seed, 0xA000 + cell_tag++);

            std::vector<double> est(cfg.replications, kNaN);
            run_replications(cfg.replications, cfg.workers, [&](std::size_t i) {
                try {
                    SimConfig sim;
                    sim.length = T;
                    sim.seed = derive_seed(base, i);
                    const ReturnSeries z = simulate(spec, sim);
                    RraResult r;
                    r.points = compute_rs_points(z.values, cfg.grid, nullptr);
                    fit_hurst(r);
                    est[i] = r.hurst;
                } catch (const std::exception&) {
                    est[i] = kNaN;
                }
            });

            std::size_t rejections = 0, ok = 0, failed = 0;
            for (double v : est) {
                if (std::isnan(v)) {
                    ++failed;
                    continue;
                }
                ++ok;
                if (rejects_null(v, cv, alpha, Tail::upper)) ++rejections;
            }
            if (failed * 1000 > est.size())
                throw NumericError("replicate failure rate above 1 per mille in power cell");
            PowerCell cell;
            cell.true_hurst = h;
            cell.series_length = T;
            cell.rejection_rate = ok ? static_cast<double>(rejections) / static_cast<double>(ok) : 0.0;
            cell.failed = failed;
            if (cfg.dump_replicates) cell.estimates = std::move(est);
            result.cells.push_back(cell);
        }
    }
    return result;
}

bool rejects_null(double estimate, const CriticalValues& cv, double alpha, Tail tail) {
    if (alpha != 0.10 && alpha != 0.05 && alpha != 0.01)
        throw ConfigError("alpha must be one of 0.10, 0.05, 0.01");
    if (tail == Tail::upper) return estimate > cv.quantile(1.0 - alpha);
    return estimate < cv.quantile(alpha / 2.0) || estimate > cv.quantile(1.0 - alpha / 2.0);
}

TestVerdict hypothesis_test(double estimate, const CriticalValues& cv, Tail tail) {
    TestVerdict verdict;
    verdict.estimate = estimate;
    verdict.null_mean = cv.mean;
    verdict.tail = tail;
    if (rejects_null(estimate, cv, 0.01, tail)) {
        verdict.significance = Significance::p01;
    } else if (rejects_null(estimate, cv, 0.05, tail)) {
        verdict.significance = Significance::p05;
    } else if (rejects_null(estimate, cv, 0.10, tail)) {
        verdict.significance = Significance::p10;
    } else {
        verdict.significance = Significance::ns;
    }
    return verdict;
}

}  // namespace longmem::mc
