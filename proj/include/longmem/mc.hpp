#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "longmem/arfima.hpp"
#include "longmem/rra.hpp"

namespace longmem::mc {

enum class EstimatorVariant { h, h_short, h_long };
enum class Tail { upper, two_sided };

const char* to_string(EstimatorVariant v);
const char* to_string(Tail t);

struct PrefilterMode {
    enum class Kind { none, ar1, pacf_sparse, fixed_lags };
    Kind kind = Kind::none;
    std::vector<int> lags;  // fixed_lags only

    static PrefilterMode none() { return {}; }
    static PrefilterMode ar1() { return {Kind::ar1, {}}; }
    static PrefilterMode pacf_sparse() { return {Kind::pacf_sparse, {}}; }
    static PrefilterMode fixed(std::vector<int> lags) {
        return {Kind::fixed_lags, std::move(lags)};
    }
};

std::string to_string(const PrefilterMode& mode);

struct McConfig {
    std::size_t replications = 5000;  // >= 100
    std::size_t series_length = 0;    // T >= 64
    std::uint64_t master_seed = 0;
    EstimatorVariant variant = EstimatorVariant::h;
    PrefilterMode prefilter = PrefilterMode::none();
    ScaleGrid grid = default_scale_grid();
    int knot = 40;
    int workers = 0;  // 0 = all hardware threads, 1 = serial reference path
};

/// Probabilities at which null quantiles are recorded; covers one- and
/// two-tailed tests at the 0.10 / 0.05 / 0.01 levels.
const std::vector<double>& quantile_probs();

struct CriticalValues {
    double mean = 0.0;
    double sd = 0.0;
    std::map<double, double> quantiles;
    std::size_t replications = 0;
    std::size_t failed = 0;
    std::size_t series_length = 0;
    std::uint64_t master_seed = 0;
    EstimatorVariant variant = EstimatorVariant::h;
    PrefilterMode prefilter = PrefilterMode::none();

    double quantile(double p) const;  // throws ConfigError when p not stored
};

/// Runs `count` independent replicates of `body(index)`. workers == 1 is a
/// plain serial loop kept as the reference implementation; any other value
/// runs the OpenMP path. Results must be written into index-addressed
/// storage by the body, which makes output independent of scheduling.
void run_replications(std::size_t count, int workers,
                      const std::function<void(std::size_t)>& body);

/// Summary statistics over the successful replicates (failures are NaN).
struct ReplicateSummary {
    double mean = 0.0, sd = 0.0, min = 0.0, max = 0.0;
    std::size_t failed = 0;
    std::map<double, double> quantiles;
};
ReplicateSummary summarize(const std::vector<double>& estimates,
                           std::size_t abort_failures_above_permille = 1);

/// Gaussian-null sampling distribution of the chosen estimator variant.
/// Deterministic in (config, master_seed) regardless of worker count.
/// When `estimates_out` is given it receives the per-replicate estimates in
/// replicate order (failures as NaN).
CriticalValues null_critical_values(const McConfig& cfg,
                                    std::vector<double>* estimates_out = nullptr);

/// All three variants from one simulation sweep (grid must contain the knot
/// with >= 3 scales on each side).
struct NullPanel {
    CriticalValues h, h_short, h_long;
};
NullPanel null_panel(const McConfig& cfg, std::vector<double>* est_h = nullptr,
                     std::vector<double>* est_short = nullptr,
                     std::vector<double>* est_long = nullptr);

struct StudyConfig {
    std::size_t series_length = 1000;
    std::size_t replications = 1000;
    std::uint64_t master_seed = 0;
    ScaleGrid grid;              // default: study_scale_grid()
    PrefilterMode filter = PrefilterMode::ar1();
    int workers = 0;
    bool dump_replicates = false;

    StudyConfig() : grid(study_scale_grid()) {}
};

struct SummaryRow {
    double mean = 0.0, sd = 0.0, min = 0.0, max = 0.0;
    std::size_t failed = 0;
};

struct BiasRow {
    ArfimaSpec spec;
    SummaryRow unfiltered;
    SummaryRow filtered;
    std::vector<double> unfiltered_estimates;  // populated when dump_replicates
    std::vector<double> filtered_estimates;
};

/// Filtered-vs-unfiltered comparison over a grid of generating processes;
/// both arms estimate from the same simulated series.
std::vector<BiasRow> prefilter_bias_study(const std::vector<ArfimaSpec>& specs,
                                          const StudyConfig& cfg);

/// The d-grid study for a process whose only AR term sits at lag 4;
/// filtering fits exactly that lag.
std::vector<BiasRow> sparse_lag4_study(const std::vector<double>& d_grid, double phi4,
                                       const StudyConfig& cfg);

/// Generating processes used by the reference bias table:
/// d in {0, .04, .08, .12} x rho in {0, .10, .20}.
std::vector<ArfimaSpec> reference_bias_grid();

struct PowerCell {
    double true_hurst = 0.0;
    std::size_t series_length = 0;
    double rejection_rate = 0.0;
    std::size_t failed = 0;
    std::vector<double> estimates;  // populated when dump_replicates
};

struct PowerResult {
    double alpha = 0.05;
    Tail tail = Tail::upper;
    std::size_t replications = 0;
    std::size_t null_replications = 0;
    std::uint64_t master_seed = 0;
    std::vector<PowerCell> cells;
};

struct PowerConfig {
    std::size_t replications = 1000;
    std::size_t null_replications = 2000;
    std::uint64_t master_seed = 0;
    ScaleGrid grid;
    int workers = 0;
    bool dump_replicates = false;

    PowerConfig() : grid(study_scale_grid()) {}
};

/// Rejection rate of the upper-tail test of H0: H = 0.5 at level alpha, per
/// (true H, T) cell, against null critical values computed at the same T.
PowerResult power_analysis(const std::vector<double>& hurst_grid,
                           const std::vector<std::size_t>& length_grid, double alpha,
                           const PowerConfig& cfg);

enum class Significance { ns, p10, p05, p01 };
const char* to_string(Significance s);

struct TestVerdict {
    double estimate = 0.0;
    double null_mean = 0.0;
    Significance significance = Significance::ns;
    Tail tail = Tail::upper;
};

/// Rejection uses strict inequality against the stored quantiles; the
/// verdict carries the smallest configured level at which rejection occurs.
TestVerdict hypothesis_test(double estimate, const CriticalValues& cv, Tail tail);

/// Single-level rejection decision; alpha must be one of 0.10 / 0.05 / 0.01.
bool rejects_null(double estimate, const CriticalValues& cv, double alpha, Tail tail);

}  // namespace longmem::mc
