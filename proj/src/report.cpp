#include "longmem/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "longmem/errors.hpp"

namespace longmem {

namespace {

Json prefilter_mode_json(const mc::PrefilterMode& mode) {
    Json j;
    j["kind"] = mc::to_string(mc::PrefilterMode{mode.kind, {}});
    if (mode.kind == mc::PrefilterMode::Kind::fixed_lags) {
        j["kind"] = "fixed_lags";
        j["lags"] = mode.lags;
    }
    return j;
}

mc::PrefilterMode prefilter_mode_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "none") return mc::PrefilterMode::none();
    if (kind == "ar1") return mc::PrefilterMode::ar1();
    if (kind == "pacf_sparse") return mc::PrefilterMode::pacf_sparse();
    if (kind == "fixed_lags")
        return mc::PrefilterMode::fixed(j.at("lags").get<std::vector<int>>());
    throw ConfigError("unknown prefilter mode '" + kind + "'");
}

mc::EstimatorVariant variant_from_string(const std::string& s) {
    if (s == "H") return mc::EstimatorVariant::h;
    if (s == "H_S") return mc::EstimatorVariant::h_short;
    if (s == "H_L") return mc::EstimatorVariant::h_long;
    throw ConfigError("unknown estimator variant '" + s + "'");
}

std::string prob_key(double p) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", p);
    return buf;
}

}  // namespace

Json to_json(const DescriptiveStats& s) {
    Json j;
    j["n_obs"] = s.n_obs;
    j["mean"] = s.mean;
    j["std_dev"] = s.std_dev;
    if (s.skewness) {
        j["skewness"] = *s.skewness;
        j["kurtosis"] = *s.kurtosis;
    } else {
        j["skewness"] = nullptr;
        j["kurtosis"] = nullptr;
        j["note"] = "zero variance: skewness/kurtosis undefined";
    }
    return j;
}

Json to_json(const RsPoint& p) {
    return Json{{"n", p.n}, {"rs", p.rs}, {"num_subperiods", p.num_subperiods}};
}

Json to_json(const RraResult& r) {
    Json j;
    j["H"] = r.hurst;
    j["intercept"] = r.intercept;
    if (r.has_split) {
        j["H_S"] = r.hurst_short;
        j["H_L"] = r.hurst_long;
        j["knot"] = r.knot;
    }
    Json points = Json::array();
    for (const auto& p : r.points) points.push_back(to_json(p));
    j["points"] = points;
    if (!r.dropped_scales.empty()) j["dropped_scales"] = r.dropped_scales;
    return j;
}

Json to_json(const SparseArFit& fit) {
    Json j;
    j["selected_lags"] = fit.selected_lags;
    Json coef = Json::object();
    for (const auto& [lag, c] : fit.coefficients) coef[std::to_string(lag)] = c;
    j["coefficients"] = coef;
    j["intercept"] = fit.intercept;
    j["residual_length"] = fit.residuals.size();
    return j;
}

Json to_json(const mc::CriticalValues& cv) {
    Json j;
    j["mean"] = cv.mean;
    j["sd"] = cv.sd;
    Json q = Json::object();
    for (const auto& [p, v] : cv.quantiles) q[prob_key(p)] = v;
    j["quantiles"] = q;
    j["config"] = Json{{"replications", cv.replications},
                       {"series_length", cv.series_length},
                       {"master_seed", cv.master_seed},
                       {"variant", mc::to_string(cv.variant)},
                       {"prefilter", prefilter_mode_json(cv.prefilter)}};
    j["failed_replicates"] = cv.failed;
    return j;
}

mc::CriticalValues critical_values_from_json(const Json& j) {
    mc::CriticalValues cv;
    cv.mean = j.at("mean").get<double>();
    cv.sd = j.at("sd").get<double>();
    for (const auto& [key, value] : j.at("quantiles").items())
        cv.quantiles[std::stod(key)] = value.get<double>();
    const Json& cfg = j.at("config");
    cv.replications = cfg.at("replications").get<std::size_t>();
    cv.series_length = cfg.at("series_length").get<std::size_t>();
    cv.master_seed = cfg.at("master_seed").get<std::uint64_t>();
    cv.variant = variant_from_string(cfg.at("variant").get<std::string>());
    cv.prefilter = prefilter_mode_from_json(cfg.at("prefilter"));
    cv.failed = j.value("failed_replicates", std::size_t{0});
    return cv;
}

Json to_json(const mc::TestVerdict& v) {
    Json j;
    j["estimate"] = v.estimate;
    j["null_mean"] = v.null_mean;
    j["significance"] = mc::to_string(v.significance);
    j["tail"] = mc::to_string(v.tail);
    return j;
}

Json to_json(const mc::PowerResult& p) {
    Json j;
    j["alpha"] = p.alpha;
    j["tail"] = mc::to_string(p.tail);
    j["replications"] = p.replications;
    j["null_replications"] = p.null_replications;
    j["master_seed"] = p.master_seed;
    Json cells = Json::array();
    for (const auto& c : p.cells) {
        cells.push_back(Json{{"true_H", c.true_hurst},
                             {"T", c.series_length},
                             {"rejection_rate", c.rejection_rate},
                             {"failed", c.failed}});
    }
    j["cells"] = cells;
    return j;
}

Json to_json(const std::vector<mc::BiasRow>& rows) {
    Json arr = Json::array();
    for (const auto& row : rows) {
        Json ar = Json::object();
        for (const auto& [lag, c] : row.spec.ar_coeffs) ar[std::to_string(lag)] = c;
        auto summary = [](const mc::SummaryRow& s) {
            return Json{{"mean", s.mean}, {"sd", s.sd},     {"min", s.min},
                        {"max", s.max},   {"failed", s.failed}};
        };
        Json j;
        j["d"] = row.spec.d;
        j["ar_coeffs"] = ar;
        j["unfiltered"] = summary(row.unfiltered);
        j["filtered"] = summary(row.filtered);
        if (!row.unfiltered_estimates.empty()) {
            j["unfiltered_estimates"] = row.unfiltered_estimates;
            j["filtered_estimates"] = row.filtered_estimates;
        }
        arr.push_back(j);
    }
    return arr;
}

CriticalValuesStore::CriticalValuesStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::string CriticalValuesStore::key_hash(const Key& key) {
    Json j;
    j["series_length"] = key.series_length;
    j["variant"] = mc::to_string(key.variant);
    j["prefilter"] = prefilter_mode_json(key.prefilter);
    j["replications"] = key.replications;
    j["master_seed"] = key.master_seed;
    j["grid_scales"] = key.grid_scales;
    j["knot"] = key.knot;
    const std::string canonical = j.dump();
    // FNV-1a, stable across platforms and runs.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

std::optional<mc::CriticalValues> CriticalValuesStore::load(const Key& key) const {
    const auto path = dir_ / ("cv-" + key_hash(key) + ".json");
    std::ifstream in(path);
    if (!in) return std::nullopt;
    Json j;
    in >> j;
    return critical_values_from_json(j.at("critical_values"));
}

void CriticalValuesStore::save(const Key& key, const mc::CriticalValues& cv) const {
    Json j;
    j["key"] = Json{{"series_length", key.series_length},
                    {"variant", mc::to_string(key.variant)},
                    {"prefilter", prefilter_mode_json(key.prefilter)},
                    {"replications", key.replications},
                    {"master_seed", key.master_seed},
                    {"grid_scales", key.grid_scales},
                    {"knot", key.knot}};
    j["critical_values"] = to_json(cv);

    const auto final_path = dir_ / ("cv-" + key_hash(key) + ".json");
    const auto tmp_path = dir_ / ("cv-" + key_hash(key) + ".tmp");
    {
        std::ofstream out(tmp_path);
        if (!out) throw InputError("cannot write '" + tmp_path.string() + "'");
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp_path, final_path);
}

namespace {

struct ScaleSpec {
    const char* name;
    AggregationMode mode;
    int fixed_block;
};

constexpr ScaleSpec kScales[] = {
    {"weekly", AggregationMode::calendar_week, 5},
    {"monthly", AggregationMode::calendar_month, 21},
    {"quarterly", AggregationMode::calendar_quarter, 65},
};

Json describe_or_note(const ReturnSeries& r) {
    if (r.size() < 2) return Json{{"note", "insufficient observations"}};
    return to_json(describe(r));
}

Json rra_panel_json(const mc::NullPanel& panel) {
    Json j;
    j["H"] = to_json(panel.h);
    j["H_S"] = to_json(panel.h_short);
    j["H_L"] = to_json(panel.h_long);
    return j;
}

mc::NullPanel fetch_null_panel(std::size_t length, const AnalyzeOptions& opt,
                               const ScaleGrid& grid) {
    const std::optional<CriticalValuesStore> store =
        opt.store_dir ? std::optional<CriticalValuesStore>(*opt.store_dir) : std::nullopt;

    auto key_for = [&](mc::EstimatorVariant v) {
        CriticalValuesStore::Key key;
        key.series_length = length;
        key.variant = v;
        key.prefilter = mc::PrefilterMode::none();
        key.replications = opt.cv_replications;
        key.master_seed = opt.master_seed;
        key.grid_scales = grid.scales;
        key.knot = opt.knot;
        return key;
    };

    if (store) {
        auto h = store->load(key_for(mc::EstimatorVariant::h));
        auto hs = store->load(key_for(mc::EstimatorVariant::h_short));
        auto hl = store->load(key_for(mc::EstimatorVariant::h_long));
        if (h && hs && hl) return {*h, *hs, *hl};
    }

    mc::McConfig cfg;
    cfg.replications = opt.cv_replications;
    cfg.series_length = length;
    cfg.master_seed = opt.master_seed;
    cfg.grid = grid;
    cfg.knot = opt.knot;
    cfg.workers = opt.workers;
    const mc::NullPanel panel = mc::null_panel(cfg);
    if (store) {
        store->save(key_for(mc::EstimatorVariant::h), panel.h);
        store->save(key_for(mc::EstimatorVariant::h_short), panel.h_short);
        store->save(key_for(mc::EstimatorVariant::h_long), panel.h_long);
    }
    return panel;
}

Json verdicts_json(const RraResult& r, const mc::NullPanel& panel, mc::Tail tail) {
    Json j;
    j["H"] = to_json(mc::hypothesis_test(r.hurst, panel.h, tail));
    j["H_S"] = to_json(mc::hypothesis_test(r.hurst_short, panel.h_short, tail));
    j["H_L"] = to_json(mc::hypothesis_test(r.hurst_long, panel.h_long, tail));
    return j;
}

// Re-throws pipeline failures with the failing stage named.
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const NumericError& e) {
        throw NumericError(std::string(name) + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(name) + ": " + e.what());
    } catch (const InputError& e) {
        throw InputError(std::string(name) + ": " + e.what());
    }
}

}  // namespace

Json analyze_series(const LoadedSeries& input, const std::string& input_path,
                    const AnalyzeOptions& opt) {
    const ReturnSeries returns =
        input.is_prices ? log_returns(input.prices) : input.returns;
    const ScaleGrid grid = build_scale_grid(opt.grid_ln_min, opt.grid_ln_max, opt.grid_step);

    Json report;
    report["tool"] = Json{{"name", "longmem"}, {"version", kVersion}};

    Json meta;
    meta["path"] = input_path;
    meta["kind"] = input.is_prices ? "prices" : "returns";
    meta["n_returns"] = returns.size();
    if (returns.has_dates()) {
        meta["date_range"] = Json{{"first", format_iso_date(returns.dates.front())},
                                  {"last", format_iso_date(returns.dates.back())}};
    } else {
        meta["date_range"] = nullptr;
    }
    report["input"] = meta;

    report["config"] = Json{{"knot", opt.knot},
                            {"grid_ln_min", opt.grid_ln_min},
                            {"grid_ln_max", opt.grid_ln_max},
                            {"grid_step", opt.grid_step},
                            {"grid_scales", grid.scales},
                            {"tail", mc::to_string(opt.tail)},
                            {"cv_replications", opt.cv_replications},
                            {"master_seed", opt.master_seed},
                            {"shuffle_seed", opt.shuffle_seed},
                            {"prefilter_max_lag", opt.prefilter_max_lag},
                            {"workers", opt.workers},
                            {"significance_levels", Json::array({0.10, 0.05, 0.01})}};

    // Per-scale descriptive statistics, raw and shuffled; the surrogate is
    // re-aggregated with the original block boundaries.
    const bool calendar = returns.has_dates();
    const ReturnSeries shuffled = shuffle_surrogate(returns, opt.shuffle_seed);
    Json raw_stats, shuffled_stats;
    raw_stats["daily"] = describe_or_note(returns);
    shuffled_stats["daily"] = describe_or_note(shuffled);
    for (const auto& scale : kScales) {
        stage("descriptive", [&] {
            const AggregationPlan plan =
                calendar ? make_aggregation_plan(returns, scale.mode)
                         : make_aggregation_plan(returns, AggregationMode::fixed_block,
                                                 scale.fixed_block);
            raw_stats[scale.name] = describe_or_note(aggregate(returns, plan));
            shuffled_stats[scale.name] = describe_or_note(aggregate(shuffled, plan));
            return 0;
        });
    }
    report["descriptive"] = Json{{"aggregation", calendar ? "calendar" : "fixed_block"},
                                 {"raw", raw_stats},
                                 {"shuffled", shuffled_stats}};

    // Pre-filter on the daily returns.
    const CorrelogramResult corr =
        stage("prefilter", [&] { return correlogram(returns, opt.prefilter_max_lag); });
    const SparseArFit fit =
        stage("prefilter", [&] { return fit_sparse_ar(returns, select_lags(corr)); });
    Json pf = to_json(fit);
    pf["threshold"] = corr.threshold;
    pf["acf"] = corr.acf;
    pf["pacf"] = std::vector<double>(corr.pacf.begin() + 1, corr.pacf.end());
    report["prefilter"] = pf;

    // RRA on both series.
    const RraResult rra_raw =
        stage("rra(unfiltered)", [&] { return analyze_rra(returns, grid, opt.knot); });
    const RraResult rra_filtered =
        stage("rra(filtered)", [&] { return analyze_rra(fit.residuals, grid, opt.knot); });
    report["rra"] = Json{{"unfiltered", to_json(rra_raw)}, {"filtered", to_json(rra_filtered)}};

    // Null critical values, length-matched to each analyzed series.
    const mc::NullPanel panel_raw = stage(
        "critical_values", [&] { return fetch_null_panel(returns.size(), opt, grid); });
    const mc::NullPanel panel_filtered =
        fit.residuals.size() == returns.size()
            ? panel_raw
            : stage("critical_values",
                    [&] { return fetch_null_panel(fit.residuals.size(), opt, grid); });
    report["critical_values"] =
        Json{{"unfiltered", rra_panel_json(panel_raw)},
             {"filtered", rra_panel_json(panel_filtered)}};

    report["tests"] = Json{{"unfiltered", verdicts_json(rra_raw, panel_raw, opt.tail)},
                           {"filtered", verdicts_json(rra_filtered, panel_filtered, opt.tail)}};

    Json warnings = Json::array();
    for (int n : rra_raw.dropped_scales)
        warnings.push_back("scale n=" + std::to_string(n) +
                           " exceeds N/2 for the unfiltered series; dropped");
    for (int n : rra_filtered.dropped_scales)
        warnings.push_back("scale n=" + std::to_string(n) +
                           " exceeds N/2 for the filtered series; dropped");
    for (const auto& [label, r] : {std::pair<const char*, const RraResult&>{"unfiltered", rra_raw},
                                   {"filtered", rra_filtered}}) {
        if (r.hurst <= 0.0 || r.hurst >= 1.5)
            warnings.push_back(std::string(label) + " H = " + std::to_string(r.hurst) +
                               " outside the diagnostic range (0, 1.5)");
    }
    report["warnings"] = warnings;
    return report;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%10.4f", v);
    return buf;
}

std::string stars(const std::string& significance) {
    if (significance == "0.01") return "***";
    if (significance == "0.05") return "**";
    if (significance == "0.10") return "*";
    return "";
}

}  // namespace

std::string render_report_table(const Json& report) {
    std::ostringstream out;
    const Json& input = report.at("input");
    out << "Input: " << input.at("path").get<std::string>() << "  (N = "
        << input.at("n_returns").get<std::size_t>() << " returns)\n\n";

    out << "Descriptive statistics\n";
    out << "  scale        n        mean     std_dev    skewness    kurtosis\n";
    for (const char* which : {"raw", "shuffled"}) {
        out << (std::string(which) == "raw" ? "  [raw]\n" : "  [shuffled]\n");
        for (const char* scale : {"daily", "weekly", "monthly", "quarterly"}) {
            const Json& s = report.at("descriptive").at(which).at(scale);
            out << "  " << scale << std::string(11 - std::string(scale).size(), ' ');
            if (s.contains("note") && !s.contains("mean")) {
                out << s.at("note").get<std::string>() << "\n";
                continue;
            }
            out << s.at("n_obs").get<std::size_t>() << "  " << fmt(s.at("mean").get<double>())
                << "  " << fmt(s.at("std_dev").get<double>());
            if (s.at("skewness").is_null()) {
                out << "       (undefined)";
            } else {
                out << "  " << fmt(s.at("skewness").get<double>()) << "  "
                    << fmt(s.at("kurtosis").get<double>());
            }
            out << "\n";
        }
    }

    out << "\nSparse AR pre-filter: lags [";
    const auto lags = report.at("prefilter").at("selected_lags");
    for (std::size_t i = 0; i < lags.size(); ++i) out << (i ? "," : "") << lags[i].get<int>();
    out << "]\n\nRescaled range analysis\n";
    out << "  series        H         H_S        H_L\n";
    for (const char* which : {"unfiltered", "filtered"}) {
        const Json& r = report.at("rra").at(which);
        const Json& t = report.at("tests").at(which);
        out << "  " << which << std::string(12 - std::string(which).size(), ' ');
        for (const char* v : {"H", "H_S", "H_L"}) {
            out << fmt(r.at(v).get<double>())
                << stars(t.at(v).at("significance").get<std::string>()) << " ";
        }
        out << "\n";
    }
    out << "\n(***, **, * : rejection of no long-range dependence at 0.01, 0.05, 0.10; "
        << report.at("config").at("tail").get<std::string>() << " tail)\n";
    return out.str();
}

}  // namespace longmem
