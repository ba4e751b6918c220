// longmem: rescaled-range analysis of long-range dependence in return
// series, with sparse AR pre-filtering and Monte Carlo critical values.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "longmem/csv.hpp"
#include "longmem/errors.hpp"
#include "longmem/report.hpp"

namespace {

using namespace longmem;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("LONGMEM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError("LONGMEM_SEED must be an unsigned integer");
        }
    }
    return 0;
}

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty() || output_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path);
    if (!out) throw InputError("cannot write '" + output_path + "'");
    out << text;
}

void emit_json(const Json& j, const std::string& output_path) {
    emit(j.dump(2) + "\n", output_path);
}

ScaleGrid grid_from(double ln_min, double ln_max, double step) {
    return build_scale_grid(ln_min, ln_max, step);
}

mc::Tail parse_tail(const std::string& s) {
    if (s == "upper") return mc::Tail::upper;
    if (s == "two-sided" || s == "two_sided") return mc::Tail::two_sided;
    throw ConfigError("--tail must be 'upper' or 'two-sided'");
}

std::map<int, double> parse_ar_coeffs(const std::string& text) {
    std::map<int, double> coeffs;
    if (text.empty()) return coeffs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("--ar expects 'lag:coeff[,lag:coeff...]'");
        coeffs[std::stoi(item.substr(0, colon))] = std::stod(item.substr(colon + 1));
    }
    return coeffs;
}

void dump_replicates_csv(const std::string& path, const std::vector<double>& estimates) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out.precision(17);
    out << "replicate,estimate\n";
    for (std::size_t i = 0; i < estimates.size(); ++i)
        out << i << ',' << estimates[i] << '\n';
}

int run(int argc, char** argv) {
    CLI::App app{"Long-range dependence testing via rescaled range analysis"};
    app.require_subcommand(1);

    // ---- analyze ----------------------------------------------------------
    auto* analyze = app.add_subcommand("analyze", "Full pipeline on a CSV series");
    std::string an_input, an_output, an_format = "json", an_store, an_tail = "two-sided";
    AnalyzeOptions an_opt;
    an_opt.master_seed = default_seed();
    std::string an_stats_csv;
    analyze->add_option("--input", an_input, "CSV file: 'value' or 'date,price'")->required();
    analyze->add_option("--output", an_output, "report destination (default stdout)");
    analyze->add_option("--format", an_format, "json or table")->check(CLI::IsMember({"json", "table"}));
    analyze->add_option("--knot", an_opt.knot, "spline knot scale");
    analyze->add_option("--grid-min", an_opt.grid_ln_min, "ln(n) lattice start");
    analyze->add_option("--grid-max", an_opt.grid_ln_max, "ln(n) lattice end");
    analyze->add_option("--grid-step", an_opt.grid_step, "ln(n) lattice step");
    analyze->add_option("--reps", an_opt.cv_replications, "null replications");
    analyze->add_option("--seed", an_opt.master_seed, "master seed (default LONGMEM_SEED)");
    analyze->add_option("--shuffle-seed", an_opt.shuffle_seed, "surrogate shuffle seed");
    analyze->add_option("--tail", an_tail, "upper or two-sided");
    analyze->add_option("--store", an_store, "critical-values cache directory");
    analyze->add_option("--workers", an_opt.workers, "worker threads (0 = all, 1 = serial)");
    analyze->add_option("--stats-csv", an_stats_csv, "also write per-scale stats as CSV");

    // ---- simulate ---------------------------------------------------------
    auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic series");
    std::size_t sim_T = 1000;
    double sim_d = 0.0, sim_sd = 1.0;
    std::string sim_ar, sim_out, sim_method = "ma";
    std::uint64_t sim_seed = default_seed();
    std::optional<std::size_t> sim_burn;
    simulate_cmd->add_option("--T", sim_T, "series length")->required();
    simulate_cmd->add_option("--d", sim_d, "fractional integration order, |d| < 0.5");
    simulate_cmd->add_option("--ar", sim_ar, "sparse AR terms 'lag:coeff,...'");
    simulate_cmd->add_option("--sd", sim_sd, "innovation standard deviation");
    simulate_cmd->add_option("--seed", sim_seed, "seed (default LONGMEM_SEED)");
    simulate_cmd->add_option("--burn-in", [&sim_burn](const CLI::results_t& res) {
        sim_burn = std::stoull(res.at(0));
        return true;
    }, "burn-in override");
    simulate_cmd->add_option("--method", sim_method, "ma (truncated MA) or fbm (exact increments)")
        ->check(CLI::IsMember({"ma", "fbm"}));
    simulate_cmd->add_option("--out", sim_out, "output CSV (default stdout)");

    // ---- rra --------------------------------------------------------------
    auto* rra_cmd = app.add_subcommand("rra", "Rescaled range analysis of a CSV series");
    std::string rra_input, rra_out;
    bool rra_prefilter = false;
    int rra_knot = 40;
    double rra_min = 1.6, rra_max = 5.7, rra_step = 0.1;
    rra_cmd->add_option("--input", rra_input, "CSV file")->required();
    rra_cmd->add_flag("--prefilter", rra_prefilter, "run on PACF-selected AR residuals");
    rra_cmd->add_option("--knot", rra_knot, "spline knot scale");
    rra_cmd->add_option("--grid-min", rra_min, "ln(n) lattice start");
    rra_cmd->add_option("--grid-max", rra_max, "ln(n) lattice end");
    rra_cmd->add_option("--grid-step", rra_step, "ln(n) lattice step");
    rra_cmd->add_option("--output", rra_out, "JSON destination (default stdout)");

    // ---- prefilter --------------------------------------------------------
    auto* pf_cmd = app.add_subcommand("prefilter", "PACF-selected sparse AR fit");
    std::string pf_input, pf_out, pf_residuals;
    pf_cmd->add_option("--input", pf_input, "CSV file")->required();
    pf_cmd->add_option("--output", pf_out, "JSON destination (default stdout)");
    pf_cmd->add_option("--residuals-out", pf_residuals, "write residuals CSV");

    // ---- shuffle ----------------------------------------------------------
    auto* sh_cmd = app.add_subcommand("shuffle", "Shuffled surrogate of a series");
    std::string sh_input, sh_out;
    std::uint64_t sh_seed = default_seed();
    sh_cmd->add_option("--input", sh_input, "CSV file")->required();
    sh_cmd->add_option("--seed", sh_seed, "shuffle seed (default LONGMEM_SEED)");
    sh_cmd->add_option("--out", sh_out, "output CSV (default stdout)");

    // ---- critical-values --------------------------------------------------
    auto* cv_cmd = app.add_subcommand("critical-values", "Monte Carlo null distribution");
    mc::McConfig cv_cfg;
    std::string cv_variant = "H", cv_prefilter = "none", cv_out, cv_store, cv_dump;
    double cv_min = 1.6, cv_max = 5.7, cv_step = 0.1;
    cv_cfg.master_seed = default_seed();
    cv_cmd->add_option("--T", cv_cfg.series_length, "series length")->required();
    cv_cmd->add_option("--reps", cv_cfg.replications, "replications");
    cv_cmd->add_option("--seed", cv_cfg.master_seed, "master seed (default LONGMEM_SEED)");
    cv_cmd->add_option("--variant", cv_variant, "H, H_S or H_L")
        ->check(CLI::IsMember({"H", "H_S", "H_L"}));
    cv_cmd->add_option("--prefilter", cv_prefilter, "none, ar1 or pacf_sparse")
        ->check(CLI::IsMember({"none", "ar1", "pacf_sparse"}));
    cv_cmd->add_option("--knot", cv_cfg.knot, "spline knot scale");
    cv_cmd->add_option("--grid-min", cv_min, "ln(n) lattice start");
    cv_cmd->add_option("--grid-max", cv_max, "ln(n) lattice end");
    cv_cmd->add_option("--grid-step", cv_step, "ln(n) lattice step");
    cv_cmd->add_option("--workers", cv_cfg.workers, "worker threads (0 = all, 1 = serial)");
    cv_cmd->add_option("--store", cv_store, "cache directory");
    cv_cmd->add_option("--dump-replicates", cv_dump, "write per-replicate estimates CSV");
    cv_cmd->add_option("--output", cv_out, "JSON destination (default stdout)");

    // ---- power ------------------------------------------------------------
    auto* pw_cmd = app.add_subcommand("power", "Power of the upper-tail test");
    std::vector<double> pw_H;
    std::vector<std::size_t> pw_T;
    double pw_alpha = 0.05;
    mc::PowerConfig pw_cfg;
    pw_cfg.master_seed = default_seed();
    std::string pw_out, pw_grid = "study";
    pw_cmd->add_option("--H", pw_H, "true Hurst exponents (H > 0.5)")->required()->delimiter(',');
    pw_cmd->add_option("--T", pw_T, "series lengths")->required()->delimiter(',');
    pw_cmd->add_option("--alpha", pw_alpha, "significance level");
    pw_cmd->add_option("--reps", pw_cfg.replications, "replications per cell");
    pw_cmd->add_option("--null-reps", pw_cfg.null_replications, "null replications per T");
    pw_cmd->add_option("--seed", pw_cfg.master_seed, "master seed (default LONGMEM_SEED)");
    pw_cmd->add_option("--grid", pw_grid, "study (5..40) or full (5..299)")
        ->check(CLI::IsMember({"study", "full"}));
    pw_cmd->add_option("--workers", pw_cfg.workers, "worker threads");
    std::string pw_dump;
    pw_cmd->add_option("--dump-replicates", pw_dump, "per-cell estimate CSV prefix");
    pw_cmd->add_option("--output", pw_out, "JSON destination (default stdout)");

    // ---- bias-study -------------------------------------------------------
    auto* bs_cmd = app.add_subcommand("bias-study", "Pre-filtering bias comparison");
    mc::StudyConfig bs_cfg;
    bs_cfg.master_seed = default_seed();
    std::string bs_out, bs_dump, bs_grid = "study";
    bool bs_lag4 = false;
    std::vector<double> bs_d = {0.0, 0.04, 0.08, 0.12};
    double bs_phi4 = 0.0782;
    bs_cmd->add_option("--T", bs_cfg.series_length, "series length");
    bs_cmd->add_option("--reps", bs_cfg.replications, "replications per process");
    bs_cmd->add_option("--seed", bs_cfg.master_seed, "master seed (default LONGMEM_SEED)");
    bs_cmd->add_flag("--sparse-lag4", bs_lag4, "lag-4 process study instead of the AR(1) grid");
    bs_cmd->add_option("--d", bs_d, "d grid for --sparse-lag4")->delimiter(',');
    bs_cmd->add_option("--phi4", bs_phi4, "lag-4 coefficient for --sparse-lag4");
    bs_cmd->add_option("--grid", bs_grid, "study (5..40) or full (5..299)")
        ->check(CLI::IsMember({"study", "full"}));
    bs_cmd->add_option("--workers", bs_cfg.workers, "worker threads");
    bs_cmd->add_option("--dump-replicates", bs_dump, "write per-replicate estimates CSV");
    bs_cmd->add_option("--output", bs_out, "JSON destination (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (*analyze) {
        an_opt.tail = parse_tail(an_tail);
        if (!an_store.empty()) an_opt.store_dir = an_store;
        const LoadedSeries input = load_series_csv(an_input);
        const Json report = analyze_series(input, an_input, an_opt);
        if (an_format == "table") {
            emit(render_report_table(report), an_output);
        } else {
            emit_json(report, an_output);
        }
        if (!an_stats_csv.empty()) {
            std::ofstream out(an_stats_csv);
            if (!out) throw InputError("cannot write '" + an_stats_csv + "'");
            out << "series,scale,n_obs,mean,std_dev,skewness,kurtosis\n";
            out.precision(17);
            for (const char* which : {"raw", "shuffled"}) {
                for (const char* scale : {"daily", "weekly", "monthly", "quarterly"}) {
                    const Json& s = report.at("descriptive").at(which).at(scale);
                    if (!s.contains("mean")) continue;
                    out << which << ',' << scale << ',' << s.at("n_obs").get<std::size_t>()
                        << ',' << s.at("mean").get<double>() << ','
                        << s.at("std_dev").get<double>() << ',';
                    if (s.at("skewness").is_null()) {
                        out << ",";
                    } else {
                        out << s.at("skewness").get<double>() << ','
                            << s.at("kurtosis").get<double>();
                    }
                    out << '\n';
                }
            }
        }
        return 0;
    }

    if (*simulate_cmd) {
        ArfimaSpec spec;
        spec.d = sim_d;
        spec.ar_coeffs = parse_ar_coeffs(sim_ar);
        spec.innovation_sd = sim_sd;
        spec.noise = sim_method == "fbm" ? FracNoiseMethod::fbm_increments
                                         : FracNoiseMethod::ma_truncated;
        SimConfig cfg;
        cfg.length = sim_T;
        cfg.burn_in = sim_burn;
        cfg.seed = sim_seed;
        const ReturnSeries series = simulate(spec, cfg);
        if (sim_out.empty() || sim_out == "-") {
            write_returns_csv(std::cout, series);
        } else {
            write_returns_csv(sim_out, series);
        }
        return 0;
    }

    if (*rra_cmd) {
        const ReturnSeries loaded = load_returns_from_csv(rra_input);
        const ScaleGrid grid = grid_from(rra_min, rra_max, rra_step);
        Json j;
        j["tool"] = Json{{"name", "longmem"}, {"version", kVersion}};
        j["input"] = Json{{"path", rra_input}, {"n_returns", loaded.size()}};
        j["config"] = Json{{"prefilter", rra_prefilter},
                           {"knot", rra_knot},
                           {"grid_ln_min", rra_min},
                           {"grid_ln_max", rra_max},
                           {"grid_step", rra_step},
                           {"grid_scales", grid.scales}};
        const ReturnSeries* series = &loaded;
        SparseArFit fit;
        if (rra_prefilter) {
            fit = prefilter(loaded);
            j["prefilter_fit"] = to_json(fit);
            series = &fit.residuals;
        }
        j["rra"] = to_json(analyze_rra(*series, grid, rra_knot));
        if (series->size() >= 2 * static_cast<std::size_t>(grid.scales.back()))
            j["variance_scaling_H"] = variance_scaling_hurst(*series, grid);
        emit_json(j, rra_out);
        return 0;
    }

    if (*pf_cmd) {
        const ReturnSeries loaded = load_returns_from_csv(pf_input);
        const CorrelogramResult corr = correlogram(loaded);
        const SparseArFit fit = fit_sparse_ar(loaded, select_lags(corr));
        Json j = to_json(fit);
        j["threshold"] = corr.threshold;
        j["acf"] = corr.acf;
        j["pacf"] = std::vector<double>(corr.pacf.begin() + 1, corr.pacf.end());
        emit_json(j, pf_out);
        if (!pf_residuals.empty()) write_returns_csv(pf_residuals, fit.residuals);
        return 0;
    }

    if (*sh_cmd) {
        const ReturnSeries loaded = load_returns_from_csv(sh_input);
        const ReturnSeries shuffled = shuffle_surrogate(loaded, sh_seed);
        if (sh_out.empty() || sh_out == "-") {
            write_returns_csv(std::cout, shuffled);
        } else {
            write_returns_csv(sh_out, shuffled);
        }
        return 0;
    }

    if (*cv_cmd) {
        cv_cfg.grid = grid_from(cv_min, cv_max, cv_step);
        if (cv_variant == "H_S") cv_cfg.variant = mc::EstimatorVariant::h_short;
        if (cv_variant == "H_L") cv_cfg.variant = mc::EstimatorVariant::h_long;
        if (cv_prefilter == "ar1") cv_cfg.prefilter = mc::PrefilterMode::ar1();
        if (cv_prefilter == "pacf_sparse") cv_cfg.prefilter = mc::PrefilterMode::pacf_sparse();

        std::optional<mc::CriticalValues> cv;
        std::vector<double> replicate_estimates;
        auto* est_out = cv_dump.empty() ? nullptr : &replicate_estimates;
        if (!cv_store.empty() && cv_dump.empty()) {
            CriticalValuesStore store(cv_store);
            CriticalValuesStore::Key key{cv_cfg.series_length, cv_cfg.variant,
                                         cv_cfg.prefilter,     cv_cfg.replications,
                                         cv_cfg.master_seed,   cv_cfg.grid.scales,
                                         cv_cfg.knot};
            cv = store.load(key);
            if (!cv) {
                cv = mc::null_critical_values(cv_cfg);
                store.save(key, *cv);
            }
        } else {
            cv = mc::null_critical_values(cv_cfg, est_out);
            if (!cv_store.empty()) {
                CriticalValuesStore store(cv_store);
                store.save(CriticalValuesStore::Key{cv_cfg.series_length, cv_cfg.variant,
                                                    cv_cfg.prefilter, cv_cfg.replications,
                                                    cv_cfg.master_seed, cv_cfg.grid.scales,
                                                    cv_cfg.knot},
                           *cv);
            }
        }
        if (est_out) dump_replicates_csv(cv_dump, replicate_estimates);
        Json j = to_json(*cv);
        j["config"]["grid_scales"] = cv_cfg.grid.scales;
        j["config"]["knot"] = cv_cfg.knot;
        emit_json(j, cv_out);
        return 0;
    }

    if (*pw_cmd) {
        pw_cfg.grid = pw_grid == "full" ? default_scale_grid() : study_scale_grid();
        pw_cfg.dump_replicates = !pw_dump.empty();
        const mc::PowerResult result = power_analysis(pw_H, pw_T, pw_alpha, pw_cfg);
        Json j = to_json(result);
        j["config_grid"] = pw_cfg.grid.scales;
        if (!pw_dump.empty()) {
            for (const auto& cell : result.cells) {
                char name[64];
                std::snprintf(name, sizeof(name), ".H%.3f-T%zu.csv", cell.true_hurst,
                              cell.series_length);
                dump_replicates_csv(pw_dump + name, cell.estimates);
            }
        }
        emit_json(j, pw_out);
        return 0;
    }

    if (*bs_cmd) {
        bs_cfg.grid = bs_grid == "full" ? default_scale_grid() : study_scale_grid();
        bs_cfg.dump_replicates = !bs_dump.empty();
        std::vector<mc::BiasRow> rows;
        if (bs_lag4) {
            rows = mc::sparse_lag4_study(bs_d, bs_phi4, bs_cfg);
        } else {
            rows = mc::prefilter_bias_study(mc::reference_bias_grid(), bs_cfg);
        }
        Json j;
        j["tool"] = Json{{"name", "longmem"}, {"version", kVersion}};
        j["config"] = Json{{"T", bs_cfg.series_length},
                           {"replications", bs_cfg.replications},
                           {"master_seed", bs_cfg.master_seed},
                           {"grid_scales", bs_cfg.grid.scales},
                           {"study", bs_lag4 ? "sparse_lag4" : "reference_grid"},
                           {"filter", bs_lag4 ? "fixed_lags(4)" : "ar1"}};
        j["rows"] = to_json(rows);
        if (!bs_dump.empty()) {
            std::size_t idx = 0;
            for (const auto& row : rows) {
                dump_replicates_csv(bs_dump + ".row" + std::to_string(idx) + ".unfiltered.csv",
                                    row.unfiltered_estimates);
                dump_replicates_csv(bs_dump + ".row" + std::to_string(idx) + ".filtered.csv",
                                    row.filtered_estimates);
                ++idx;
            }
        }
        emit_json(j, bs_out);
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const longmem::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const longmem::NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const longmem::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
