#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "longmem/arfima.hpp"
#include "longmem/errors.hpp"
#include "longmem/report.hpp"

using namespace longmem;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("longmem-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

LoadedSeries synthetic_input(std::size_t n, std::uint64_t seed) {
    LoadedSeries input;
    input.is_prices = false;
    input.returns = simulate_gaussian(n, seed);
    return input;
}

AnalyzeOptions fast_options() {
    AnalyzeOptions opt;
    opt.cv_replications = 150;
    opt.master_seed = 7;
    return opt;
}

}  // namespace

TEST_CASE("csv loading: value column") {
    TempDir tmp;
    const auto file = tmp.path / "returns.csv";
    {
        std::ofstream out(file);
        out << "value\n0.01\n-0.02\n0.003\n";
    }
    const auto loaded = load_series_csv(file.string());
    CHECK_FALSE(loaded.is_prices);
    REQUIRE(loaded.returns.size() == 3);
    CHECK(loaded.returns.values[1] == doctest::Approx(-0.02));
}

TEST_CASE("csv loading: date,price columns and parse errors with line numbers") {
    TempDir tmp;
    const auto file = tmp.path / "prices.csv";
    {
        std::ofstream out(file);
        out << "date,price\n2001-01-02,100.0\n2001-01-03,101.5\n2001-01-04,99.0\n";
    }
    const auto loaded = load_series_csv(file.string());
    CHECK(loaded.is_prices);
    REQUIRE(loaded.prices.size() == 3);
    CHECK(loaded.prices.dates.front() == parse_iso_date("2001-01-02"));

    const auto bad = tmp.path / "bad.csv";
    {
        std::ofstream out(bad);
        out << "date,price\n2001-01-02,100.0\n2001-01-03,not-a-number\n";
    }
    CHECK_THROWS_WITH_AS(load_series_csv(bad.string()), doctest::Contains(":3"), InputError);

    const auto bad_header = tmp.path / "header.csv";
    {
        std::ofstream out(bad_header);
        out << "price\n100.0\n";
    }
    CHECK_THROWS_AS(load_series_csv(bad_header.string()), InputError);

    const auto missing = tmp.path / "missing.csv";
    {
        std::ofstream out(missing);
        out << "date,price\n2001-01-02,100.0\n2001-01-03,\n";
    }
    CHECK_THROWS_WITH_AS(load_series_csv(missing.string()), doctest::Contains(":3"),
                         InputError);
}

TEST_CASE("returns csv round-trip") {
    TempDir tmp;
    const auto file = tmp.path / "out.csv";
    const auto r = simulate_gaussian(50, 3);
    write_returns_csv(file.string(), r);
    const auto loaded = load_series_csv(file.string());
    REQUIRE(loaded.returns.size() == 50);
    for (std::size_t i = 0; i < 50; ++i)
        CHECK(loaded.returns.values[i] == r.values[i]);  // full-precision output
}

TEST_CASE("critical values store round-trips exactly") {
    TempDir tmp;
    CriticalValuesStore store(tmp.path / "store");

    mc::McConfig cfg;
    cfg.replications = 120;
    cfg.series_length = 256;
    cfg.master_seed = 9;
    cfg.grid = study_scale_grid();
    const auto cv = mc::null_critical_values(cfg);

    CriticalValuesStore::Key key;
    key.series_length = cfg.series_length;
    key.replications = cfg.replications;
    key.master_seed = cfg.master_seed;
    key.grid_scales = cfg.grid.scales;

    CHECK_FALSE(store.load(key).has_value());
    store.save(key, cv);
    const auto loaded = store.load(key);
    REQUIRE(loaded.has_value());
    CHECK(loaded->mean == cv.mean);
    CHECK(loaded->sd == cv.sd);
    for (const auto& [p, v] : cv.quantiles) CHECK(loaded->quantiles.at(p) == v);
    CHECK(loaded->series_length == cv.series_length);

    // A different key misses.
    key.master_seed = 10;
    CHECK_FALSE(store.load(key).has_value());
}

TEST_CASE("analysis report is byte-identical for identical input and config") {
    const auto input = synthetic_input(400, 21);
    const auto opt = fast_options();
    const Json a = analyze_series(input, "synthetic.csv", opt);
    const Json b = analyze_series(input, "synthetic.csv", opt);
    CHECK(a.dump() == b.dump());
}

TEST_CASE("analysis report closure: the embedded config re-runs itself") {
    const auto input = synthetic_input(400, 22);
    auto opt = fast_options();
    opt.tail = mc::Tail::upper;
    opt.knot = 20;
    opt.grid_ln_max = 4.0;
    const Json a = analyze_series(input, "series.csv", opt);

    AnalyzeOptions re;
    const Json& cfg = a.at("config");
    re.knot = cfg.at("knot").get<int>();
    re.grid_ln_min = cfg.at("grid_ln_min").get<double>();
    re.grid_ln_max = cfg.at("grid_ln_max").get<double>();
    re.grid_step = cfg.at("grid_step").get<double>();
    re.tail = cfg.at("tail").get<std::string>() == "upper" ? mc::Tail::upper
                                                           : mc::Tail::two_sided;
    re.cv_replications = cfg.at("cv_replications").get<std::size_t>();
    re.master_seed = cfg.at("master_seed").get<std::uint64_t>();
    re.shuffle_seed = cfg.at("shuffle_seed").get<std::uint64_t>();
    re.prefilter_max_lag = cfg.at("prefilter_max_lag").get<int>();
    re.workers = cfg.at("workers").get<int>();

    const Json b = analyze_series(input, "series.csv", re);
    CHECK(a.dump() == b.dump());
}

TEST_CASE("analysis uses the store and length-matches the filtered panel") {
    TempDir tmp;
    auto opt = fast_options();
    opt.store_dir = (tmp.path / "cv").string();

    // An AR(1)-ish input makes lag selection likely, shortening the residuals.
    ArfimaSpec spec;
    spec.ar_coeffs = {{1, 0.3}};
    SimConfig sim;
    sim.length = 300;
    sim.seed = 33;
    LoadedSeries input;
    input.is_prices = false;
    input.returns = simulate(spec, sim);

    const Json a = analyze_series(input, "x.csv", opt);
    const std::size_t files_after_first =
        std::distance(std::filesystem::directory_iterator(*opt.store_dir),
                      std::filesystem::directory_iterator{});
    CHECK(files_after_first >= 3);  // three variants per length

    const Json b = analyze_series(input, "x.csv", opt);  // cache hit
    CHECK(a.dump() == b.dump());

    const auto& lags = a.at("prefilter").at("selected_lags");
    if (!lags.empty()) {
        const std::size_t n_raw = a.at("input").at("n_returns").get<std::size_t>();
        const std::size_t n_filtered =
            a.at("prefilter").at("residual_length").get<std::size_t>();
        CHECK(n_filtered < n_raw);
        // Filtered tests reference a panel computed at the residual length.
        const auto& cv_f = a.at("critical_values").at("filtered").at("H").at("config");
        CHECK(cv_f.at("series_length").get<std::size_t>() == n_filtered);
    }
}

TEST_CASE("table rendering contains the headline numbers") {
    const auto input = synthetic_input(400, 5);
    const Json report = analyze_series(input, "t.csv", fast_options());
    const std::string table = render_report_table(report);
    CHECK(table.find("Rescaled range analysis") != std::string::npos);
    CHECK(table.find("unfiltered") != std::string::npos);
    CHECK(table.find("Descriptive statistics") != std::string::npos);
}
