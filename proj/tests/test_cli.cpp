// End-to-end checks of the command-line tool: exit codes, determinism of
// emitted reports, and consistency of composed subcommands with the
// monolithic analyze path. The binary path arrives as argv[1].
#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "json.hpp"

namespace {

std::string g_cli;
std::filesystem::path g_tmp;

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
    const auto out_file = g_tmp / "stdout.txt";
    const std::string cmd = g_cli + " " + args + " > " + out_file.string() + " 2> " +
                            (g_tmp / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::stringstream buf;
    buf << in.rdbuf();
    return {WEXITSTATUS(status), buf.str()};
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

}  // namespace

TEST_CASE("simulate is deterministic and composes with rra like analyze") {
    const auto series = g_tmp / "sim.csv";
    auto r1 = run_cli("simulate --T 400 --d 0.1 --seed 7 --out " + series.string());
    REQUIRE(r1.exit_code == 0);
    auto r2 = run_cli("simulate --T 400 --d 0.1 --seed 7");
    std::ifstream in(series);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(r2.stdout_text == buf.str());

    auto rra = run_cli("rra --input " + series.string());
    REQUIRE(rra.exit_code == 0);
    const auto j = nlohmann::json::parse(rra.stdout_text);
    CHECK(j.at("rra").contains("H"));
    CHECK(j.at("config").at("grid_scales").size() == 40);

    // Piped composition equals the file path, and both match analyze.
    auto piped = run_cli("simulate --T 400 --d 0.1 --seed 7 | " + g_cli + " rra --input -");
    CHECK(piped.exit_code == 0);
    const auto jp = nlohmann::json::parse(piped.stdout_text);
    CHECK(jp.at("rra").at("H").get<double>() == j.at("rra").at("H").get<double>());

    auto analyzed = run_cli("analyze --input " + series.string() + " --reps 120");
    REQUIRE(analyzed.exit_code == 0);
    const auto ja = nlohmann::json::parse(analyzed.stdout_text);
    CHECK(ja.at("rra").at("unfiltered").at("H").get<double>() ==
          j.at("rra").at("H").get<double>());
}

TEST_CASE("critical-values is byte-identical across runs and caches") {
    const std::string store = (g_tmp / "cvstore").string();
    const std::string args =
        "critical-values --T 256 --reps 120 --seed 42 --grid-max 3.7 --store " + store;
    auto a = run_cli(args);
    REQUIRE(a.exit_code == 0);
    auto b = run_cli(args);  // second run hits the cache
    CHECK(a.stdout_text == b.stdout_text);

    auto serial = run_cli(
        "critical-values --T 256 --reps 120 --seed 42 --grid-max 3.7 --workers 1");
    CHECK(serial.stdout_text == a.stdout_text);
}

TEST_CASE("analyze emits a reproducible report and an error code on bad input") {
    const auto series = g_tmp / "input.csv";
    run_cli("simulate --T 300 --seed 3 --out " + series.string());

    const std::string args = "analyze --input " + series.string() + " --reps 120 --seed 5";
    auto a = run_cli(args);
    REQUIRE(a.exit_code == 0);
    auto b = run_cli(args);
    CHECK(a.stdout_text == b.stdout_text);

    auto table = run_cli(args + " --format table");
    CHECK(table.exit_code == 0);
    CHECK(table.stdout_text.find("Rescaled range analysis") != std::string::npos);

    const auto stats_csv = g_tmp / "stats.csv";
    auto with_stats = run_cli(args + " --stats-csv " + stats_csv.string());
    CHECK(with_stats.exit_code == 0);
    std::ifstream stats_in(stats_csv);
    std::string header;
    std::getline(stats_in, header);
    CHECK(header == "series,scale,n_obs,mean,std_dev,skewness,kurtosis");
    int rows = 0;
    for (std::string line; std::getline(stats_in, line);) ++rows;
    CHECK(rows == 8);  // raw + shuffled, four scales each

    auto missing = run_cli("analyze --input " + (g_tmp / "nope.csv").string());
    CHECK(missing.exit_code == 1);

    // A long constant segment inside an otherwise varying series trips the
    // zero-variance subperiod error inside the rescaled-range stage.
    {
        std::ostringstream csv;
        csv << "value\n";
        for (int i = 0; i < 150; ++i) csv << (i % 2 ? 0.01 : -0.01) << "\n";
        for (int i = 0; i < 60; ++i) csv << "0.0\n";
        for (int i = 0; i < 90; ++i) csv << (i % 2 ? 0.02 : -0.015) << "\n";
        write_file(g_tmp / "degenerate.csv", csv.str());
    }
    auto degenerate = run_cli("analyze --input " + (g_tmp / "degenerate.csv").string() +
                              " --reps 120");
    CHECK(degenerate.exit_code == 2);

    auto bad_cfg = run_cli("analyze --input " + series.string() + " --tail sideways");
    CHECK(bad_cfg.exit_code == 3);
}

TEST_CASE("prefilter and shuffle subcommands") {
    const auto series = g_tmp / "ar.csv";
    run_cli("simulate --T 2608 --ar 1:0.3 --seed 11 --out " + series.string());

    const auto residuals = g_tmp / "resid.csv";
    auto pf = run_cli("prefilter --input " + series.string() + " --residuals-out " +
                      residuals.string());
    REQUIRE(pf.exit_code == 0);
    const auto j = nlohmann::json::parse(pf.stdout_text);
    CHECK(j.contains("selected_lags"));
    CHECK(std::filesystem::exists(residuals));

    auto sh1 = run_cli("shuffle --input " + series.string() + " --seed 9");
    auto sh2 = run_cli("shuffle --input " + series.string() + " --seed 9");
    CHECK(sh1.exit_code == 0);
    CHECK(sh1.stdout_text == sh2.stdout_text);
}

TEST_CASE("LONGMEM_SEED provides the default master seed") {
    auto a = run_cli("simulate --T 64 --seed 99");
    setenv("LONGMEM_SEED", "99", 1);
    auto b = run_cli("simulate --T 64");
    unsetenv("LONGMEM_SEED");
    CHECK(a.stdout_text == b.stdout_text);
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <path-to-longmem-binary>\n");
        return 1;
    }
    g_cli = argv[1];
    g_tmp = std::filesystem::temp_directory_path() /
            ("longmem-cli-test-" + std::to_string(::getpid()));
    std::filesystem::create_directories(g_tmp);

    doctest::Context context;
    context.applyCommandLine(argc - 1, argv + 1);
    const int res = context.run();
    std::filesystem::remove_all(g_tmp);
    return res;
}
