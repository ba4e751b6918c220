#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "longmem/csv.hpp"
#include "longmem/mc.hpp"
#include "longmem/prefilter.hpp"

namespace longmem {

using Json = nlohmann::ordered_json;

Json to_json(const DescriptiveStats& s);
Json to_json(const RsPoint& p);
Json to_json(const RraResult& r);
Json to_json(const SparseArFit& fit);
Json to_json(const mc::CriticalValues& cv);
Json to_json(const mc::TestVerdict& v);
Json to_json(const mc::PowerResult& p);
Json to_json(const std::vector<mc::BiasRow>& rows);

mc::CriticalValues critical_values_from_json(const Json& j);

/// On-disk cache of null critical values, one JSON file per configuration,
/// keyed by a stable hash of the full configuration. Writes are atomic
/// (temp file + rename).
class CriticalValuesStore {
  public:
    explicit CriticalValuesStore(std::filesystem::path dir);

    struct Key {
        std::size_t series_length = 0;
        mc::EstimatorVariant variant = mc::EstimatorVariant::h;
        mc::PrefilterMode prefilter = mc::PrefilterMode::none();
        std::size_t replications = 0;
        std::uint64_t master_seed = 0;
        std::vector<int> grid_scales;
        int knot = 40;
    };

    static std::string key_hash(const Key& key);

    std::optional<mc::CriticalValues> load(const Key& key) const;
    void save(const Key& key, const mc::CriticalValues& cv) const;

    const std::filesystem::path& directory() const { return dir_; }

  private:
    std::filesystem::path dir_;
};

struct AnalyzeOptions {
    int knot = 40;
    double grid_ln_min = 1.6;
    double grid_ln_max = 5.7;
    double grid_step = 0.1;
    mc::Tail tail = mc::Tail::two_sided;
    std::size_t cv_replications = 5000;
    std::uint64_t master_seed = 0;
    std::optional<std::string> store_dir;
    int workers = 0;
    std::uint64_t shuffle_seed = 1;
    int prefilter_max_lag = 10;
};

/// Full pipeline: returns (from prices if needed) -> per-scale descriptive
/// statistics for the raw series and a shuffled surrogate -> PACF-selected
/// sparse AR pre-filter -> RRA on filtered and unfiltered series ->
/// hypothesis tests against length-matched null critical values.
/// The report embeds every setting needed to reproduce itself.
Json analyze_series(const LoadedSeries& input, const std::string& input_path,
                    const AnalyzeOptions& options);

/// Text rendering of an analysis report (the --format table view).
std::string render_report_table(const Json& report);

}  // namespace longmem
