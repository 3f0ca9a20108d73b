#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace k4f {

inline constexpr std::string_view artifact_version = "1.0.0";
inline constexpr std::uint64_t default_master_seed = 0xC0FFEE;

enum class ExperimentKind { greedy, staged, survival, ramsey, trajectory };

ExperimentKind parse_kind(std::string_view s);
const char* to_string(ExperimentKind k) noexcept;

// Inclusive seed range; "a..b" or a single integer. b < a is empty.
std::vector<std::uint64_t> parse_seed_range(std::string_view spec);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::greedy;
    std::vector<std::size_t> n_grid;       // for survival: the child counts k
    std::vector<std::uint64_t> seeds;
    std::uint64_t master_seed = default_master_seed;
    nlohmann::json params = nlohmann::json::object();
    std::filesystem::path out_dir;
    unsigned jobs = 0;                     // 0: available cores
    bool record_timing = false;

    // Throws ConfigError naming every violated constraint.
    void validate() const;

    nlohmann::json to_json() const;        // excludes out_dir, jobs
    static ExperimentConfig from_json(const nlohmann::json& j);
    std::string hash() const;
};

// Per-cell RNG key: distinct (master, kind, n, seed) tuples get distinct streams.
std::uint64_t cell_seed(std::uint64_t master_seed, ExperimentKind kind, std::size_t n, std::uint64_t seed);

std::filesystem::path cell_path(const std::filesystem::path& out_dir, std::size_t n, std::uint64_t seed);

struct ExperimentSummary {
    std::size_t cells = 0;
    std::size_t computed = 0;
    std::size_t skipped = 0;               // already complete on disk
    std::size_t failed = 0;
    bool complete() const noexcept { return failed == 0; }
};

// Executes every (n, seed) cell once, writing <out>/cells/n<N>_seed<S>.csv
// atomically plus a ".done" marker, and <out>/manifest.json. Cells with a
// marker are skipped on rerun.
ExperimentSummary run_experiment(const ExperimentConfig& config);

// Runs one cell and returns its CSV text (what run_experiment writes).
std::string run_cell(const ExperimentConfig& config, std::size_t n, std::uint64_t seed);

struct ScalingPoint {
    std::size_t n = 0;
    double m = 0;
};

struct ScalingRow {
    std::size_t n = 0;
    std::size_t samples = 0;
    double mean_m = 0;
    double ratio = 0;                      // mean_m / (n^{8/5} (ln n)^{log_exponent})
};

struct ScalingFit {
    double log_exponent = 0.2;
    double c = 0;
    std::vector<ScalingRow> rows;
    double dispersion = 0;                 // max ratio / min ratio
    bool monotone_trend = false;           // ratios strictly monotone in n
};

// Least squares for c in log space: log m = log c + log(n^{8/5} (ln n)^e).
// Needs at least 3 distinct n with at least 5 records each.
ScalingFit fit_scaling(const std::vector<ScalingPoint>& records, double log_exponent = 0.2);

struct ReportSummary {
    std::vector<std::string> written;
};

// Reads a result tree and writes summary CSVs (scaling.csv, e6.csv,
// eventA.csv, survival.csv, trajectory.csv as applicable) plus summary.json.
ReportSummary write_report(const std::filesystem::path& in_dir, const std::filesystem::path& out_dir);

// Write-to-temp then rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace k4f
