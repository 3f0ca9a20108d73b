#pragma once

#include "k4f/graph.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace k4f {

struct Checkpoint {
    enum class Kind { step, edges };
    Kind kind;
    std::uint64_t value;
};

// Parsed from a comma-separated list of "t:<steps>", "m:<edges>" or
// "mr:<ratio>" (edges = ceil(ratio * n^{8/5})). Empty or "none" means no
// intermediate checkpoints; a final record is always emitted.
class CheckpointSchedule {
public:
    CheckpointSchedule() = default;
    explicit CheckpointSchedule(std::vector<Checkpoint> items) : items_(std::move(items)) {}

    static CheckpointSchedule parse(std::string_view spec, std::size_t n);

    const std::vector<Checkpoint>& items() const noexcept { return items_; }
    bool empty() const noexcept { return items_.empty(); }

private:
    std::vector<Checkpoint> items_;
};

struct RunRecord {
    std::uint64_t step = 0;
    std::uint64_t m = 0;
    std::uint64_t open = 0;
    std::array<double, 5> xbar{};   // mean |X_j(f)|, j = 1..5, over sampled open f
    std::array<double, 5> xsd{};
    std::uint32_t sampled = 0;
    double wall_ms = 0.0;
};

struct GreedyConfig {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    CheckpointSchedule checkpoints;
    std::uint32_t sample_size = 200;
    std::optional<std::uint64_t> stop_at_m;
    bool record_timing = false;
    std::size_t max_vertices = default_max_vertices;
};

struct GreedyRun {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    Graph graph{0};
    Graph traversed{0};
    std::uint64_t steps = 0;
    bool exhausted = false;
    std::vector<RunRecord> records;
};

// Uniformly random traversal order of all pairs; each pair is added unless
// it closes a K4. Deterministic in (n, seed, checkpoints).
GreedyRun run_greedy(const GreedyConfig& config);

// Observables of one state: |O| and sampled |X_j(f)| statistics.
RunRecord observe(const Graph& m, const Graph& trav, std::uint64_t step, std::uint32_t sample_size,
                  std::uint64_t sample_key);

// CSV schema: step,m,open,xbar1..xbar5,xsd1..xsd5,wall_ms
std::string run_record_header();
std::string to_csv_row(const RunRecord& r);

} // namespace k4f
