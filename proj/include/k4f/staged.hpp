#pragma once

#include "k4f/graph.hpp"
#include "k4f/trajectory.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace k4f {

enum class Profile { desk, paper, custom };

Profile parse_profile(std::string_view s);
const char* to_string(Profile p) noexcept;

// Parameters of the staged (bite) process.
//
// Sampling probabilities per round i:
//   BIGBite from NotTrav_i     n^{eps3 - 2/5}
//   BigBite from BIGBite       n^{eps2 - eps3}
//   Bite from BigBite          n^{-eps1 - eps2} / (1 - i n^{-eps1 - eps2})
// so a pair of NotTrav_i lands in Bite with n^{-eps1 - 2/5} / (1 - i n^{-eps1 - eps2}).
struct ProcessParams {
    std::size_t n = 0;
    double eps1 = 0.3;
    double eps2 = 0.15;
    double eps3 = 0.25;
    long rounds = 0;                 // I
    double C = 1.0;
    std::size_t s = 0;
    std::uint64_t seed = 0xC0FFEE;
    Profile profile = Profile::desk;
    double denominator_floor = 0.1;

    static ProcessParams desk(std::size_t n, std::uint64_t seed = 0xC0FFEE);
    static ProcessParams paper(std::size_t n, std::uint64_t seed = 0xC0FFEE);
    static ProcessParams for_profile(Profile p, std::size_t n, std::uint64_t seed = 0xC0FFEE);

    // floor(n^{eps1 + eps1^2})
    static long default_rounds(std::size_t n, double eps1);
    // ceil(C n^{3/5} (ln n)^{1/5})
    static std::size_t default_s(std::size_t n, double C);

    // Throws ConfigError listing every violated constraint.
    void validate() const;

    double outer_probability() const;
    double inner_probability() const;
    double bite_denominator(long i) const;
    double bite_probability(long i) const;
    double oneshot_probability(long i) const;
};

struct StageState {
    long round = 0;
    Graph m{0};
    Graph trav{0};
    std::vector<EdgeId> big_bite_outer;   // BIGBite
    std::vector<EdgeId> big_bite_inner;   // BigBite
    std::vector<EdgeId> bite;             // in traversal (birthtime) order
    std::vector<double> birthtimes;       // aligned with bite

    static StageState initial(std::size_t n, std::size_t max_vertices = default_max_vertices);
};

// One round via the three nested thinnings.
StageState step(StageState state, const ProcessParams& params);
// One round sampling Bite directly from NotTrav; intermediate sets stay empty.
StageState step_oneshot(StageState state, const ProcessParams& params);

struct BandEntry {
    double empirical = 0;
    double predicted = 0;
    double relative_deviation = 0;   // (empirical - predicted) / predicted, 0 when both vanish
    double envelope = 0;             // half-width of the tracked band, relative
};

struct EventAReport {
    long round = 0;
    double scaled_time = 0;
    BandEntry edges;                 // A1
    BandEntry open;                  // A2
    std::array<BandEntry, 5> completions;   // A3, j = 1..5
    double pairs_correction = 0;     // C(n,2) / (n^2/2)
    std::uint32_t sampled = 0;
};

EventAReport measure_event_A(const StageState& state, const ProcessParams& params, const TrajectoryTable& table,
                             std::uint32_t sample_size);

enum class StageVariant { nested, oneshot };

struct RoundRecord {
    long round = 0;
    std::size_t big_bite_outer = 0;
    std::size_t big_bite_inner = 0;
    std::size_t bite = 0;
    std::size_t m = 0;
    std::size_t open = 0;
    double dev_a1 = 0;
    double dev_a2 = 0;
    std::array<double, 5> dev_a3{};
};

struct StagedRun {
    StageState final_state;
    std::vector<RoundRecord> rounds;
};

// Runs all configured rounds. With a table, every round is measured against
// the event-A envelopes; without one only the set sizes and |M| are recorded.
StagedRun run_staged(const ProcessParams& params, StageVariant variant, const TrajectoryTable* table = nullptr,
                     std::uint32_t sample_size = 200);

// CSV schema: i,bigbite,bigbite2,bite,m,open,devA1,devA2,devA3_j1..devA3_j5
std::string round_record_header();
std::string to_csv_row(const RoundRecord& r);

} // namespace k4f
