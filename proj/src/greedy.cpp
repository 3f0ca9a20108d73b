#include "k4f/greedy.hpp"

#include "k4f/errors.hpp"
#include "k4f/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace k4f {

namespace {

std::uint64_t parse_uint(std::string_view s, std::string_view item)
{
    std::uint64_t v = 0;
    if (s.empty())
        throw ConfigError("checkpoint '" + std::string(item) + "': missing value");
    for (char c : s) {
        if (c < '0' || c > '9')
            throw ConfigError("checkpoint '" + std::string(item) + "': not an integer");
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

} // namespace

CheckpointSchedule CheckpointSchedule::parse(std::string_view spec, std::size_t n)
{
    std::vector<Checkpoint> items;
    if (spec.empty() || spec == "none")
        return CheckpointSchedule(std::move(items));
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const auto comma = spec.find(',', pos);
        const auto item = spec.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        const auto colon = item.find(':');
        if (colon == std::string_view::npos)
            throw ConfigError("checkpoint '" + std::string(item) + "': expected kind:value");
        const auto kind = item.substr(0, colon);
        const auto value = item.substr(colon + 1);
        if (kind == "t") {
            items.push_back({Checkpoint::Kind::step, parse_uint(value, item)});
        } else if (kind == "m") {
            items.push_back({Checkpoint::Kind::edges, parse_uint(value, item)});
        } else if (kind == "mr") {
            double r = 0;
            try {
                r = std::stod(std::string(value));
            } catch (const std::exception&) {
                throw ConfigError("checkpoint '" + std::string(item) + "': not a number");
            }
            if (!(r >= 0))
                throw ConfigError("checkpoint '" + std::string(item) + "': ratio must be nonnegative");
            const double m = std::ceil(r * std::pow(static_cast<double>(n), 1.6));
            items.push_back({Checkpoint::Kind::edges, static_cast<std::uint64_t>(m)});
        } else {
            throw ConfigError("checkpoint kind '" + std::string(kind) + "' unknown (t, m, mr)");
        }
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return CheckpointSchedule(std::move(items));
}

RunRecord observe(const Graph& m, const Graph& trav, std::uint64_t step, std::uint32_t sample_size,
                  std::uint64_t sample_key)
{
    RunRecord rec;
    rec.step = step;
    rec.m = m.edge_count();
    const Graph open = open_pairs(m, trav);
    rec.open = open.edge_count();

    auto candidates = open.edges();
    const std::size_t take = std::min<std::size_t>(sample_size, candidates.size());
    CounterRng rng(sample_key);
    for (std::size_t k = 0; k < take; ++k) {
        const auto r = k + rng.below(candidates.size() - k);
        std::swap(candidates[k], candidates[r]);
    }
    rec.sampled = static_cast<std::uint32_t>(take);
    if (take == 0)
        return rec;

    std::array<double, 5> sum{}, sumsq{};
    for (std::size_t k = 0; k < take; ++k) {
        const auto counts = completion_counts(m, open, candidates[k].first, candidates[k].second);
        for (int j = 1; j <= 5; ++j) {
            const auto c = static_cast<double>(counts[static_cast<std::size_t>(j)]);
            sum[j - 1] += c;
            sumsq[j - 1] += c * c;
        }
    }
    const auto t = static_cast<double>(take);
    for (int j = 0; j < 5; ++j) {
        rec.xbar[j] = sum[j] / t;
        rec.xsd[j] = take > 1 ? std::sqrt(std::max(0.0, (sumsq[j] - t * rec.xbar[j] * rec.xbar[j]) / (t - 1))) : 0.0;
    }
    return rec;
}

GreedyRun run_greedy(const GreedyConfig& config)
{
    const std::size_t n = config.n;
    if (n < 4)
        throw ConfigError("greedy process needs n >= 4");
    const auto clock_start = std::chrono::steady_clock::now();

    GreedyRun run;
    run.n = n;
    run.seed = config.seed;
    run.graph = Graph(n, config.max_vertices);
    run.traversed = Graph(n, config.max_vertices);

    const EdgeCodec codec(n);
    const std::uint64_t pairs = codec.pair_count();
    std::vector<std::uint32_t> order(pairs);
    std::iota(order.begin(), order.end(), 0U);
    CounterRng perm_rng(derive_key({config.seed, n, static_cast<std::uint64_t>(DrawTag::greedy_permutation)}));

    // pending checkpoints, consumed in order of the threshold they test
    std::vector<std::uint64_t> step_marks, edge_marks;
    for (const auto& c : config.checkpoints.items())
        (c.kind == Checkpoint::Kind::step ? step_marks : edge_marks).push_back(c.value);
    std::sort(step_marks.begin(), step_marks.end());
    std::sort(edge_marks.begin(), edge_marks.end());
    std::size_t next_step = 0, next_edge = 0;
    std::uint32_t checkpoint_index = 0;

    auto record = [&](std::uint64_t step) {
        const auto key = derive_key({config.seed, n, static_cast<std::uint64_t>(DrawTag::sample), checkpoint_index++});
        RunRecord rec = observe(run.graph, run.traversed, step, config.sample_size, key);
        if (config.record_timing)
            rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - clock_start).count();
        run.records.push_back(rec);
    };

    // checkpoints with threshold 0 fire before any traversal
    bool fired = false;
    while (next_step < step_marks.size() && step_marks[next_step] == 0)
        ++next_step, fired = true;
    while (next_edge < edge_marks.size() && edge_marks[next_edge] == 0)
        ++next_edge, fired = true;
    if (fired)
        record(0);

    std::uint64_t t = 0;
    bool stopped = false;
    for (; t < pairs; ++t) {
        const auto r = t + perm_rng.below(pairs - t);
        std::swap(order[t], order[r]);
        const auto [u, v] = codec.decode(order[t]);
        run.traversed.add_edge(u, v);
        if (!creates_k4(run.graph, u, v))
            run.graph.add_edge(u, v);

        const std::uint64_t step = t + 1;
        const std::uint64_t m = run.graph.edge_count();
        fired = false;
        while (next_step < step_marks.size() && step_marks[next_step] <= step)
            ++next_step, fired = true;
        while (next_edge < edge_marks.size() && edge_marks[next_edge] <= m)
            ++next_edge, fired = true;
        if (fired)
            record(step);
        if (config.stop_at_m && m >= *config.stop_at_m) {
            ++t;
            stopped = true;
            break;
        }
    }
    run.steps = t;
    run.exhausted = !stopped && t == pairs;
    if (run.records.empty() || run.records.back().step != run.steps)
        record(run.steps);
    return run;
}

std::string run_record_header()
{
    return "step,m,open,xbar1,xbar2,xbar3,xbar4,xbar5,xsd1,xsd2,xsd3,xsd4,xsd5,wall_ms";
}

std::string to_csv_row(const RunRecord& r)
{
    std::ostringstream os;
    os.precision(10);
    os << r.step << ',' << r.m << ',' << r.open;
    for (double x : r.xbar)
        os << ',' << x;
    for (double x : r.xsd)
        os << ',' << x;
    os << ',' << r.wall_ms;
    return os.str();
}

} // namespace k4f
