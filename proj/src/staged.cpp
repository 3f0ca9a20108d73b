#include "k4f/staged.hpp"

#include "k4f/errors.hpp"
#include "k4f/greedy.hpp"
#include "k4f/rng.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

namespace k4f {

Profile parse_profile(std::string_view s)
{
    if (s == "desk")
        return Profile::desk;
    if (s == "paper")
        return Profile::paper;
    if (s == "custom")
        return Profile::custom;
    throw ConfigError("unknown profile '" + std::string(s) + "' (desk, paper, custom)");
}

const char* to_string(Profile p) noexcept
{
    switch (p) {
    case Profile::desk:
        return "desk";
    case Profile::paper:
        return "paper";
    case Profile::custom:
        return "custom";
    }
    return "?";
}

long ProcessParams::default_rounds(std::size_t n, double eps1)
{
    return static_cast<long>(std::floor(std::pow(static_cast<double>(n), eps1 + eps1 * eps1)));
}

std::size_t ProcessParams::default_s(std::size_t n, double C)
{
    const double nn = static_cast<double>(n);
    return static_cast<std::size_t>(std::ceil(C * std::pow(nn, 0.6) * std::pow(std::log(nn), 0.2)));
}

ProcessParams ProcessParams::desk(std::size_t n, std::uint64_t seed)
{
    ProcessParams p;
    p.n = n;
    p.eps1 = 0.3;
    p.eps2 = 0.15;
    p.eps3 = 0.25;
    p.rounds = default_rounds(n, p.eps1);
    p.s = default_s(n, p.C);
    p.seed = seed;
    p.profile = Profile::desk;
    return p;
}

ProcessParams ProcessParams::paper(std::size_t n, std::uint64_t seed)
{
    ProcessParams p;
    p.n = n;
    p.eps3 = 0.005;
    p.eps2 = 1e4 * p.eps3 * p.eps3 * p.eps3;
    p.eps1 = 0.001;
    p.rounds = default_rounds(n, p.eps1);
    p.s = default_s(n, p.C);
    p.seed = seed;
    p.profile = Profile::paper;
    return p;
}

ProcessParams ProcessParams::for_profile(Profile prof, std::size_t n, std::uint64_t seed)
{
    return prof == Profile::paper ? paper(n, seed) : desk(n, seed);
}

void ProcessParams::validate() const
{
    std::vector<std::string> problems;
    if (n < 4)
        problems.emplace_back("n must be at least 4");
    if (!(eps1 > 0) || !(eps2 > 0) || !(eps3 > 0))
        problems.emplace_back("eps1, eps2, eps3 must be positive");
    if (!(eps3 < 0.4))
        problems.emplace_back("eps3 must be below 2/5");
    if (!(eps2 <= eps3))
        problems.emplace_back("eps2 must not exceed eps3 (BigBite probability n^{eps2-eps3} <= 1)");
    if (rounds < 0)
        problems.emplace_back("round count must be nonnegative");
    if (!(denominator_floor > 0 && denominator_floor < 1))
        problems.emplace_back("denominator floor must lie in (0,1)");
    if (problems.empty() && n >= 4 && rounds > 0) {
        const long last = rounds - 1;
        if (bite_denominator(last) < denominator_floor)
            problems.emplace_back("Bite denominator 1 - i n^{-eps1-eps2} falls below " +
                                  std::to_string(denominator_floor) + " at round " + std::to_string(last));
        else if (bite_probability(last) > 1.0)
            problems.emplace_back("Bite probability exceeds 1 at round " + std::to_string(last));
    }
    if (!problems.empty()) {
        std::string msg = "invalid process parameters:";
        for (const auto& p : problems)
            msg += "\n  - " + p;
        throw ConfigError(msg);
    }
}

double ProcessParams::outer_probability() const { return std::pow(static_cast<double>(n), eps3 - 0.4); }

double ProcessParams::inner_probability() const { return std::pow(static_cast<double>(n), eps2 - eps3); }

double ProcessParams::bite_denominator(long i) const
{
    return 1.0 - static_cast<double>(i) * std::pow(static_cast<double>(n), -eps1 - eps2);
}

double ProcessParams::bite_probability(long i) const
{
    return std::pow(static_cast<double>(n), -eps1 - eps2) / bite_denominator(i);
}

double ProcessParams::oneshot_probability(long i) const
{
    return std::pow(static_cast<double>(n), -eps1 - 0.4) / bite_denominator(i);
}

StageState StageState::initial(std::size_t n, std::size_t max_vertices)
{
    StageState s;
    s.round = 0;
    s.m = Graph(n, max_vertices);
    s.trav = Graph(n, max_vertices);
    return s;
}

namespace {

std::uint64_t stage_key(const ProcessParams& p, long round, DrawTag tag)
{
    return derive_key({p.seed, p.n, static_cast<std::uint64_t>(round), static_cast<std::uint64_t>(tag)});
}

void check_round(const StageState& state, const ProcessParams& params)
{
    params.validate();
    if (state.m.n() != params.n || state.trav.n() != params.n)
        throw PreconditionError("stage state does not match n");
    if (state.round >= params.rounds)
        throw PreconditionError("round " + std::to_string(state.round) + " is past the last round " +
                                std::to_string(params.rounds - 1));
    if (params.bite_denominator(state.round) < params.denominator_floor)
        throw ConfigError("Bite denominator below floor at round " + std::to_string(state.round));
}

// Calls fn(id, u, v) for every not-traversed pair in canonical order.
template <class Fn>
void for_each_untraversed(const Graph& trav, Fn&& fn)
{
    const std::size_t n = trav.n();
    EdgeId id = 0;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v, ++id)
            if (!trav.has_edge(u, v))
                fn(id, u, v);
}

// Assigns birthtimes, orders by (birthtime, id) and traverses.
void traverse_bite(StageState& state, const ProcessParams& params)
{
    const auto key = stage_key(params, state.round, DrawTag::birthtime);
    std::vector<std::pair<double, EdgeId>> order;
    order.reserve(state.bite.size());
    for (auto id : state.bite)
        order.emplace_back(unit_at(key, id), id);
    std::sort(order.begin(), order.end());
    const EdgeCodec codec(params.n);
    state.bite.clear();
    state.birthtimes.clear();
    for (const auto& [b, id] : order) {
        state.bite.push_back(id);
        state.birthtimes.push_back(b);
        const auto [u, v] = codec.decode(id);
        state.trav.add_edge(u, v);
        if (!creates_k4(state.m, u, v))
            state.m.add_edge(u, v);
    }
    ++state.round;
}

} // namespace

StageState step(StageState state, const ProcessParams& params)
{
    check_round(state, params);
    const double p_outer = params.outer_probability();
    const double p_inner = params.inner_probability();
    const double p_bite = params.bite_probability(state.round);
    const auto k_outer = stage_key(params, state.round, DrawTag::big_bite_outer);
    const auto k_inner = stage_key(params, state.round, DrawTag::big_bite_inner);
    const auto k_bite = stage_key(params, state.round, DrawTag::bite);

    state.big_bite_outer.clear();
    state.big_bite_inner.clear();
    state.bite.clear();
    for_each_untraversed(state.trav, [&](EdgeId id, Vertex, Vertex) {
        if (unit_at(k_outer, id) < p_outer)
            state.big_bite_outer.push_back(id);
    });
    for (auto id : state.big_bite_outer)
        if (unit_at(k_inner, id) < p_inner)
            state.big_bite_inner.push_back(id);
    for (auto id : state.big_bite_inner)
        if (unit_at(k_bite, id) < p_bite)
            state.bite.push_back(id);
    traverse_bite(state, params);
    return state;
}

StageState step_oneshot(StageState state, const ProcessParams& params)
{
    check_round(state, params);
    const double p = params.oneshot_probability(state.round);
    const auto key = stage_key(params, state.round, DrawTag::bite_oneshot);
    state.big_bite_outer.clear();
    state.big_bite_inner.clear();
    state.bite.clear();
    for_each_untraversed(state.trav, [&](EdgeId id, Vertex, Vertex) {
        if (unit_at(key, id) < p)
            state.bite.push_back(id);
    });
    traverse_bite(state, params);
    return state;
}

namespace {

BandEntry band(double empirical, double predicted, double envelope)
{
    BandEntry b;
    b.empirical = empirical;
    b.predicted = predicted;
    b.envelope = envelope;
    if (predicted != 0.0)
        b.relative_deviation = (empirical - predicted) / predicted;
    else
        b.relative_deviation = empirical == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return b;
}

} // namespace

EventAReport measure_event_A(const StageState& state, const ProcessParams& params, const TrajectoryTable& table,
                             std::uint32_t sample_size)
{
    const TrajectoryModel model(static_cast<double>(params.n), params.eps1, params.eps2, table);
    const long i = state.round;
    const double nn = static_cast<double>(params.n);
    EventAReport rep;
    rep.round = i;
    rep.scaled_time = model.scaled_time(i);
    const double Phi = model.Phi_at(i);   // throws past the table
    const double phi = phi_of(Phi);
    const double Gamma = model.Gamma(i);
    rep.pairs_correction = (nn * (nn - 1) / 2) / (0.5 * nn * nn);

    const auto key = derive_key({params.seed, params.n, static_cast<std::uint64_t>(i),
                                 static_cast<std::uint64_t>(DrawTag::sample)});
    const RunRecord obs = observe(state.m, state.trav, 0, sample_size, key);
    rep.sampled = obs.sampled;
    rep.edges = band(static_cast<double>(obs.m), 0.5 * std::pow(nn, 1.6) * Phi, 100 * Gamma);
    rep.open = band(static_cast<double>(obs.open), 0.5 * nn * nn * phi, 100 * Gamma);
    for (int j = 1; j <= 5; ++j)
        rep.completions[j - 1] = band(obs.xbar[j - 1], x_formula(nn, j, Phi, phi), 1000 * Gamma);
    return rep;
}

StagedRun run_staged(const ProcessParams& params, StageVariant variant, const TrajectoryTable* table,
                     std::uint32_t sample_size)
{
    params.validate();
    StagedRun run;
    run.final_state = StageState::initial(params.n);
    auto& st = run.final_state;
    auto record = [&] {
        RoundRecord r;
        r.round = st.round;
        r.big_bite_outer = st.big_bite_outer.size();
        r.big_bite_inner = st.big_bite_inner.size();
        r.bite = st.bite.size();
        r.m = st.m.edge_count();
        if (table) {
            const auto rep = measure_event_A(st, params, *table, sample_size);
            r.open = static_cast<std::size_t>(rep.open.empirical);
            r.dev_a1 = rep.edges.relative_deviation;
            r.dev_a2 = rep.open.relative_deviation;
            for (int j = 0; j < 5; ++j)
                r.dev_a3[j] = rep.completions[j].relative_deviation;
        }
        run.rounds.push_back(r);
    };
    record();
    while (st.round < params.rounds) {
        st = variant == StageVariant::nested ? step(std::move(st), params) : step_oneshot(std::move(st), params);
        record();
    }
    return run;
}

std::string round_record_header()
{
    return "i,bigbite,bigbite2,bite,m,open,devA1,devA2,devA3_j1,devA3_j2,devA3_j3,devA3_j4,devA3_j5";
}

std::string to_csv_row(const RoundRecord& r)
{
    std::ostringstream os;
    os.precision(10);
    os << r.round << ',' << r.big_bite_outer << ',' << r.big_bite_inner << ',' << r.bite << ',' << r.m << ','
       << r.open << ',' << r.dev_a1 << ',' << r.dev_a2;
    for (double d : r.dev_a3)
        os << ',' << d;
    return os.str();
}

} // namespace k4f
