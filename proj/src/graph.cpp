#include "k4f/graph.hpp"

#include "k4f/errors.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace k4f {

namespace {

thread_local std::vector<std::uint64_t> scratch_common;

// Does the vertex set given by `set` contain an edge of m?
bool contains_edge(const Graph& m, std::span<const std::uint64_t> set)
{
    const std::size_t words = set.size();
    for (std::size_t k = 0; k < words; ++k) {
        std::uint64_t w = set[k];
        while (w) {
            const int b = std::countr_zero(w);
            w &= w - 1;
            const Vertex a = static_cast<Vertex>(k * 64 + b);
            const auto ra = m.row(a);
            // only neighbours above a need checking
            if (ra[k] & w)
                return true;
            for (std::size_t q = k + 1; q < words; ++q)
                if (ra[q] & set[q])
                    return true;
        }
    }
    return false;
}

void check_vertex(const Graph& g, Vertex u)
{
    if (u >= g.n())
        throw PreconditionError("vertex " + std::to_string(u) + " out of range");
}

} // namespace

EdgeId EdgeCodec::encode(Vertex u, Vertex v) const
{
    if (u == v || u >= n_ || v >= n_)
        throw PreconditionError("invalid pair for edge encoding");
    if (u > v)
        std::swap(u, v);
    return row_start(u) + (v - u - 1);
}

std::pair<Vertex, Vertex> EdgeCodec::decode(EdgeId id) const
{
    if (id >= pair_count())
        throw PreconditionError("edge id out of range");
    // row_start(u) = u(2n - u - 1)/2; invert and correct rounding.
    const double nn = static_cast<double>(n_);
    const double disc = (2 * nn - 1) * (2 * nn - 1) - 8.0 * static_cast<double>(id);
    auto u = static_cast<std::uint64_t>(std::max(0.0, std::floor(((2 * nn - 1) - std::sqrt(std::max(0.0, disc))) / 2)));
    while (u > 0 && row_start(u) > id)
        --u;
    while (u + 1 < n_ && row_start(u + 1) <= id)
        ++u;
    const auto v = static_cast<Vertex>(u + 1 + (id - row_start(u)));
    return {static_cast<Vertex>(u), v};
}

const char* to_string(EdgeClass c) noexcept
{
    switch (c) {
    case EdgeClass::in_m:
        return "in_m";
    case EdgeClass::rejected:
        return "rejected";
    case EdgeClass::not_traversed:
        return "not_traversed";
    }
    return "?";
}

Graph::Graph(std::size_t n, std::size_t max_vertices)
    : n_(n), words_((n + 63) / 64)
{
    if (n > max_vertices)
        throw ConfigError("vertex count " + std::to_string(n) + " exceeds configured maximum " +
                          std::to_string(max_vertices));
    bits_.assign(n_ * words_, 0);
}

bool Graph::add_edge(Vertex u, Vertex v)
{
    if (u == v || u >= n_ || v >= n_)
        throw PreconditionError("add_edge: invalid pair");
    if (has_edge(u, v))
        return false;
    bits_[u * words_ + (v >> 6)] |= std::uint64_t{1} << (v & 63);
    bits_[v * words_ + (u >> 6)] |= std::uint64_t{1} << (u & 63);
    ++m_;
    return true;
}

bool Graph::remove_edge(Vertex u, Vertex v)
{
    if (u == v || u >= n_ || v >= n_)
        throw PreconditionError("remove_edge: invalid pair");
    if (!has_edge(u, v))
        return false;
    bits_[u * words_ + (v >> 6)] &= ~(std::uint64_t{1} << (v & 63));
    bits_[v * words_ + (u >> 6)] &= ~(std::uint64_t{1} << (u & 63));
    --m_;
    return true;
}

void Graph::clear() noexcept
{
    std::fill(bits_.begin(), bits_.end(), 0);
    m_ = 0;
}

std::size_t Graph::degree(Vertex u) const noexcept
{
    std::size_t d = 0;
    for (auto w : row(u))
        d += static_cast<std::size_t>(std::popcount(w));
    return d;
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const
{
    std::vector<std::pair<Vertex, Vertex>> out;
    out.reserve(m_);
    for (Vertex u = 0; u < n_; ++u)
        for_each_bit(row(u), [&](Vertex v) {
            if (v > u)
                out.emplace_back(u, v);
        });
    return out;
}

bool Graph::consistent() const
{
    std::size_t total = 0;
    for (Vertex u = 0; u < n_; ++u) {
        if (has_edge(u, u))
            return false;
        for (Vertex v = u + 1; v < n_; ++v)
            if (has_edge(u, v) != has_edge(v, u))
                return false;
        total += degree(u);
    }
    return total == 2 * m_;
}

bool creates_k4(const Graph& m, Vertex u, Vertex v)
{
    check_vertex(m, u);
    check_vertex(m, v);
    if (u == v)
        throw PreconditionError("creates_k4: u == v");
    if (m.has_edge(u, v))
        throw PreconditionError("creates_k4: edge already present");
    const auto ru = m.row(u);
    const auto rv = m.row(v);
    auto& common = scratch_common;
    common.resize(m.words_per_row());
    bool any = false;
    for (std::size_t k = 0; k < common.size(); ++k) {
        common[k] = ru[k] & rv[k];
        any |= common[k] != 0;
    }
    return any && contains_edge(m, common);
}

EdgeClass classify(const Graph& m, const Graph& trav, Vertex u, Vertex v)
{
    if (m.has_edge(u, v))
        return EdgeClass::in_m;
    return trav.has_edge(u, v) ? EdgeClass::rejected : EdgeClass::not_traversed;
}

bool is_open(const Graph& m, const Graph& trav, Vertex u, Vertex v)
{
    check_vertex(m, u);
    check_vertex(m, v);
    if (u == v)
        throw PreconditionError("is_open: u == v");
    if (trav.has_edge(u, v))
        throw DomainError("is_open: pair already traversed");
    return !creates_k4(m, u, v);
}

bool is_open(const Graph& m, const Graph& trav, EdgeId f)
{
    const auto [u, v] = EdgeCodec(m.n()).decode(f);
    return is_open(m, trav, u, v);
}

Graph open_pairs(const Graph& m, const Graph& trav)
{
    const std::size_t n = m.n();
    Graph open(n, std::max<std::size_t>(n, default_max_vertices));
    std::vector<std::uint64_t> untrav(m.words_per_row());
    for (Vertex u = 0; u < n; ++u) {
        const auto tu = trav.row(u);
        // untraversed v with u < v < n
        for (std::size_t k = 0; k < untrav.size(); ++k) {
            const std::size_t lo = k * 64;
            std::uint64_t mask = ~std::uint64_t{0};
            if (n - lo < 64)
                mask = (std::uint64_t{1} << (n - lo)) - 1;
            if (lo + 63 <= u)
                mask = 0;
            else if (lo <= u)
                mask &= ~std::uint64_t{0} << (u - lo + 1);
            untrav[k] = ~tu[k] & mask;
        }
        for_each_bit(untrav, [&](Vertex v) {
            if (!creates_k4(m, u, v))
                open.add_edge(u, v);
        });
    }
    return open;
}

std::vector<CompletionRecord> enumerate_completions(const Graph& m, const Graph& trav, Vertex u, Vertex v)
{
    check_vertex(m, u);
    check_vertex(m, v);
    if (u == v)
        throw PreconditionError("enumerate_completions: u == v");
    if (trav.has_edge(u, v))
        throw DomainError("enumerate_completions: pair already traversed");

    const std::size_t n = m.n();
    auto usable = [&](Vertex a, Vertex b, EdgeClass& cls) {
        cls = classify(m, trav, a, b);
        if (cls == EdgeClass::rejected)
            return false;
        return cls == EdgeClass::in_m || !creates_k4(m, a, b);
    };

    std::vector<EdgeClass> cu(n), cv(n);
    std::vector<char> ok(n, 0);
    for (Vertex w = 0; w < n; ++w) {
        if (w == u || w == v)
            continue;
        ok[w] = usable(u, w, cu[w]) && usable(v, w, cv[w]);
    }

    std::vector<CompletionRecord> out;
    for (Vertex w = 0; w < n; ++w) {
        if (!ok[w])
            continue;
        for (Vertex x = w + 1; x < n; ++x) {
            if (!ok[x])
                continue;
            EdgeClass cwx{};
            if (!usable(w, x, cwx))
                continue;
            CompletionRecord rec;
            rec.vertices = {u, v, w, x};
            rec.edges = {{{u, w}, {v, w}, {u, x}, {v, x}, {w, x}}};
            rec.classes = {cu[w], cv[w], cu[x], cv[x], cwx};
            rec.j = 0;
            for (auto c : rec.classes)
                rec.j += c == EdgeClass::not_traversed;
            out.push_back(rec);
        }
    }
    return out;
}

CompletionCounts completion_counts(const Graph& m, const Graph& open, Vertex u, Vertex v)
{
    const std::size_t words = m.words_per_row();
    std::vector<std::uint64_t> allowed_common(words);
    const auto mu = m.row(u), mv = m.row(v), ou = open.row(u), ov = open.row(v);
    for (std::size_t k = 0; k < words; ++k)
        allowed_common[k] = (mu[k] | ou[k]) & (mv[k] | ov[k]);
    allowed_common[u >> 6] &= ~(std::uint64_t{1} << (u & 63));
    allowed_common[v >> 6] &= ~(std::uint64_t{1} << (v & 63));

    CompletionCounts counts{};
    for_each_bit(allowed_common, [&](Vertex w) {
        const int base = !m.has_edge(u, w) + !m.has_edge(v, w);
        const auto mw = m.row(w), ow = open.row(w);
        for (std::size_t k = w >> 6; k < words; ++k) {
            std::uint64_t cand = allowed_common[k] & (mw[k] | ow[k]);
            if (k == (w >> 6))
                cand &= (w & 63) == 63 ? 0 : (~std::uint64_t{0} << ((w & 63) + 1));
            if (!cand)
                continue;
            // split candidates x by membership of ux, vx, wx in m
            for (int sel = 0; sel < 8; ++sel) {
                const std::uint64_t a = (sel & 1) ? mu[k] : ~mu[k];
                const std::uint64_t b = (sel & 2) ? mv[k] : ~mv[k];
                const std::uint64_t c = (sel & 4) ? mw[k] : ~mw[k];
                const int in_m = std::popcount(static_cast<unsigned>(sel));
                counts[static_cast<std::size_t>(base + 3 - in_m)] +=
                    static_cast<std::uint64_t>(std::popcount(cand & a & b & c));
            }
        }
    });
    return counts;
}

bool spans_triangle(const Graph& m, std::span<const Vertex> subset)
{
    if (subset.size() < 3)
        return false;
    const std::size_t words = m.words_per_row();
    std::vector<std::uint64_t> mask(words), nb(words);
    for (auto s : subset) {
        check_vertex(m, s);
        mask[s >> 6] |= std::uint64_t{1} << (s & 63);
    }
    for (auto s : subset) {
        const auto rs = m.row(s);
        bool any = false;
        for (std::size_t k = 0; k < words; ++k) {
            nb[k] = rs[k] & mask[k];
            any |= nb[k] != 0;
        }
        if (any && contains_edge(m, nb))
            return true;
    }
    return false;
}

bool verify_k4_free(const Graph& m)
{
    const std::size_t words = m.words_per_row();
    std::vector<std::uint64_t> common(words);
    for (Vertex u = 0; u < m.n(); ++u) {
        const auto ru = m.row(u);
        bool found = false;
        for_each_bit(ru, [&](Vertex v) {
            if (found || v <= u)
                return;
            const auto rv = m.row(v);
            bool any = false;
            for (std::size_t k = 0; k < words; ++k) {
                common[k] = ru[k] & rv[k];
                any |= common[k] != 0;
            }
            if (any && contains_edge(m, common))
                found = true;
        });
        if (found)
            return false;
    }
    return true;
}

void write_edge_list(std::ostream& os, const Graph& g)
{
    os << "n " << g.n() << '\n';
    for (const auto& [u, v] : g.edges())
        os << u << ' ' << v << '\n';
}

Graph read_edge_list(std::istream& is, std::size_t max_vertices)
{
    std::string line;
    std::size_t n = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag != "n" || !(ls >> n))
            throw ConfigError("edge list: expected 'n <count>' header");
        have_header = true;
        break;
    }
    if (!have_header)
        throw ConfigError("edge list: missing header");
    Graph g(n, max_vertices);
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        long long a = -1, b = -1;
        if (!(ls >> a >> b) || a < 0 || b < 0 || a == b || static_cast<std::size_t>(a) >= n ||
            static_cast<std::size_t>(b) >= n)
            throw ConfigError("edge list: bad edge on line " + std::to_string(lineno));
        g.add_edge(static_cast<Vertex>(a), static_cast<Vertex>(b));
    }
    return g;
}

void write_class_dump(std::ostream& os, const Graph& m, const Graph& trav)
{
    for (Vertex u = 0; u < m.n(); ++u)
        for (Vertex v = u + 1; v < m.n(); ++v)
            os << u << ' ' << v << ' ' << to_string(classify(m, trav, u, v)) << '\n';
}

} // namespace k4f
