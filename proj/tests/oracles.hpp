#pragma once

// Independent reference implementations for tests. Everything here is
// deliberately naive: plain loops over vertex tuples and subsets, with no
// shared code beyond the Graph container and EdgeClass.

#include "k4f/graph.hpp"
#include "k4f/ramsey.hpp"
#include "k4f/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

namespace oracle {

using k4f::EdgeClass;
using k4f::Graph;
using k4f::Vertex;

inline Graph random_graph(std::size_t n, double p, std::uint64_t seed)
{
    Graph g(n);
    k4f::CounterRng rng(k4f::derive_key({0xFEEDULL, seed, n}));
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if (rng.uniform() < p)
                g.add_edge(u, v);
    return g;
}

inline bool closes_k4(const Graph& m, Vertex u, Vertex v)
{
    const auto n = static_cast<Vertex>(m.n());
    for (Vertex w = 0; w < n; ++w)
        for (Vertex x = w + 1; x < n; ++x) {
            if (w == u || w == v || x == u || x == v)
                continue;
            if (m.has_edge(u, w) && m.has_edge(v, w) && m.has_edge(u, x) && m.has_edge(v, x) && m.has_edge(w, x))
                return true;
        }
    return false;
}

inline bool has_k4(const Graph& m)
{
    const auto n = static_cast<Vertex>(m.n());
    for (Vertex a = 0; a < n; ++a)
        for (Vertex b = a + 1; b < n; ++b)
            for (Vertex c = b + 1; c < n; ++c)
                for (Vertex d = c + 1; d < n; ++d)
                    if (m.has_edge(a, b) && m.has_edge(a, c) && m.has_edge(a, d) && m.has_edge(b, c) &&
                        m.has_edge(b, d) && m.has_edge(c, d))
                        return true;
    return false;
}

inline EdgeClass edge_class(const Graph& m, const Graph& trav, Vertex a, Vertex b)
{
    if (m.has_edge(a, b))
        return EdgeClass::in_m;
    if (trav.has_edge(a, b))
        return EdgeClass::rejected;
    return EdgeClass::not_traversed;
}

inline bool open(const Graph& m, const Graph& trav, Vertex a, Vertex b)
{
    return !trav.has_edge(a, b) && !closes_k4(m, a, b);
}

inline std::uint64_t open_count(const Graph& m, const Graph& trav)
{
    std::uint64_t c = 0;
    const auto n = static_cast<Vertex>(m.n());
    for (Vertex a = 0; a < n; ++a)
        for (Vertex b = a + 1; b < n; ++b)
            c += open(m, trav, a, b);
    return c;
}

// |X_j(f)| for j = 0..5 by scanning every quadruple through f = {u,v}.
inline std::array<std::uint64_t, 6> completions(const Graph& m, const Graph& trav, Vertex u, Vertex v)
{
    std::array<std::uint64_t, 6> counts{};
    const auto n = static_cast<Vertex>(m.n());
    for (Vertex w = 0; w < n; ++w)
        for (Vertex x = w + 1; x < n; ++x) {
            if (w == u || w == v || x == u || x == v)
                continue;
            const std::array<std::pair<Vertex, Vertex>, 5> five{{{u, w}, {v, w}, {u, x}, {v, x}, {w, x}}};
            int j = 0;
            bool ok = true;
            for (auto [a, b] : five) {
                const auto c = edge_class(m, trav, a, b);
                if (c == EdgeClass::rejected)
                    ok = false;
                else if (c == EdgeClass::not_traversed) {
                    ++j;
                    if (closes_k4(m, a, b))
                        ok = false;
                }
            }
            if (ok)
                ++counts[static_cast<std::size_t>(j)];
        }
    return counts;
}

inline bool spans_triangle(const Graph& m, const std::vector<Vertex>& s)
{
    for (std::size_t a = 0; a < s.size(); ++a)
        for (std::size_t b = a + 1; b < s.size(); ++b)
            for (std::size_t c = b + 1; c < s.size(); ++c)
                if (m.has_edge(s[a], s[b]) && m.has_edge(s[a], s[c]) && m.has_edge(s[b], s[c]))
                    return true;
    return false;
}

template <class Fn>
void cross_triangles(const k4f::Tripartition& tp, Fn&& fn)
{
    for (Vertex a : tp.parts[0])
        for (Vertex b : tp.parts[1])
            for (Vertex c : tp.parts[2])
                fn(a, b, c);
}

inline std::uint64_t count_Y(const Graph& m, const Graph& trav, const k4f::Tripartition& tp, int j)
{
    std::uint64_t count = 0;
    cross_triangles(tp, [&](Vertex a, Vertex b, Vertex c) {
        const std::array<std::pair<Vertex, Vertex>, 3> e{{{a, b}, {b, c}, {a, c}}};
        int fresh = 0;
        for (auto [x, y] : e) {
            const auto cls = edge_class(m, trav, x, y);
            if (cls == EdgeClass::rejected)
                return;
            fresh += cls == EdgeClass::not_traversed;
        }
        if (fresh != j)
            return;
        Graph u = m;
        for (auto [x, y] : e)
            u.add_edge(x, y);
        count += !has_k4(u);
    });
    return count;
}

inline std::uint64_t count_Z(const Graph& m, const Graph& trav, const k4f::Tripartition& tp)
{
    std::vector<bool> in_r(m.n(), false);
    for (const auto& part : tp.parts)
        for (Vertex r : part)
            in_r[r] = true;
    const auto n = static_cast<Vertex>(m.n());
    std::uint64_t count = 0;
    cross_triangles(tp, [&](Vertex a, Vertex b, Vertex c) {
        const std::array<std::pair<Vertex, Vertex>, 3> e{{{a, b}, {b, c}, {a, c}}};
        int in_m = 0;
        std::pair<Vertex, Vertex> g{};
        int fresh = 0;
        for (auto [x, y] : e) {
            const auto cls = edge_class(m, trav, x, y);
            in_m += cls == EdgeClass::in_m;
            if (cls == EdgeClass::not_traversed) {
                ++fresh;
                g = {x, y};
            }
        }
        if (in_m != 2 || fresh != 1)
            return;
        const auto [u, v] = g;
        for (Vertex w = 0; w < n; ++w)
            for (Vertex x = w + 1; x < n; ++x) {
                if (w == u || w == v || x == u || x == v)
                    continue;
                if (m.has_edge(u, w) && m.has_edge(v, w) && m.has_edge(u, x) && m.has_edge(v, x) &&
                    m.has_edge(w, x) && (in_r[w] || in_r[x])) {
                    ++count;
                    return;
                }
            }
    });
    return count;
}

// Largest triangle-free vertex subset by scanning all 2^n subsets (n <= 22).
// tf[S] = tf[S without its top vertex t] and no edge of S inside N(t).
inline std::size_t max_triangle_free(const Graph& m)
{
    const std::size_t n = m.n();
    std::vector<std::uint32_t> adj(n, 0);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v)
            if (u != v && m.has_edge(u, v))
                adj[u] |= 1U << v;
    std::vector<std::uint8_t> tf(std::size_t{1} << n, 0);
    tf[0] = 1;
    std::size_t best = 0;
    for (std::uint32_t s = 1; s < (1U << n); ++s) {
        const int t = 31 - __builtin_clz(s);
        const std::uint32_t rest = s & ~(1U << t);
        if (!tf[rest])
            continue;
        const std::uint32_t nb = adj[static_cast<std::size_t>(t)] & rest;
        bool ok = true;
        for (std::uint32_t w = nb; w && ok; w &= w - 1)
            if (adj[static_cast<std::size_t>(__builtin_ctz(w))] & nb)
                ok = false;
        if (ok) {
            tf[s] = 1;
            best = std::max<std::size_t>(best, static_cast<std::size_t>(__builtin_popcount(s)));
        }
    }
    return best;
}

// Exact law of the final edge count at n = 5: every ordering of the 10 pairs.
inline std::map<int, std::uint64_t> n5_final_edge_law()
{
    std::array<std::pair<int, int>, 10> pairs{};
    int k = 0;
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b)
            pairs[static_cast<std::size_t>(k++)] = {a, b};
    auto bit = [&](int a, int b) {
        for (int q = 0; q < 10; ++q)
            if (pairs[static_cast<std::size_t>(q)] == std::pair{std::min(a, b), std::max(a, b)})
                return 1U << q;
        return 0U;
    };
    std::vector<std::uint32_t> k4s;
    for (int skip = 0; skip < 5; ++skip) {
        std::uint32_t mask = 0;
        for (int a = 0; a < 5; ++a)
            for (int b = a + 1; b < 5; ++b)
                if (a != skip && b != skip)
                    mask |= bit(a, b);
        k4s.push_back(mask);
    }
    std::array<int, 10> order{};
    std::iota(order.begin(), order.end(), 0);
    std::map<int, std::uint64_t> law;
    do {
        std::uint32_t g = 0;
        for (int q : order) {
            const std::uint32_t next = g | (1U << q);
            bool bad = false;
            for (auto k4 : k4s)
                bad = bad || (next & k4) == k4;
            if (!bad)
                g = next;
        }
        ++law[__builtin_popcount(g)];
    } while (std::next_permutation(order.begin(), order.end()));
    return law;
}

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KsResult {
    double d = 0;
    double p_value = 1;
};

inline double kolmogorov_q(double lambda)
{
    if (lambda < 1e-3)
        return 1.0;
    double sum = 0, sign = 1;
    for (int k = 1; k <= 200; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16)
            break;
        sign = -sign;
    }
    return std::clamp(2 * sum, 0.0, 1.0);
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
            ++i;
        while (j < b.size() && b[j] <= x)
            ++j;
        d = std::max(d, std::abs(double(i) / double(a.size()) - double(j) / double(b.size())));
    }
    const double ne = double(a.size()) * double(b.size()) / double(a.size() + b.size());
    const double sq = std::sqrt(ne);
    return {d, kolmogorov_q((sq + 0.12 + 0.11 / sq) * d)};
}

} // namespace oracle
