#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace k4f {

using Vertex = std::uint32_t;
using EdgeId = std::uint64_t;

constexpr std::size_t default_max_vertices = 65536;

// Calls fn(index) for every set bit of a word sequence, in increasing order.
template <class Fn>
inline void for_each_bit(std::span<const std::uint64_t> words, Fn&& fn)
{
    for (std::size_t k = 0; k < words.size(); ++k) {
        std::uint64_t w = words[k];
        while (w) {
            fn(static_cast<Vertex>(k * 64 + static_cast<std::size_t>(std::countr_zero(w))));
            w &= w - 1;
        }
    }
}

// Canonical index of an unordered pair {u,v}, u < v, into [0, C(n,2)).
// Strictly increasing in (u,v) lexicographic order.
class EdgeCodec {
public:
    explicit EdgeCodec(std::size_t n) : n_(n) {}

    std::size_t n() const noexcept { return n_; }
    std::uint64_t pair_count() const noexcept { return static_cast<std::uint64_t>(n_) * (n_ - 1) / 2; }

    EdgeId encode(Vertex u, Vertex v) const;
    std::pair<Vertex, Vertex> decode(EdgeId id) const;

private:
    // Number of pairs whose smaller endpoint is below u.
    std::uint64_t row_start(std::uint64_t u) const noexcept { return u * n_ - u * (u + 1) / 2; }

    std::size_t n_;
};

enum class EdgeClass : std::uint8_t { in_m, rejected, not_traversed };

const char* to_string(EdgeClass c) noexcept;

// Dense symmetric bitset adjacency without self-loops.
class Graph {
public:
    explicit Graph(std::size_t n, std::size_t max_vertices = default_max_vertices);

    std::size_t n() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return m_; }
    std::size_t words_per_row() const noexcept { return words_; }

    bool has_edge(Vertex u, Vertex v) const noexcept
    {
        return (bits_[u * words_ + (v >> 6)] >> (v & 63)) & 1U;
    }

    // Returns false when the edge was already present.
    bool add_edge(Vertex u, Vertex v);
    bool remove_edge(Vertex u, Vertex v);
    void clear() noexcept;

    std::span<const std::uint64_t> row(Vertex u) const noexcept
    {
        return {bits_.data() + u * words_, words_};
    }

    std::size_t degree(Vertex u) const noexcept;
    std::vector<std::pair<Vertex, Vertex>> edges() const;

    // Recounts set bits; used by invariant checks.
    bool consistent() const;

    friend bool operator==(const Graph& a, const Graph& b) noexcept
    {
        return a.n_ == b.n_ && a.m_ == b.m_ && a.bits_ == b.bits_;
    }

private:
    std::size_t n_;
    std::size_t words_;
    std::size_t m_ = 0;
    std::vector<std::uint64_t> bits_;
};

// True iff adding {u,v} to m closes a K4, i.e. the common neighbourhood of
// u and v contains an edge. Requires u != v and {u,v} not in m.
bool creates_k4(const Graph& m, Vertex u, Vertex v);

EdgeClass classify(const Graph& m, const Graph& trav, Vertex u, Vertex v);

// f must not be traversed. Open means m + f stays K4-free.
bool is_open(const Graph& m, const Graph& trav, Vertex u, Vertex v);
bool is_open(const Graph& m, const Graph& trav, EdgeId f);

// All open pairs as a graph; its edge count is |O|.
Graph open_pairs(const Graph& m, const Graph& trav);

struct CompletionRecord {
    std::array<Vertex, 4> vertices;                      // u, v, w, x with f = {u,v}
    std::array<std::pair<Vertex, Vertex>, 5> edges;      // uw, vw, ux, vx, wx
    std::array<EdgeClass, 5> classes;
    int j = 0;                                           // not-traversed edges among the five
};

// Members of X_j(f) for every j: 5-edge sets completing K4 with f, no
// rejected edge, and every not-traversed edge open.
std::vector<CompletionRecord> enumerate_completions(const Graph& m, const Graph& trav, Vertex u, Vertex v);

using CompletionCounts = std::array<std::uint64_t, 6>;

// |X_j(f)| for j = 0..5 using a precomputed open-pair graph.
CompletionCounts completion_counts(const Graph& m, const Graph& open, Vertex u, Vertex v);

bool spans_triangle(const Graph& m, std::span<const Vertex> subset);

bool verify_k4_free(const Graph& m);

// "n <N>" header then one "u v" line per edge in canonical order.
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is, std::size_t max_vertices = default_max_vertices);

// One "u v class" line per pair in canonical order.
void write_class_dump(std::ostream& os, const Graph& m, const Graph& trav);

} // namespace k4f
