#pragma once

#include "k4f/graph.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace k4f {

// Vertex set R split into three parts; T is every triangle with one vertex
// in each part.
struct Tripartition {
    std::array<std::vector<Vertex>, 3> parts;

    std::vector<Vertex> vertices() const;
    std::uint64_t triangle_count() const noexcept;

    // Parts must be disjoint, in range, and balanced within one.
    void validate(std::size_t n) const;

    // Seeded uniform balanced split of R.
    static Tripartition random_balanced(std::span<const Vertex> R, std::uint64_t seed);
};

// Cross triangles with 3-j edges in m, j not traversed, none rejected, and
// m together with the triangle still K4-free. j in [0,3].
std::uint64_t count_Y(const Graph& m, const Graph& trav, const Tripartition& tp, int j);

// Cross triangles with two edges in m and one not-traversed edge g such that
// some K4 through g with its other five edges in m has a vertex of R
// besides the endpoints of g.
std::uint64_t count_Z(const Graph& m, const Graph& trav, const Tripartition& tp);

enum class F3Mode { exact, heuristic };

struct F3Options {
    F3Mode mode = F3Mode::exact;
    std::uint64_t budget = 2000;     // heuristic perturbation rounds
    std::uint64_t seed = 0;
    std::size_t exact_cap = 45;
};

struct F3Result {
    std::vector<Vertex> subset;      // spans no triangle
    bool exact = false;
    std::uint64_t nodes = 0;
};

// Largest vertex subset spanning no triangle. Exact mode is branch and
// bound (n <= exact_cap, at most 64); heuristic mode is randomized greedy
// plus remove-and-refill local search.
F3Result max_triangle_free_subset(const Graph& m, const F3Options& opts);

struct CoverReport {
    std::size_t s = 0;
    std::uint64_t samples = 0;
    std::uint64_t violations = 0;            // sampled s-sets spanning no triangle
    std::size_t best_adversarial = 0;        // heuristic triangle-free size
    std::vector<Vertex> adversarial_subset;
};

CoverReport check_s_subsets(const Graph& m, std::size_t s, std::uint64_t samples, std::uint64_t seed,
                            std::uint64_t heuristic_budget = 2000);

// n^{3/5} (ln n)^{1/5}
double cover_scale(double n);

} // namespace k4f
