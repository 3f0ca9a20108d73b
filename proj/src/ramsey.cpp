#include "k4f/ramsey.hpp"

#include "k4f/errors.hpp"
#include "k4f/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace k4f {

std::vector<Vertex> Tripartition::vertices() const
{
    std::vector<Vertex> out;
    for (const auto& p : parts)
        out.insert(out.end(), p.begin(), p.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t Tripartition::triangle_count() const noexcept
{
    return static_cast<std::uint64_t>(parts[0].size()) * parts[1].size() * parts[2].size();
}

void Tripartition::validate(std::size_t n) const
{
    auto all = vertices();
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw PreconditionError("tripartition parts overlap");
    if (!all.empty() && all.back() >= n)
        throw PreconditionError("tripartition vertex out of range");
    const auto [lo, hi] = std::minmax({parts[0].size(), parts[1].size(), parts[2].size()});
    if (hi - lo > 1)
        throw PreconditionError("tripartition parts not balanced within one");
}

Tripartition Tripartition::random_balanced(std::span<const Vertex> R, std::uint64_t seed)
{
    std::vector<Vertex> v(R.begin(), R.end());
    CounterRng rng(derive_key({seed, static_cast<std::uint64_t>(DrawTag::partition)}));
    for (std::size_t k = v.size(); k > 1; --k)
        std::swap(v[k - 1], v[rng.below(k)]);
    Tripartition tp;
    for (std::size_t k = 0; k < v.size(); ++k)
        tp.parts[k % 3].push_back(v[k]);
    for (auto& p : tp.parts)
        std::sort(p.begin(), p.end());
    return tp;
}

namespace {

template <class Fn>
void for_each_cross_triangle(const Tripartition& tp, Fn&& fn)
{
    for (Vertex a : tp.parts[0])
        for (Vertex b : tp.parts[1])
            for (Vertex c : tp.parts[2])
                fn(a, b, c);
}

} // namespace

std::uint64_t count_Y(const Graph& m, const Graph& trav, const Tripartition& tp, int j)
{
    if (j < 0 || j > 3)
        throw DomainError("count_Y: j must be in [0,3]");
    tp.validate(m.n());
    Graph scratch = m;
    std::uint64_t count = 0;
    for_each_cross_triangle(tp, [&](Vertex a, Vertex b, Vertex c) {
        const std::array<std::pair<Vertex, Vertex>, 3> edges{{{a, b}, {b, c}, {a, c}}};
        int fresh = 0;
        for (const auto& [x, y] : edges) {
            const auto cls = classify(m, trav, x, y);
            if (cls == EdgeClass::rejected)
                return;
            fresh += cls == EdgeClass::not_traversed;
        }
        if (fresh != j)
            return;
        // add the new edges one at a time; a K4 in m + G closes at its last new edge
        std::array<std::pair<Vertex, Vertex>, 3> added{};
        int n_added = 0;
        bool k4_free = true;
        for (const auto& [x, y] : edges) {
            if (scratch.has_edge(x, y))
                continue;
            if (creates_k4(scratch, x, y)) {
                k4_free = false;
                break;
            }
            scratch.add_edge(x, y);
            added[static_cast<std::size_t>(n_added++)] = {x, y};
        }
        for (int k = 0; k < n_added; ++k)
            scratch.remove_edge(added[static_cast<std::size_t>(k)].first, added[static_cast<std::size_t>(k)].second);
        count += k4_free;
    });
    return count;
}

std::uint64_t count_Z(const Graph& m, const Graph& trav, const Tripartition& tp)
{
    tp.validate(m.n());
    const std::size_t words = m.words_per_row();
    std::vector<std::uint64_t> in_r(words), common(words);
    for (Vertex r : tp.vertices())
        in_r[r >> 6] |= std::uint64_t{1} << (r & 63);

    std::uint64_t count = 0;
    for_each_cross_triangle(tp, [&](Vertex a, Vertex b, Vertex c) {
        const std::array<std::pair<Vertex, Vertex>, 3> edges{{{a, b}, {b, c}, {a, c}}};
        int in_m = 0, fresh = 0;
        std::pair<Vertex, Vertex> g{};
        for (const auto& e : edges) {
            const auto cls = classify(m, trav, e.first, e.second);
            in_m += cls == EdgeClass::in_m;
            if (cls == EdgeClass::not_traversed) {
                ++fresh;
                g = e;
            }
        }
        if (in_m != 2 || fresh != 1)
            return;
        // K4 completions of g inside m: an edge {w,x} in the common neighbourhood
        const auto ru = m.row(g.first), rv = m.row(g.second);
        for (std::size_t k = 0; k < words; ++k)
            common[k] = ru[k] & rv[k];
        bool found = false;
        for_each_bit(common, [&](Vertex w) {
            if (found)
                return;
            const auto rw = m.row(w);
            const bool w_in_r = (in_r[w >> 6] >> (w & 63)) & 1U;
            for (std::size_t k = 0; k < words && !found; ++k) {
                const std::uint64_t partners = rw[k] & common[k];
                if (partners && (w_in_r || (partners & in_r[k])))
                    found = true;
            }
        });
        count += found;
    });
    return count;
}

namespace {

// Exact search over 64-bit vertex masks.
class ExactF3 {
public:
    explicit ExactF3(const Graph& g) : n_(g.n()), adj_(g.n(), 0)
    {
        // branch on high-degree vertices first
        order_.resize(n_);
        std::iota(order_.begin(), order_.end(), 0U);
        std::stable_sort(order_.begin(), order_.end(),
                         [&](Vertex a, Vertex b) { return g.degree(a) > g.degree(b); });
        std::vector<Vertex> pos(n_);
        for (std::size_t k = 0; k < n_; ++k)
            pos[order_[k]] = static_cast<Vertex>(k);
        for (Vertex u = 0; u < n_; ++u)
            for (Vertex v = 0; v < n_; ++v)
                if (u != v && g.has_edge(u, v))
                    adj_[pos[u]] |= std::uint64_t{1} << pos[v];
    }

    F3Result solve()
    {
        const std::uint64_t all = n_ == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n_) - 1);
        branch(0, all, 0);
        F3Result res;
        res.exact = true;
        res.nodes = nodes_;
        for (std::uint64_t w = best_mask_; w; w &= w - 1)
            res.subset.push_back(order_[static_cast<std::size_t>(std::countr_zero(w))]);
        std::sort(res.subset.begin(), res.subset.end());
        return res;
    }

private:
    // Upper bound on how many candidates can still join: a packing of
    // disjoint triangles inside cand and candidate pairs whose edge would
    // close a triangle with a chosen vertex; each costs at least one vertex.
    int bound(std::uint64_t chosen, std::uint64_t cand) const
    {
        int reduce = 0;
        std::uint64_t rem = cand;
        while (rem) {
            const int v = std::countr_zero(rem);
            rem &= rem - 1;
            const std::uint64_t nb = adj_[v] & rem;
            for (std::uint64_t w = nb; w; w &= w - 1) {
                const int u = std::countr_zero(w);
                const std::uint64_t tri = adj_[u] & nb;
                if (tri) {
                    rem &= ~((std::uint64_t{1} << u) | (tri & (~tri + 1)));
                    ++reduce;
                    break;
                }
                if (adj_[u] & adj_[v] & chosen) {
                    rem &= ~(std::uint64_t{1} << u);
                    ++reduce;
                    break;
                }
            }
        }
        return std::popcount(cand) - reduce;
    }

    void branch(std::uint64_t chosen, std::uint64_t cand, std::uint64_t closing)
    {
        ++nodes_;
        const int size = std::popcount(chosen);
        if (!cand) {
            if (size > best_) {
                best_ = size;
                best_mask_ = chosen;
            }
            return;
        }
        if (size + bound(chosen, cand) <= best_)
            return;
        const int v = std::countr_zero(cand);
        const std::uint64_t bit = std::uint64_t{1} << v;
        // include v
        std::uint64_t add_closing = 0;
        for (std::uint64_t w = adj_[v] & chosen; w; w &= w - 1)
            add_closing |= adj_[std::countr_zero(w)] & adj_[v];
        const std::uint64_t new_closing = closing | add_closing;
        branch(chosen | bit, cand & ~bit & ~new_closing, new_closing);
        // exclude v
        branch(chosen, cand & ~bit, closing);
    }

    std::size_t n_;
    std::vector<std::uint64_t> adj_;
    std::vector<Vertex> order_;
    int best_ = -1;
    std::uint64_t best_mask_ = 0;
    std::uint64_t nodes_ = 0;
};

class HeuristicF3 {
public:
    HeuristicF3(const Graph& g, std::uint64_t seed)
        : g_(g), words_(g.words_per_row()), in_(words_, 0), scratch_(words_, 0),
          rng_(derive_key({seed, g.n(), static_cast<std::uint64_t>(DrawTag::heuristic)}))
    {
    }

    F3Result run(std::uint64_t budget)
    {
        const std::size_t n = g_.n();
        std::vector<std::pair<double, Vertex>> order;
        for (Vertex v = 0; v < n; ++v)
            order.emplace_back(static_cast<double>(g_.degree(v)) + rng_.uniform(), v);
        std::sort(order.begin(), order.end());
        for (const auto& [key, v] : order)
            if (can_add(v))
                insert(v);
        best_ = members();

        std::vector<std::uint64_t> saved;
        std::vector<Vertex> pool;
        for (std::uint64_t it = 0; it < budget && size_ > 0; ++it) {
            saved = in_;
            const std::size_t before = size_;
            auto current = members();
            const std::size_t k = std::min<std::size_t>(current.size(), 1 + rng_.below(3));
            std::vector<Vertex> removed;
            for (std::size_t r = 0; r < k; ++r) {
                const auto idx = r + rng_.below(current.size() - r);
                std::swap(current[r], current[idx]);
                removed.push_back(current[r]);
                erase(current[r]);
            }
            // refill from the neighbourhood of the removed vertices, then the removed ones
            std::fill(scratch_.begin(), scratch_.end(), 0);
            for (Vertex d : removed) {
                const auto row = g_.row(d);
                for (std::size_t q = 0; q < words_; ++q)
                    scratch_[q] |= row[q];
            }
            for (Vertex d : removed)
                scratch_[d >> 6] &= ~(std::uint64_t{1} << (d & 63));
            pool.clear();
            for_each_bit(scratch_, [&](Vertex v) {
                if (!contains(v))
                    pool.push_back(v);
            });
            for (std::size_t q = pool.size(); q > 1; --q)
                std::swap(pool[q - 1], pool[rng_.below(q)]);
            for (Vertex v : pool)
                if (can_add(v))
                    insert(v);
            for (Vertex d : removed)
                if (can_add(d))
                    insert(d);
            if (size_ < before) {
                in_ = saved;
                size_ = before;
            } else if (size_ > best_.size()) {
                best_ = members();
            }
        }
        F3Result res;
        res.exact = false;
        res.nodes = budget;
        res.subset = best_;
        return res;
    }

private:
    bool contains(Vertex v) const { return (in_[v >> 6] >> (v & 63)) & 1U; }
    void insert(Vertex v)
    {
        in_[v >> 6] |= std::uint64_t{1} << (v & 63);
        ++size_;
    }
    void erase(Vertex v)
    {
        in_[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
        --size_;
    }

    bool can_add(Vertex v)
    {
        if (contains(v))
            return false;
        const auto rv = g_.row(v);
        bool any = false;
        for (std::size_t q = 0; q < words_; ++q) {
            scratch_[q] = rv[q] & in_[q];
            any |= scratch_[q] != 0;
        }
        if (!any)
            return true;
        bool ok = true;
        for_each_bit(scratch_, [&](Vertex u) {
            if (!ok)
                return;
            const auto ru = g_.row(u);
            for (std::size_t q = 0; q < words_; ++q)
                if (ru[q] & scratch_[q]) {
                    ok = false;
                    return;
                }
        });
        return ok;
    }

    std::vector<Vertex> members() const
    {
        std::vector<Vertex> out;
        for_each_bit(in_, [&](Vertex v) { out.push_back(v); });
        return out;
    }

    const Graph& g_;
    std::size_t words_;
    std::vector<std::uint64_t> in_;
    std::vector<std::uint64_t> scratch_;
    std::size_t size_ = 0;
    std::vector<Vertex> best_;
    CounterRng rng_;
};

} // namespace

F3Result max_triangle_free_subset(const Graph& m, const F3Options& opts)
{
    if (opts.mode == F3Mode::exact) {
        if (m.n() > opts.exact_cap || m.n() > 64)
            throw ConfigError("exact f3 limited to n <= " + std::to_string(std::min<std::size_t>(opts.exact_cap, 64)) +
                              " (got " + std::to_string(m.n()) + "); use heuristic mode");
        if (m.n() == 0)
            return F3Result{{}, true, 0};
        return ExactF3(m).solve();
    }
    return HeuristicF3(m, opts.seed).run(opts.budget);
}

CoverReport check_s_subsets(const Graph& m, std::size_t s, std::uint64_t samples, std::uint64_t seed,
                            std::uint64_t heuristic_budget)
{
    if (s < 3 || s > m.n())
        throw PreconditionError("check_s_subsets: need 3 <= s <= n");
    CoverReport rep;
    rep.s = s;
    rep.samples = samples;
    std::vector<Vertex> pool(m.n());
    std::iota(pool.begin(), pool.end(), 0U);
    const auto key = derive_key({seed, m.n(), s, static_cast<std::uint64_t>(DrawTag::subset)});
    for (std::uint64_t k = 0; k < samples; ++k) {
        CounterRng rng(derive_key({key, k}));
        for (std::size_t q = 0; q < s; ++q)
            std::swap(pool[q], pool[q + rng.below(pool.size() - q)]);
        if (!spans_triangle(m, std::span<const Vertex>(pool.data(), s)))
            ++rep.violations;
    }
    F3Options opts;
    opts.mode = F3Mode::heuristic;
    opts.budget = heuristic_budget;
    opts.seed = seed;
    const auto probe = max_triangle_free_subset(m, opts);
    rep.best_adversarial = probe.subset.size();
    rep.adversarial_subset = probe.subset;
    return rep;
}

double cover_scale(double n) { return std::pow(n, 0.6) * std::pow(std::log(n), 0.2); }

} // namespace k4f
