#include "k4f/survival.hpp"

#include "k4f/errors.hpp"
#include "k4f/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

namespace k4f {

TreeSpec::TreeSpec() { nodes_.push_back(Node{}); }

int TreeSpec::add_odd(int even_parent)
{
    if (even_parent < 0 || static_cast<std::size_t>(even_parent) >= nodes_.size() ||
        nodes_[static_cast<std::size_t>(even_parent)].kind != NodeKind::even)
        throw StructuralError("odd node needs an even parent");
    nodes_.push_back(Node{even_parent, NodeKind::odd, {}});
    const int id = static_cast<int>(nodes_.size() - 1);
    nodes_[static_cast<std::size_t>(even_parent)].children.push_back(id);
    return id;
}

int TreeSpec::add_even(int odd_parent)
{
    if (odd_parent < 0 || static_cast<std::size_t>(odd_parent) >= nodes_.size() ||
        nodes_[static_cast<std::size_t>(odd_parent)].kind != NodeKind::odd)
        throw StructuralError("even node needs an odd parent");
    nodes_.push_back(Node{odd_parent, NodeKind::even, {}});
    const int id = static_cast<int>(nodes_.size() - 1);
    nodes_[static_cast<std::size_t>(odd_parent)].children.push_back(id);
    return id;
}

TreeSpec TreeSpec::star(int k)
{
    TreeSpec t;
    for (int a = 0; a < k; ++a)
        t.add_even(t.add_odd(0));
    return t;
}

TreeSpec TreeSpec::regular(int k, int arity, int c)
{
    if (k < 1 || arity < 1 || c < 0)
        throw StructuralError("regular tree needs k >= 1, arity >= 1, c >= 0");
    TreeSpec t;
    std::vector<int> frontier{0};
    for (int level = 0; level < c; ++level) {
        std::vector<int> next;
        for (int e : frontier)
            for (int a = 0; a < k; ++a) {
                const int o = t.add_odd(e);
                for (int b = 0; b < arity; ++b)
                    next.push_back(t.add_even(o));
            }
        frontier = std::move(next);
    }
    return t;
}

int TreeSpec::depth() const
{
    std::vector<int> d(nodes_.size(), 0);
    int best = 0;
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        d[i] = d[static_cast<std::size_t>(nodes_[i].parent)] + 1;
        best = std::max(best, d[i]);
    }
    return best;
}

void TreeSpec::validate() const
{
    if (nodes_.empty() || nodes_[0].kind != NodeKind::even || nodes_[0].parent != -1)
        throw StructuralError("root must be an even node without parent");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        const auto& nd = nodes_[i];
        if (nd.parent < 0 || static_cast<std::size_t>(nd.parent) >= i)
            throw StructuralError("node " + std::to_string(i) + ": parent must precede child");
        if (nodes_[static_cast<std::size_t>(nd.parent)].kind == nd.kind)
            throw StructuralError("node " + std::to_string(i) + ": kinds must alternate");
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].kind == NodeKind::odd && nodes_[i].children.empty())
            throw StructuralError("odd node " + std::to_string(i) + " has no children (leaves must be even)");
}

TreeSpec TreeSpec::parse(std::istream& is)
{
    struct Row {
        std::string id, parent;
        NodeKind kind;
        int arity;
    };
    std::vector<Row> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        std::string w_node, id, w_parent, parent, w_kind, kind, w_arity;
        int arity = -1;
        if (!(ls >> w_node >> id >> w_parent >> parent >> w_kind >> kind >> w_arity >> arity) || w_node != "node" ||
            w_parent != "parent" || w_kind != "kind" || w_arity != "arity" || arity < 0 ||
            (kind != "even" && kind != "odd"))
            throw StructuralError("tree file line " + std::to_string(lineno) + ": malformed");
        rows.push_back({id, parent, kind == "even" ? NodeKind::even : NodeKind::odd, arity});
    }
    if (rows.empty())
        throw StructuralError("tree file is empty");
    if (rows[0].parent != "root" || rows[0].kind != NodeKind::even)
        throw StructuralError("first node must be the even root");

    TreeSpec t;
    std::map<std::string, int> index{{rows[0].id, 0}};
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.parent == "root")
            throw StructuralError("node " + row.id + ": only one root allowed");
        if (index.count(row.id))
            throw StructuralError("node " + row.id + ": duplicate id");
        const auto it = index.find(row.parent);
        if (it == index.end())
            throw StructuralError("node " + row.id + ": parent " + row.parent + " not defined before it");
        const int id = row.kind == NodeKind::odd ? t.add_odd(it->second) : t.add_even(it->second);
        index[row.id] = id;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& nd = t.node(index[rows[r].id]);
        if (static_cast<int>(nd.children.size()) != rows[r].arity)
            throw StructuralError("node " + rows[r].id + ": arity " + std::to_string(rows[r].arity) +
                                  " but " + std::to_string(nd.children.size()) + " children listed");
    }
    t.validate();
    return t;
}

void TreeSpec::write(std::ostream& os) const
{
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& nd = nodes_[i];
        os << "node " << i << " parent ";
        if (nd.parent < 0)
            os << "root";
        else
            os << nd.parent;
        os << " kind " << (nd.kind == NodeKind::even ? "even" : "odd") << " arity " << nd.children.size() << '\n';
    }
}

TreeSpec random_tree(std::uint64_t seed, const TreeGenOptions& opts)
{
    CounterRng rng(derive_key({seed, static_cast<std::uint64_t>(DrawTag::tree)}));
    TreeSpec t;
    std::vector<std::pair<int, int>> queue{{0, 0}};   // (even node, depth)
    for (std::size_t q = 0; q < queue.size(); ++q) {
        const auto [e, d] = queue[q];
        if (d + 2 > opts.max_depth)
            continue;
        const auto odd_children = static_cast<int>(rng.below(static_cast<std::uint64_t>(opts.max_odd_children) + 1));
        for (int a = 0; a < odd_children; ++a) {
            const int arity = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(opts.max_arity)));
            if (static_cast<int>(t.size()) + 1 + arity > opts.max_nodes)
                break;
            const int o = t.add_odd(e);
            for (int b = 0; b < arity; ++b)
                queue.emplace_back(t.add_even(o), d + 2);
        }
    }
    return t;
}

SurvivalCurve::SurvivalCurve(double step, std::vector<double> p, std::vector<double> P)
    : h_(step), p_(std::move(p)), P_(std::move(P))
{
    if (p_.size() != P_.size() || p_.size() < 2)
        throw PreconditionError("survival curve arrays mismatch");
}

namespace {

double interpolate(std::span<const double> v, double h, double t)
{
    const double tmax = h * static_cast<double>(v.size() - 1);
    if (!(t >= 0.0) || t > tmax * (1 + 1e-12))
        throw DomainError("t = " + std::to_string(t) + " outside curve range");
    const double pos = t / h;
    auto k = static_cast<std::size_t>(pos);
    if (k >= v.size() - 1)
        k = v.size() - 2;
    const double s = pos - static_cast<double>(k);
    return v[k] + s * (v[k + 1] - v[k]);
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& p, double h)
{
    std::vector<double> P(p.size());
    P[0] = 0.0;
    for (std::size_t k = 1; k < p.size(); ++k)
        P[k] = P[k - 1] + 0.5 * h * (p[k - 1] + p[k]);
    return P;
}

std::size_t grid_points(double t_max, double h)
{
    if (!(h > 0) || !(t_max > 0))
        throw ConfigError("grid step and range must be positive");
    const auto steps = static_cast<std::size_t>(std::llround(t_max / h));
    if (steps == 0 || std::abs(static_cast<double>(steps) * h - t_max) > 1e-9 * t_max)
        throw ConfigError("grid step must divide the range");
    return steps + 1;
}

// (1 - y)^k for y in [0,1], accurate for large k.
double pow_complement(double y, double k) noexcept
{
    if (y >= 1.0)
        return 0.0;
    if (y <= 0.0)
        return 1.0;
    return std::exp(k * std::log1p(-y));
}

} // namespace

double SurvivalCurve::p(double t) const { return interpolate(p_, h_, t); }
double SurvivalCurve::P(double t) const { return interpolate(P_, h_, t); }

SurvivalCurve survival_dp(const TreeSpec& tree, double grid_step)
{
    tree.validate();
    const std::size_t points = grid_points(1.0, grid_step);
    const double h = 1.0 / static_cast<double>(points - 1);
    std::vector<std::vector<double>> acc(tree.size());
    auto slot = [&](int id) -> std::vector<double>& {
        auto& a = acc[static_cast<std::size_t>(id)];
        if (a.empty())
            a.assign(points, 1.0);
        return a;
    };
    for (int id = static_cast<int>(tree.size()) - 1; id >= 0; --id) {
        const auto& nd = tree.node(id);
        if (nd.kind == NodeKind::even) {
            std::vector<double> p = std::move(slot(id));
            acc[static_cast<std::size_t>(id)].clear();
            auto P = cumulative_trapezoid(p, h);
            if (id == 0)
                return SurvivalCurve(h, std::move(p), std::move(P));
            auto& parent = slot(nd.parent);
            for (std::size_t k = 0; k < points; ++k)
                parent[k] *= P[k];
        } else {
            std::vector<double> prod = std::move(slot(id));
            acc[static_cast<std::size_t>(id)].clear();
            acc[static_cast<std::size_t>(id)].shrink_to_fit();
            auto& parent = slot(nd.parent);
            for (std::size_t k = 0; k < points; ++k)
                parent[k] *= std::max(0.0, 1.0 - prod[k]);
        }
    }
    throw StructuralError("tree without root");
}

McEstimate survival_mc(const TreeSpec& tree, double t, std::uint64_t trials, std::uint64_t seed)
{
    if (trials == 0)
        throw ConfigError("survival_mc: trials must be positive");
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError("survival_mc: t must lie in [0,1]");
    tree.validate();
    const std::size_t size = tree.size();
    std::vector<double> birth(size, 0.0);
    std::vector<char> survive(size, 0);
    std::uint64_t successes = 0;
    const auto key = derive_key({seed, static_cast<std::uint64_t>(DrawTag::tree), 0x4d43});
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        CounterRng rng(derive_key({key, trial}));
        birth[0] = t;
        for (std::size_t i = 1; i < size; ++i)
            if (tree.node(static_cast<int>(i)).kind == NodeKind::even)
                birth[i] = rng.uniform();
        for (std::size_t i = size; i-- > 0;) {
            const auto& nd = tree.node(static_cast<int>(i));
            if (nd.kind == NodeKind::odd) {
                // blocks its parent when every child is older and survives
                const double parent_birth = birth[static_cast<std::size_t>(nd.parent)];
                bool blocks = true;
                for (int c : nd.children)
                    if (!(birth[static_cast<std::size_t>(c)] < parent_birth && survive[static_cast<std::size_t>(c)])) {
                        blocks = false;
                        break;
                    }
                survive[i] = blocks;
            } else {
                bool alive = true;
                for (int c : nd.children)
                    if (survive[static_cast<std::size_t>(c)]) {
                        alive = false;
                        break;
                    }
                survive[i] = alive;
            }
        }
        successes += survive[0] ? 1 : 0;
    }
    McEstimate est;
    est.trials = trials;
    est.mean = static_cast<double>(successes) / static_cast<double>(trials);
    est.standard_error = std::sqrt(est.mean * (1 - est.mean) / static_cast<double>(trials));
    return est;
}

SurvivalCurve regular_tree_dp(double k, int arity, int c, double t_max, double h)
{
    if (!(k >= 1) || arity < 1 || c < 0)
        throw ConfigError("regular_tree_dp: need k >= 1, arity >= 1, c >= 0");
    const std::size_t points = grid_points(t_max, h);
    const double step = t_max / static_cast<double>(points - 1);
    std::vector<double> p(points, 1.0);
    auto P = cumulative_trapezoid(p, step);
    for (int level = 0; level < c; ++level) {
        for (std::size_t q = 0; q < points; ++q)
            p[q] = pow_complement(std::pow(P[q], arity), k);
        P = cumulative_trapezoid(p, step);
    }
    return SurvivalCurve(step, std::move(p), std::move(P));
}

RescaledCurve::RescaledCurve(double k, double step, std::vector<double> P_hat)
    : k_(k), h_(step), P_hat_(std::move(P_hat))
{
}

double RescaledCurve::p_hat_of(double v) const noexcept
{
    const double v2 = v * v;
    return pow_complement(v2 * v2 * v / (2 * k_), k_);
}

double RescaledCurve::P_hat(double x) const { return interpolate(P_hat_, h_, x); }

double RescaledCurve::p_hat(double x) const { return p_hat_of(P_hat(x)); }

RescaledCurve t4_fixed_point(double k, double x_max, double h)
{
    if (!(k >= 1))
        throw ConfigError("t4_fixed_point: k must be at least 1");
    const std::size_t points = grid_points(x_max, h);
    const double step = x_max / static_cast<double>(points - 1);
    RescaledCurve shape(k, step, {0.0, 0.0});
    std::vector<double> P(points, 0.0);
    double y = 0.0;
    for (std::size_t q = 1; q < points; ++q) {
        const double k1 = shape.p_hat_of(y);
        const double k2 = shape.p_hat_of(y + 0.5 * step * k1);
        const double k3 = shape.p_hat_of(y + 0.5 * step * k2);
        const double k4 = shape.p_hat_of(y + step * k3);
        y += step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        P[q] = y;
    }
    return RescaledCurve(k, step, std::move(P));
}

std::vector<TruncationRow> truncation_study(double k, std::span<const int> depths, double x, double h)
{
    if (!(x > 0))
        throw ConfigError("truncation_study: x must be positive");
    const double scale = std::pow(2 * k, 0.2);
    const double t = x / scale;
    if (t > 1.0)
        throw DomainError("truncation_study: root birthtime beyond 1 in native units");
    const auto limit_curve = t4_fixed_point(k, x, std::min(h, x / 10));
    const double limit = limit_curve.p_hat(x);
    std::vector<TruncationRow> rows;
    for (int c : depths) {
        const auto steps = std::max<long long>(1, std::llround(x / h));
        const double native_step = t / static_cast<double>(steps);
        const auto curve = regular_tree_dp(k, 5, c, t, native_step);
        TruncationRow row;
        row.c = c;
        row.p_truncated = curve.p_values().back();
        row.p_limit = limit;
        row.signed_error = row.p_truncated - limit;
        row.error = std::abs(row.signed_error);
        rows.push_back(row);
    }
    return rows;
}

} // namespace k4f
