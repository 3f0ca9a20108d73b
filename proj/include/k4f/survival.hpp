#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace k4f {

enum class NodeKind : std::uint8_t { even, odd };

// Rooted alternating tree. Node 0 is the (even) root; every node's parent
// has a smaller index, so index order is a topological order.
//
// Even nodes carry birthtimes; an odd node groups the even grandchildren
// that must all be born before its parent to threaten it. A node survives
// unless some odd child has every child born earlier and surviving.
class TreeSpec {
public:
    struct Node {
        int parent = -1;
        NodeKind kind = NodeKind::even;
        std::vector<int> children;
    };

    TreeSpec();   // a single leaf root

    int add_odd(int even_parent);
    int add_even(int odd_parent);

    // root with k odd children, each holding one leaf
    static TreeSpec star(int k);
    // every even node above depth 2c has k odd children of the given arity
    static TreeSpec regular(int k, int arity, int c);

    std::size_t size() const noexcept { return nodes_.size(); }
    const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    int depth() const;

    // Throws StructuralError: odd leaves, odd root, parent order, kinds.
    void validate() const;

    // Line format: "node <id> parent <id|root> kind even|odd arity <j>",
    // arity = number of children, parents listed before children.
    static TreeSpec parse(std::istream& is);
    void write(std::ostream& os) const;

private:
    std::vector<Node> nodes_;
};

struct TreeGenOptions {
    int max_nodes = 40;
    int max_depth = 6;          // in edges, even
    int max_odd_children = 3;
    int max_arity = 3;
};

// Seeded random alternating tree within the given limits.
TreeSpec random_tree(std::uint64_t seed, const TreeGenOptions& opts = {});

// p(t): survival given root birthtime t; P(t) = integral of p over [0,t].
class SurvivalCurve {
public:
    SurvivalCurve(double step, std::vector<double> p, std::vector<double> P);

    double step() const noexcept { return h_; }
    std::size_t size() const noexcept { return p_.size(); }
    double t_max() const noexcept { return h_ * static_cast<double>(p_.size() - 1); }
    std::span<const double> p_values() const noexcept { return p_; }
    std::span<const double> P_values() const noexcept { return P_; }

    // Linear interpolation; throws DomainError outside [0, t_max].
    double p(double t) const;
    double P(double t) const;

private:
    double h_;
    std::vector<double> p_;
    std::vector<double> P_;
};

// Bottom-up quadrature DP on [0,1]:
//   p_v(t) = prod over odd children (1 - prod over grandchildren P_w(t)),
// P by cumulative trapezoid.
SurvivalCurve survival_dp(const TreeSpec& tree, double grid_step = 1e-3);

struct McEstimate {
    double mean = 0;
    double standard_error = 0;
    std::uint64_t trials = 0;
};

// Root birthtime fixed to t, all other even nodes uniform in [0,1).
McEstimate survival_mc(const TreeSpec& tree, double t, std::uint64_t trials, std::uint64_t seed);

// Same DP as survival_dp on TreeSpec::regular(k, arity, c), by levels, so
// k may be far beyond explicit tree sizes. Grid [0, t_max] with step h.
SurvivalCurve regular_tree_dp(double k, int arity, int c, double t_max, double h);

// Infinite (k, arity-5) tree: P' = (1 - P^5)^k, P(0) = 0, by RK4, reported
// in rescaled units x = t (2k)^{1/5}, P_hat = (2k)^{1/5} P. P_hat tends to
// Phi as k grows. The integration runs over the whole requested x range
// even where t exceeds 1.
class RescaledCurve {
public:
    RescaledCurve(double k, double step, std::vector<double> P_hat);

    double k() const noexcept { return k_; }
    double step() const noexcept { return h_; }
    double x_max() const noexcept { return h_ * static_cast<double>(P_hat_.size() - 1); }
    std::size_t size() const noexcept { return P_hat_.size(); }
    std::span<const double> P_hat_values() const noexcept { return P_hat_; }

    double P_hat(double x) const;
    // survival probability at rescaled root birthtime x: (1 - P_hat^5/(2k))^k
    double p_hat(double x) const;
    double p_hat_of(double P_hat_value) const noexcept;

private:
    double k_;
    double h_;
    std::vector<double> P_hat_;
};

RescaledCurve t4_fixed_point(double k, double x_max, double h = 1e-4);

struct TruncationRow {
    int c = 0;                 // depth 2c
    double p_truncated = 0;
    double p_limit = 0;
    double error = 0;          // |p_truncated - p_limit|
    double signed_error = 0;   // p_truncated - p_limit
};

// Depth-2c truncations (leaves survive) of the regular (k, 5) tree at
// rescaled root birthtime x, against the fixed-point limit.
std::vector<TruncationRow> truncation_study(double k, std::span<const int> depths, double x, double h = 1e-3);

} // namespace k4f
