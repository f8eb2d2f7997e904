#pragma once

// q-calculus primitives on the truncated q-geometric lattice {a q^n}:
// lattice construction, q-difference operators, Jackson q-integration.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace qdirac {

// Truncated q-geometric grid t_n = a q^n, n = 0..depth, plus the extension
// node a/q. Nodes are generated by repeated multiplication by q so that
// t_{n+1} == q * t_n holds bit-exactly; the difference operators rely on it.
struct QLattice {
    double q = 0.0;
    double a = 0.0;
    int depth = 0;
    std::vector<double> nodes;  // depth + 1 entries, strictly decreasing
    double ext_node = 0.0;      // a / q

    double node(int n) const { return nodes[static_cast<std::size_t>(n)]; }
    int size() const { return depth + 1; }
};

using QLatticePtr = std::shared_ptr<const QLattice>;

QLattice build_lattice(double q, double a, int depth);
QLatticePtr make_lattice(double q, double a, int depth);

// Value identity: same (q, a, depth).
bool same_grid(const QLattice& x, const QLattice& y);

// Real values sampled on a QLattice, with optional value at the extension
// node and optional limit at zero (q-regularity).
class LatticeFn {
public:
    LatticeFn(QLatticePtr lattice, std::vector<double> values,
              std::optional<double> ext_value = std::nullopt,
              std::optional<double> zero_limit = std::nullopt);

    const QLattice& lattice() const { return *lattice_; }
    const QLatticePtr& lattice_ptr() const { return lattice_; }
    const std::vector<double>& values() const { return values_; }
    double value(int n) const { return values_[static_cast<std::size_t>(n)]; }
    std::optional<double> ext_value() const { return ext_value_; }
    std::optional<double> zero_limit() const { return zero_limit_; }
    int depth() const { return lattice_->depth; }

private:
    QLatticePtr lattice_;
    std::vector<double> values_;
    std::optional<double> ext_value_;
    std::optional<double> zero_limit_;
};

// Sample f on every node (and the extension node when with_ext).
LatticeFn sample(QLatticePtr lattice, const std::function<double(double)>& f,
                 std::optional<double> zero_limit = std::nullopt,
                 bool with_ext = true);

// Pair (y1, y2) on one shared lattice.
struct Spinor {
    Spinor(LatticeFn y1_in, LatticeFn y2_in);
    LatticeFn y1;
    LatticeFn y2;
};

// D_q f at node_index: (f(t_n) - f(t_{n+1})) / (t_n (1 - q)).
// node_index == -1 differentiates at the extension node, using f(a/q), f(a).
double q_diff(const LatticeFn& f, int node_index);

// Limit of (f(t_n) - f(0)) / t_n estimated from the deepest nodes with one
// level of Richardson extrapolation (geometric ratio q cancels the linear
// error term). Non-convergence is reported, not thrown.
struct ZeroDiffResult {
    double value = 0.0;
    bool converged = false;
    double spread = 0.0;  // |last - previous| estimate disagreement
};
ZeroDiffResult q_diff_at_zero(const LatticeFn& f, double tol = 1e-8);

// D_{q^-1} f at node_index; identical arithmetic to q_diff at node_index - 1.
double q_inv_diff(const LatticeFn& f, int node_index);

// Jackson q-integral from 0 to t_{upper_index}. The series is truncated at
// the lattice depth; the tail is approximated by the zero limit times the
// remaining geometric mass (deepest sample when no limit is declared).
double jackson_integral(const LatticeFn& f, int upper_index);

}  // namespace qdirac
