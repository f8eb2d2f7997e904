#include "qdirac/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "qdirac/errors.hpp"

namespace qdirac {

QLattice build_lattice(double q, double a, int depth) {
    if (!(q > 0.0) || !(q < 1.0))
        throw std::domain_error("build_lattice: q must lie in (0,1)");
    if (!(a > 0.0)) throw std::domain_error("build_lattice: a must be positive");
    if (depth < 1) throw std::domain_error("build_lattice: depth must be >= 1");

    QLattice lat;
    lat.q = q;
    lat.a = a;
    lat.depth = depth;
    lat.nodes.resize(static_cast<std::size_t>(depth) + 1);
    double t = a;
    for (int n = 0; n <= depth; ++n) {
        lat.nodes[static_cast<std::size_t>(n)] = t;
        t *= q;
    }
    lat.ext_node = a / q;
    return lat;
}

QLatticePtr make_lattice(double q, double a, int depth) {
    return std::make_shared<const QLattice>(build_lattice(q, a, depth));
}

bool same_grid(const QLattice& x, const QLattice& y) {
    return x.q == y.q && x.a == y.a && x.depth == y.depth;
}

LatticeFn::LatticeFn(QLatticePtr lattice, std::vector<double> values,
                     std::optional<double> ext_value,
                     std::optional<double> zero_limit)
    : lattice_(std::move(lattice)),
      values_(std::move(values)),
      ext_value_(ext_value),
      zero_limit_(zero_limit) {
    if (!lattice_) throw std::invalid_argument("LatticeFn: null lattice");
    if (values_.size() != static_cast<std::size_t>(lattice_->depth) + 1)
        throw std::invalid_argument("LatticeFn: values length must be depth + 1");
}

LatticeFn sample(QLatticePtr lattice, const std::function<double(double)>& f,
                 std::optional<double> zero_limit, bool with_ext) {
    std::vector<double> vals(lattice->nodes.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = f(lattice->nodes[i]);
    std::optional<double> ext;
    if (with_ext) ext = f(lattice->ext_node);
    return LatticeFn(std::move(lattice), std::move(vals), ext, zero_limit);
}

Spinor::Spinor(LatticeFn y1_in, LatticeFn y2_in)
    : y1(std::move(y1_in)), y2(std::move(y2_in)) {
    if (!same_grid(y1.lattice(), y2.lattice()))
        throw std::invalid_argument("Spinor: components must share one lattice");
}

double q_diff(const LatticeFn& f, int node_index) {
    const QLattice& lat = f.lattice();
    if (node_index == -1) {
        if (!f.ext_value())
            throw std::out_of_range("q_diff: ext_value unset for node_index -1");
        return (*f.ext_value() - f.value(0)) / (lat.ext_node * (1.0 - lat.q));
    }
    if (node_index < 0 || node_index > lat.depth - 1)
        throw std::out_of_range("q_diff: node_index needs a neighbor at q*t_n");
    const double tn = lat.node(node_index);
    return (f.value(node_index) - f.value(node_index + 1)) / (tn * (1.0 - lat.q));
}

ZeroDiffResult q_diff_at_zero(const LatticeFn& f, double tol) {
    if (!f.zero_limit())
        throw std::invalid_argument("q_diff_at_zero: zero_limit unset");
    const QLattice& lat = f.lattice();
    const double f0 = *f.zero_limit();
    const int N = lat.depth;
    const int use = std::min(5, N + 1);
    // two Richardson values are needed for the stabilization estimate
    if (use < 3)
        throw std::invalid_argument("q_diff_at_zero: lattice too shallow");

    // quotients at the deepest `use` nodes, shallow to deep
    std::vector<double> d(static_cast<std::size_t>(use));
    for (int i = 0; i < use; ++i) {
        const int n = N - (use - 1) + i;
        d[static_cast<std::size_t>(i)] = (f.value(n) - f0) / lat.node(n);
    }
    // one Richardson level: e_i = (d_{i+1} - q d_i) / (1 - q) removes the
    // O(t_n) term exactly on the geometric grid
    std::vector<double> e(d.size() - 1);
    for (std::size_t i = 0; i + 1 < d.size(); ++i)
        e[i] = (d[i + 1] - lat.q * d[i]) / (1.0 - lat.q);

    ZeroDiffResult res;
    res.value = e.back();
    res.spread = std::fabs(e.back() - e[e.size() - 2]);
    res.converged = res.spread <= tol * std::max(1.0, std::fabs(res.value));
    return res;
}

double q_inv_diff(const LatticeFn& f, int node_index) {
    if (node_index < 0 || node_index > f.lattice().depth)
        throw std::out_of_range("q_inv_diff: node_index out of range");
    return q_diff(f, node_index - 1);
}

namespace {

// Tail of the Jackson sum over (0, t_N]: a polynomial is fitted through the
// deepest samples (and the zero limit, when declared) and its tail mass is
// integrated in closed form,
//   x(1-q) sum_{n>M} q^n t^j |_{t = x q^n} = t_{N+1}^{j+1} (1-q)/(1-q^{j+1}).
// Wild extrapolations (rough tables) are rejected in favor of the plain
// zero-limit estimate.
double fitted_tail(const LatticeFn& f, double t_next, double mass, double zl) {
    const QLattice& lat = f.lattice();
    const int N = lat.depth;
    const int pts = std::min(4, N + 1);

    std::vector<double> xs, ys;
    if (f.zero_limit()) {
        xs.push_back(0.0);
        ys.push_back(zl);
    }
    for (int j = pts - 1; j >= 0; --j) {
        xs.push_back(lat.node(N - j));
        ys.push_back(f.value(N - j));
    }

    // Newton divided differences, then monomial coefficients
    const std::size_t K = xs.size();
    std::vector<double> dd = ys;
    for (std::size_t level = 1; level < K; ++level)
        for (std::size_t i = K - 1; i >= level; --i)
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);

    std::vector<double> mono{dd[0]};
    std::vector<double> basis{1.0};  // prod_{i<level} (t - x_i)
    for (std::size_t level = 1; level < K; ++level) {
        basis.push_back(0.0);
        for (std::size_t j = basis.size() - 1; j >= 1; --j)
            basis[j] = basis[j - 1] - xs[level - 1] * basis[j];
        basis[0] *= -xs[level - 1];
        mono.resize(basis.size(), 0.0);
        for (std::size_t j = 0; j < basis.size(); ++j)
            mono[j] += dd[level] * basis[j];
    }

    double tail = 0.0, tpow = t_next;
    double qpow = lat.q;  // q^{j+1}
    for (std::size_t j = 0; j < mono.size(); ++j) {
        tail += mono[j] * tpow * (1.0 - lat.q) / (1.0 - qpow);
        tpow *= t_next;
        qpow *= lat.q;
    }

    double deep_scale = std::fabs(zl);
    for (std::size_t i = 0; i < ys.size(); ++i)
        deep_scale = std::max(deep_scale, std::fabs(ys[i]));
    if (!std::isfinite(tail) || std::fabs(tail) > 4.0 * mass * deep_scale)
        return mass * zl;
    return tail;
}

}  // namespace

double jackson_integral(const LatticeFn& f, int upper_index) {
    const QLattice& lat = f.lattice();
    if (upper_index < 0 || upper_index > lat.depth)
        throw std::out_of_range("jackson_integral: upper_index out of range");
    const double x = lat.node(upper_index);

    double acc = 0.0;
    double w = 1.0;  // q^j
    for (int j = 0; j + upper_index <= lat.depth; ++j) {
        acc += w * f.value(upper_index + j);
        w *= lat.q;
    }
    // after the loop w = q^{M+1} with M = depth - upper_index
    const double zl = f.zero_limit() ? *f.zero_limit() : f.values().back();
    double tail = x * w * zl;
    // the truncated mass only warrants the fitted estimate when it is
    // numerically visible
    if (w > 1e-15 && lat.depth >= 3)
        tail = fitted_tail(f, x * w, x * w, zl);
    return x * (1.0 - lat.q) * acc + tail;
}

}  // namespace qdirac
