#include "qdirac/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "qdirac/bigfloat.hpp"
#include "qdirac/errors.hpp"

namespace qdirac {

void validate_boundary(const BoundarySpec& b) {
    if (b.k11 == 0.0 && b.k12 == 0.0)
        throw std::invalid_argument("BoundarySpec: (k11, k12) must not both vanish");
    if (b.k21 == 0.0 && b.k22 == 0.0)
        throw std::invalid_argument("BoundarySpec: (k21, k22) must not both vanish");
}

Problem::Problem(QLatticePtr lattice_in, LatticeFn p_in, LatticeFn r_in,
                 BoundarySpec boundary_in)
    : lattice(std::move(lattice_in)),
      p(std::move(p_in)),
      r(std::move(r_in)),
      boundary(boundary_in) {
    if (!lattice) throw std::invalid_argument("Problem: null lattice");
    if (!same_grid(p.lattice(), *lattice) || !same_grid(r.lattice(), *lattice))
        throw std::invalid_argument("Problem: p and r must live on the lattice");
    validate_boundary(boundary);
}

Problem zero_potential_problem(QLatticePtr lattice, BoundarySpec boundary) {
    auto zero = sample(lattice, [](double) { return 0.0; }, 0.0);
    return Problem(lattice, zero, zero, boundary);
}

std::pair<Spinor, Spinor> free_solutions(const QLatticePtr& lattice,
                                         const QTrigContext& ctx, double lambda) {
    if (ctx.q() != lattice->q)
        throw std::invalid_argument("free_solutions: context q must match lattice");
    const double sq = std::sqrt(lattice->q);
    auto cosl = [&](double x) { return q_cos(ctx, lambda * x); };
    auto sinl = [&](double x) { return q_sin(ctx, lambda * x); };

    LatticeFn y11 = sample(lattice, [&](double x) { return cosl(x); }, 1.0);
    LatticeFn y12 = sample(lattice, [&](double x) { return -sq * sinl(sq * x); }, 0.0);
    LatticeFn y21 = sample(lattice, [&](double x) { return sinl(x); }, 0.0);
    LatticeFn y22 = sample(lattice, [&](double x) { return cosl(sq * x); }, 1.0);
    return {Spinor(std::move(y11), std::move(y12)),
            Spinor(std::move(y21), std::move(y22))};
}

namespace detail {

namespace {

// log2(1 + 2^e), guarded against overflow
double log2_1p_exp2(double e) {
    if (e > 50.0) return e;
    if (e < -50.0) return 0.0;
    return std::log2(1.0 + std::exp2(e));
}

// Exact node relations of the system, marched outward from t_N:
//   y2(t_{n-1}) = y2(t_n) + t_n (1-q) (p(t_n) - lambda) y1(t_n)
//   y1(t_{n-1}) = y1(t_n) - t_{n-1} (1-q) (r(t_{n-1}) - lambda) y2(t_{n-1})
// and the same first relation at t_0 for the extension value at a/q.
// amp_log2 accumulates log2 of prod (1 + |c1|)(1 + |c2|), a bound on how far
// the march can amplify perturbations of the initial data.
template <class Real>
struct Marched {
    std::vector<Real> y1, y2;
    Real y2_ext;
    double amp_log2;
};

template <class Real>
Marched<Real> march(const Problem& pb, const Real& lambda, int bits) {
    const QLattice& lat = *pb.lattice;
    const int N = lat.depth;
    const double omq = 1.0 - lat.q;

    auto mk = [bits](double x) {
        (void)bits;
        if constexpr (std::is_same_v<Real, double>)
            return x;
        else
            return BigFloat(x, bits);
    };

    Marched<Real> out{std::vector<Real>(static_cast<std::size_t>(N) + 1, mk(0.0)),
                      std::vector<Real>(static_cast<std::size_t>(N) + 1, mk(0.0)),
                      mk(0.0), 0.0};

    out.y1[static_cast<std::size_t>(N)] = mk(pb.boundary.k12);
    out.y2[static_cast<std::size_t>(N)] = mk(-pb.boundary.k11);

    for (int n = N; n >= 1; --n) {
        const auto i = static_cast<std::size_t>(n);
        const Real c1 = mk(lat.node(n) * omq) * (mk(pb.p.value(n)) - lambda);
        out.y2[i - 1] = out.y2[i] + c1 * out.y1[i];
        const Real c2 =
            mk(lat.node(n - 1) * omq) * (mk(pb.r.value(n - 1)) - lambda);
        out.y1[i - 1] = out.y1[i] - c2 * out.y2[i - 1];
        out.amp_log2 += log2_1p_exp2(log2_abs(c1)) + log2_1p_exp2(log2_abs(c2));
    }
    const Real c0 = mk(lat.node(0) * omq) * (mk(pb.p.value(0)) - lambda);
    out.y2_ext = out.y2[0] + c0 * out.y1[0];
    out.amp_log2 += log2_1p_exp2(log2_abs(c0));
    return out;
}

}  // namespace

RawRecursion propagate_raw(const Problem& problem, double lambda) {
    auto m = march<double>(problem, lambda, 53);
    RawRecursion rr;
    rr.y1 = std::move(m.y1);
    rr.y2 = std::move(m.y2);
    rr.y2_ext = m.y2_ext;
    rr.amp_log2 = m.amp_log2;
    rr.finite = std::isfinite(rr.y2_ext);
    for (double v : rr.y1) rr.finite = rr.finite && std::isfinite(v);
    for (double v : rr.y2) rr.finite = rr.finite && std::isfinite(v);
    return rr;
}

BigDelta propagate_delta_big(const Problem& problem, double lambda, int bits) {
    auto m = march<BigFloat>(problem, BigFloat(lambda, bits), bits);
    const BigFloat delta = BigFloat(problem.boundary.k21, bits) * m.y1[0] +
                           BigFloat(problem.boundary.k22, bits) * m.y2_ext;
    BigDelta d;
    d.value = delta.to_double();
    d.sign = delta.sign();
    d.amp_log2 = m.amp_log2;
    d.delta_log2 = log2_abs(delta);
    return d;
}

PolishedRoot polish_root_big(const Problem& problem, double lo, double hi,
                             int bits) {
    const BoundarySpec& b = problem.boundary;
    auto delta_at = [&](const BigFloat& lam) {
        auto m = march<BigFloat>(problem, lam, bits);
        return BigFloat(b.k21, bits) * m.y1[0] + BigFloat(b.k22, bits) * m.y2_ext;
    };

    BigFloat la(lo, bits), lb(hi, bits);
    const int slo = delta_at(la).sign();
    if (slo != 0) {
        // plain bisection: exact halving, deterministic step count
        const double width0 = hi - lo;
        const double target = std::max(std::fabs(lo), std::fabs(hi)) *
                              std::exp2(-(bits - 40));
        int steps = (width0 > 0.0 && target > 0.0)
                        ? static_cast<int>(std::ceil(std::log2(width0 / target)))
                        : 0;
        steps = std::min(std::max(steps, 0), 4 * bits);
        const BigFloat half(0.5, bits);
        for (int it = 0; it < steps; ++it) {
            BigFloat mid = (la + lb) * half;
            const int sm = delta_at(mid).sign();
            if (sm == 0) {
                la = mid;
                lb = mid;
                break;
            }
            if (sm == slo)
                la = mid;
            else
                lb = mid;
        }
    }

    const BigFloat lam = (la + lb) * BigFloat(0.5, bits);
    auto m = march<BigFloat>(problem, lam, bits);
    PolishedRoot out;
    out.lambda = lam.to_double();
    out.phi1_a = m.y1[0].to_double();
    out.phi2_ext = m.y2_ext.to_double();
    out.y1.reserve(m.y1.size());
    out.y2.reserve(m.y2.size());
    for (const auto& v : m.y1) out.y1.push_back(v.to_double());
    for (const auto& v : m.y2) out.y2.push_back(v.to_double());
    out.residual = std::fabs((BigFloat(b.k21, bits) * m.y1[0] +
                              BigFloat(b.k22, bits) * m.y2_ext)
                                 .to_double());
    return out;
}

SolutionAtLambda assemble_solution(const Problem& pb, double lambda,
                                   std::vector<double> y1, std::vector<double> y2,
                                   double y2_ext, SolveMethod method,
                                   SolveFlags flags) {
    const BoundarySpec& b = pb.boundary;
    LatticeFn f1(pb.lattice, std::move(y1), std::nullopt, b.k12);
    LatticeFn f2(pb.lattice, std::move(y2), y2_ext, -b.k11);
    SolutionAtLambda sol{lambda,  Spinor(std::move(f1), std::move(f2)),
                         y2_ext,  method,
                         0.0,     flags,
                         0,       0.0};
    sol.residual = system_defect(pb, sol);
    return sol;
}

}  // namespace detail

SolutionAtLambda propagate(const Problem& problem, double lambda) {
    if (problem.lattice->depth < 2)
        throw std::invalid_argument("propagate: lattice depth must be >= 2");
    auto rr = detail::propagate_raw(problem, lambda);
    SolveFlags flags;
    flags.overflow = !rr.finite;
    return detail::assemble_solution(problem, lambda, std::move(rr.y1),
                                     std::move(rr.y2), rr.y2_ext,
                                     SolveMethod::Recursion, flags);
}

SolutionAtLambda successive_approx(const Problem& problem, const QTrigContext& ctx,
                                   double lambda, double tol, int max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("successive_approx: tol > 0");
    if (max_iter < 1) throw std::invalid_argument("successive_approx: max_iter >= 1");
    if (ctx.q() != problem.lattice->q)
        throw std::invalid_argument("successive_approx: context q must match lattice");

    const QLattice& lat = *problem.lattice;
    const int N = lat.depth;
    const double q = lat.q;
    const double sq = std::sqrt(q);
    const double k11 = problem.boundary.k11, k12 = problem.boundary.k12;

    SolveFlags flags;
    auto trig = [&](TrigKind kind, double z) {
        TrigEval e = (kind == TrigKind::Cos) ? q_cos_eval(ctx, z) : q_sin_eval(ctx, z);
        flags.precision_loss = flags.precision_loss || e.precision_loss;
        return e.value;
    };

    // trig tables: C,S at lambda t_i for i = 0..N+1 (index N+1 holds the
    // argument lambda q t_N used by the deepest p-integrand sample),
    // Ct,St at lambda sqrt(q) t_i for i = 0..N.
    std::vector<double> C(static_cast<std::size_t>(N) + 2),
        S(static_cast<std::size_t>(N) + 2), Ct(static_cast<std::size_t>(N) + 1),
        St(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) {
        const double t = lat.node(i);
        C[static_cast<std::size_t>(i)] = trig(TrigKind::Cos, lambda * t);
        S[static_cast<std::size_t>(i)] = trig(TrigKind::Sin, lambda * t);
        Ct[static_cast<std::size_t>(i)] = trig(TrigKind::Cos, lambda * sq * t);
        St[static_cast<std::size_t>(i)] = trig(TrigKind::Sin, lambda * sq * t);
    }
    C[static_cast<std::size_t>(N) + 1] = trig(TrigKind::Cos, lambda * q * lat.node(N));
    S[static_cast<std::size_t>(N) + 1] = trig(TrigKind::Sin, lambda * q * lat.node(N));

    // free term, also the zero-limit anchor of every iterate
    std::vector<double> f1(static_cast<std::size_t>(N) + 1),
        f2(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) {
        const auto s = static_cast<std::size_t>(i);
        f1[s] = k12 * C[s] - k11 * S[s];
        f2[s] = -k12 * sq * St[s] - k11 * Ct[s];
    }

    const double p_tail = problem.p.zero_limit() ? *problem.p.zero_limit()
                                                 : problem.p.values().back();
    const double r_tail = problem.r.zero_limit() ? *problem.r.zero_limit()
                                                 : problem.r.values().back();

    std::vector<double> phi1 = f1, phi2 = f2;
    std::vector<double> n1(phi1.size()), n2(phi2.size());
    int iterations = 0;
    double change = 0.0;

    for (int it = 1; it <= max_iter; ++it) {
        // integrand tables g(t_k); the p-integrands sample at q t_k = t_{k+1}
        // and overhang the grid by one at k = N, where the zero limits stand in
        std::vector<double> gpc(phi1.size()), gps(phi1.size()), grc(phi1.size()),
            grs(phi1.size());
        for (int k = 0; k <= N; ++k) {
            const auto s = static_cast<std::size_t>(k);
            const double pk = (k < N) ? problem.p.value(k + 1) : p_tail;
            const double ph1 = (k < N) ? phi1[s + 1] : k12;
            gpc[s] = C[s + 1] * pk * ph1;
            gps[s] = S[s + 1] * pk * ph1;
            grc[s] = Ct[s] * problem.r.value(k) * phi2[s];
            grs[s] = St[s] * problem.r.value(k) * phi2[s];
        }
        const LatticeFn Gpc(problem.lattice, std::move(gpc), std::nullopt, p_tail * k12);
        const LatticeFn Gps(problem.lattice, std::move(gps), std::nullopt, 0.0);
        const LatticeFn Grc(problem.lattice, std::move(grc), std::nullopt, -r_tail * k11);
        const LatticeFn Grs(problem.lattice, std::move(grs), std::nullopt, 0.0);

        change = 0.0;
        for (int i = 0; i <= N; ++i) {
            const auto s = static_cast<std::size_t>(i);
            const double Ac = jackson_integral(Gpc, i);
            const double As = jackson_integral(Gps, i);
            const double Bc = jackson_integral(Grc, i);
            const double Bs = jackson_integral(Grs, i);
            n1[s] = f1[s] + q * (S[s] * Ac - C[s] * As) - (C[s] * Bc + sq * S[s] * Bs);
            n2[s] = f2[s] + q * (Ct[s] * Ac + sq * St[s] * As) +
                    sq * (St[s] * Bc - Ct[s] * Bs);
            change = std::max({change, std::fabs(n1[s] - phi1[s]),
                               std::fabs(n2[s] - phi2[s])});
        }
        phi1.swap(n1);
        phi2.swap(n2);
        iterations = it;
        if (change <= tol) break;
    }
    if (change > tol)
        throw NumericError(NumericError::Kind::NonConvergence,
                           "successive_approx: no fixed point after " +
                               std::to_string(max_iter) +
                               " iterations (last change " +
                               std::to_string(change) + ")");

    // extension through the node relation at t_0, as in the recursion
    const double y2_ext = phi2[0] + lat.node(0) * (1.0 - q) *
                                        (problem.p.value(0) - lambda) * phi1[0];
    SolutionAtLambda sol = detail::assemble_solution(
        problem, lambda, std::move(phi1), std::move(phi2), y2_ext,
        SolveMethod::IntegralEquation, flags);
    sol.iterations = iterations;
    sol.last_change = change;
    return sol;
}

double wronskian(const Spinor& s1, const Spinor& s2, int node_index) {
    const QLattice& lat = s1.y1.lattice();
    if (node_index < 0 || node_index > lat.depth)
        throw std::out_of_range("wronskian: node_index out of range");
    double y2a, y2b;
    if (node_index == 0) {
        if (!s1.y2.ext_value() || !s2.y2.ext_value())
            throw std::out_of_range("wronskian: extension value unavailable");
        y2a = *s2.y2.ext_value();
        y2b = *s1.y2.ext_value();
    } else {
        y2a = s2.y2.value(node_index - 1);
        y2b = s1.y2.value(node_index - 1);
    }
    return s1.y1.value(node_index) * y2a - s2.y1.value(node_index) * y2b;
}

double system_defect(const Problem& problem, const SolutionAtLambda& sol) {
    const QLattice& lat = *problem.lattice;
    const int N = lat.depth;
    const double lambda = sol.lambda;
    const LatticeFn& y1 = sol.phi.y1;
    const LatticeFn& y2 = sol.phi.y2;

    // Residuals are weighted by the local Jackson measure t_n (1-q): at deep
    // nodes the bare difference quotient divides representation noise by t_n
    // and would swamp any true defect.
    double worst = 0.0;
    // first equation at t_n: -(1/q) D_{q^-1} y2 + (p - lambda) y1 = 0
    const int lo1 = y2.ext_value() ? 0 : 1;
    for (int n = lo1; n <= N; ++n) {
        const double d = -q_inv_diff(y2, n) / lat.q +
                         (problem.p.value(n) - lambda) * y1.value(n);
        worst = std::max(worst, std::fabs(d) * lat.node(n) * (1.0 - lat.q));
    }
    // second equation at t_n: D_q y1 + (r - lambda) y2 = 0
    for (int n = 0; n <= N - 1; ++n) {
        const double d =
            q_diff(y1, n) + (problem.r.value(n) - lambda) * y2.value(n);
        worst = std::max(worst, std::fabs(d) * lat.node(n) * (1.0 - lat.q));
    }
    return worst;
}

}  // namespace qdirac
