#include "qdirac/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qdirac/bigfloat.hpp"
#include "qdirac/errors.hpp"

namespace qdirac {

namespace {

constexpr int kCancellationMargin = 20;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

const char* boundary_case_name(BoundaryCase c) {
    switch (c) {
        case BoundaryCase::Case1i: return "1i";
        case BoundaryCase::Case1ii: return "1ii";
        case BoundaryCase::Case2i: return "2i";
        case BoundaryCase::Case2ii: return "2ii";
    }
    return "?";
}

std::optional<BoundaryCase> classify_boundary(const BoundarySpec& b) {
    const bool left1 = (b.k11 == 0.0 && b.k12 != 0.0);
    const bool left2 = (b.k12 == 0.0 && b.k11 != 0.0);
    const bool right_i = (b.k21 == 0.0 && b.k22 != 0.0);
    const bool right_ii = (b.k22 == 0.0 && b.k21 != 0.0);
    if (left1 && right_i) return BoundaryCase::Case1i;
    if (left1 && right_ii) return BoundaryCase::Case1ii;
    if (left2 && right_i) return BoundaryCase::Case2i;
    if (left2 && right_ii) return BoundaryCase::Case2ii;
    return std::nullopt;
}

namespace {

double case_exponent(BoundaryCase c, int m) {
    switch (c) {
        case BoundaryCase::Case1i:
        case BoundaryCase::Case1ii: return -(m - 0.5);
        case BoundaryCase::Case2i: return -(m - 1.0);
        case BoundaryCase::Case2ii: return -double(m);
    }
    return 0.0;
}

}  // namespace

double asymptotic_eigenvalue(BoundaryCase c, const QLattice& lattice, int m) {
    if (m < 1) throw std::domain_error("asymptotic_eigenvalue: m must be >= 1");
    return std::pow(lattice.q, case_exponent(c, m)) /
           (lattice.a * (1.0 - lattice.q));
}

DeltaEval char_delta_eval(const Problem& problem, const QTrigContext& ctx,
                          double lambda) {
    const QLattice& lat = *problem.lattice;
    const BoundarySpec& b = problem.boundary;
    int bits = ctx.precision_bits();
    if (ctx.escalation_enabled() &&
        std::fabs(lambda) * lat.a * (1.0 - lat.q) > ctx.escalation_threshold())
        bits = ctx.extended_bits();

    // noise floor of the march ~ 2^(amp + scale - bits); precision is lost
    // once |Delta| sinks within kCancellationMargin bits of it
    const double scale_log2 =
        log2_abs(std::max(std::fabs(b.k11), std::fabs(b.k12))) +
        log2_abs(std::max(std::fabs(b.k21), std::fabs(b.k22)));

    DeltaEval out;
    for (;;) {
        double cancel;
        bool finite;
        if (bits <= 53) {
            auto rr = detail::propagate_raw(problem, lambda);
            const double delta =
                b.k21 * rr.y1.front() + b.k22 * rr.y2_ext;
            out.value = delta;
            out.sign = sign_of(delta);
            out.amp_log2 = rr.amp_log2;
            cancel = rr.amp_log2 + scale_log2 - log2_abs(delta);
            finite = rr.finite && std::isfinite(delta);
        } else {
            auto bd = detail::propagate_delta_big(problem, lambda, bits);
            out.value = bd.value;
            out.sign = bd.sign;
            out.amp_log2 = bd.amp_log2;
            cancel = bd.amp_log2 + scale_log2 - bd.delta_log2;
            finite = true;
        }
        out.bits_used = bits;
        out.overflow = !finite;
        out.precision_loss = !finite || cancel > bits - kCancellationMargin;
        if (out.precision_loss && ctx.escalation_enabled() &&
            bits < ctx.extended_bits()) {
            bits = ctx.extended_bits();
            continue;
        }
        return out;
    }
}

double char_delta(const Problem& problem, const QTrigContext& ctx, double lambda) {
    return char_delta_eval(problem, ctx, lambda).value;
}

double q_inner_product(const Spinor& s1, const Spinor& s2) {
    if (!same_grid(s1.y1.lattice(), s2.y1.lattice()))
        throw std::invalid_argument("q_inner_product: spinors on different lattices");
    const int N = s1.y1.depth();
    std::vector<double> prod(static_cast<std::size_t>(N) + 1);
    for (int n = 0; n <= N; ++n)
        prod[static_cast<std::size_t>(n)] =
            s1.y1.value(n) * s2.y1.value(n) + s1.y2.value(n) * s2.y2.value(n);
    const double zl1 = s1.y1.zero_limit() && s2.y1.zero_limit()
                           ? *s1.y1.zero_limit() * *s2.y1.zero_limit()
                           : prod.back();
    const double zl2 = s1.y2.zero_limit() && s2.y2.zero_limit()
                           ? *s1.y2.zero_limit() * *s2.y2.zero_limit()
                           : 0.0;
    LatticeFn f(s1.y1.lattice_ptr(), std::move(prod), std::nullopt,
                s1.y1.zero_limit() && s2.y1.zero_limit() ? zl1 + zl2 : zl1);
    return jackson_integral(f, 0);
}

double simplicity_check(const Problem& problem, const EigenResult& eig) {
    const double phi1_a = eig.boundary_phi1;
    const double phi2_e = eig.boundary_phi2_ext;
    double scale = 1.0;
    for (double v : eig.phi.y1.values()) scale = std::max(scale, std::fabs(v));
    for (double v : eig.phi.y2.values()) scale = std::max(scale, std::fabs(v));
    if (std::fabs(phi1_a) <= 1e-250 * scale && std::fabs(phi2_e) <= 1e-250 * scale)
        throw NumericError(
            NumericError::Kind::DegenerateNormalization,
            "simplicity_check: phi1(a) and phi2(a/q) both vanish at lambda = " +
                std::to_string(eig.lambda));
    const double c = (std::fabs(phi2_e) >= std::fabs(phi1_a))
                         ? problem.boundary.k21 / phi2_e
                         : -problem.boundary.k22 / phi1_a;
    return std::fabs(eig.delta_prime - c * eig.q_norm_sq) /
           std::fabs(eig.delta_prime);
}

double eigenfunction_asymptotics_check(const Problem& problem,
                                       const QTrigContext& ctx,
                                       const EigenResult& eig, int min_index) {
    if (eig.index < min_index)
        throw std::invalid_argument(
            "eigenfunction_asymptotics_check: index below asymptotic regime");
    const QLattice& lat = *problem.lattice;
    const double lambda = eig.lambda;
    const double sq = std::sqrt(lat.q);
    const double k11 = problem.boundary.k11, k12 = problem.boundary.k12;
    const double logq = std::log(lat.q);

    double worst = 0.0;
    for (int n = 0; n <= lat.depth; ++n) {
        const double x = lat.node(n);
        const double lead1 =
            k12 * q_cos(ctx, lambda * x) - k11 * q_sin(ctx, lambda * x);
        const double lead2 = -k12 * sq * q_sin(ctx, lambda * sq * x) -
                             k11 * q_cos(ctx, lambda * sq * x);
        const double w1 = std::log(std::fabs(lambda) * x * (1.0 - lat.q));
        const double w2 = std::log(std::fabs(lambda) * sq * x * (1.0 - lat.q));
        const double env1 = std::exp(-w1 * w1 / logq) / std::fabs(lambda);
        const double env2 = std::exp(-w2 * w2 / logq) / std::fabs(lambda);
        worst = std::max(worst, std::fabs(eig.phi.y1.value(n) - lead1) / env1);
        worst = std::max(worst, std::fabs(eig.phi.y2.value(n) - lead2) / env2);
    }
    return worst;
}

namespace {

struct RootCandidate {
    double lambda = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};
    double residual = 0.0;
    bool flagged = false;
};

// Bisection on a sign-changing bracket; signs come from char_delta_eval so
// precision escalation applies automatically near the root.
RootCandidate refine_root(const Problem& pb, const QTrigContext& ctx, double lo,
                          double hi, int slo, double rel_tol, bool* precision_loss) {
    RootCandidate rc;
    double a = lo, b = hi;
    int sa = slo;
    for (int it = 0; it < 300; ++it) {
        if ((b - a) <= rel_tol * std::max(std::fabs(a), std::fabs(b))) break;
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        DeltaEval e = char_delta_eval(pb, ctx, mid);
        *precision_loss = *precision_loss || e.precision_loss;
        if (e.sign == 0) {
            a = b = mid;
            break;
        }
        if (e.sign == sa) {
            a = mid;
            sa = e.sign;
        } else {
            b = mid;
        }
    }
    rc.lambda = 0.5 * (a + b);
    rc.bracket = {a, b};
    DeltaEval e = char_delta_eval(pb, ctx, rc.lambda);
    rc.residual = std::fabs(e.value);
    rc.flagged = e.precision_loss;
    return rc;
}

double delta_prime_fd(const Problem& pb, const QTrigContext& ctx, double lambda,
                      bool* precision_loss) {
    const double h = 1e-6 * std::max(1.0, std::fabs(lambda));
    DeltaEval ep = char_delta_eval(pb, ctx, lambda + h);
    DeltaEval em = char_delta_eval(pb, ctx, lambda - h);
    *precision_loss = *precision_loss || ep.precision_loss || em.precision_loss;
    return (ep.value - em.value) / (2.0 * h);
}

EigenResult make_result(const Problem& pb, const QTrigContext& ctx, int index,
                        RootCandidate rc, std::optional<BoundaryCase> bcase,
                        bool* precision_loss) {
    // The double bracket pins lambda to ~1e-12 relative; the boundary pair
    // and the outer eigenfunction samples need the root far more precisely
    // than that, so the march is re-run at an extended-precision root.
    SolutionAtLambda sol = propagate(pb, rc.lambda);
    double boundary_phi1 = sol.phi.y1.value(0);
    double boundary_phi2 = sol.phi2_ext;
    if (ctx.escalation_enabled() && rc.bracket.second > rc.bracket.first) {
        auto pol = detail::polish_root_big(pb, rc.bracket.first,
                                           rc.bracket.second,
                                           ctx.extended_bits());
        rc.lambda = pol.lambda;
        boundary_phi1 = pol.phi1_a;
        boundary_phi2 = pol.phi2_ext;
        SolveFlags flags = sol.flags;
        sol = detail::assemble_solution(pb, pol.lambda, std::move(pol.y1),
                                        std::move(pol.y2), pol.phi2_ext,
                                        SolveMethod::Recursion, flags);
        rc.residual = pol.residual;
    }
    bool pl = rc.flagged;
    const double dprime = delta_prime_fd(pb, ctx, rc.lambda, &pl);

    EigenResult res{index,
                    rc.lambda,
                    std::move(sol.phi),
                    sol.phi2_ext,
                    0.0,
                    dprime,
                    rc.bracket,
                    rc.residual,
                    kNaN,
                    sol.flags,
                    boundary_phi1,
                    boundary_phi2};
    res.flags.precision_loss = res.flags.precision_loss || pl;
    res.q_norm_sq = q_inner_product(res.phi, res.phi);
    if (!(res.q_norm_sq > 0.0))
        throw NumericError(NumericError::Kind::DegenerateNormalization,
                           "eigenfunction with non-positive q-norm");
    if (bcase && index >= 1)
        res.asymptotic_ratio =
            rc.lambda / asymptotic_eigenvalue(*bcase, *pb.lattice, index);
    *precision_loss = *precision_loss || res.flags.precision_loss;
    return res;
}

}  // namespace

SpectrumReport find_eigenvalues(const Problem& problem, const QTrigContext& ctx,
                                int count, bool both_signs,
                                const SpectrumOptions& options) {
    if (count < 1) throw std::domain_error("find_eigenvalues: count must be >= 1");
    const QLattice& lat = *problem.lattice;
    const auto bcase = classify_boundary(problem.boundary);

    // Seeds set the scan window; for generic boundaries the sin-type spacing
    // q^{-m} is the coarser (safer) envelope. The floor term keeps the scan
    // below the first root even when q is close to 1, where the seeds carry
    // O(q^m) ~ O(1) errors.
    auto seed = [&](int m) {
        return bcase ? asymptotic_eigenvalue(*bcase, lat, m)
                     : std::pow(lat.q, -double(m)) / (lat.a * (1.0 - lat.q));
    };
    const double lo =
        std::min(seed(1) * std::pow(lat.q, double(options.lead_octaves)),
                 0.5 * std::sqrt(lat.q * (1.0 + lat.q)) / lat.a);
    const double hi = seed(count) / lat.q;
    const double step = std::pow(lat.q, -1.0 / options.scan_points_per_octave);
    // index from which the seed error is far below the octave width
    int trusted_from = 5;
    while (trusted_from <= count &&
           std::pow(lat.q, trusted_from) > 0.05 * (1.0 - lat.q))
        ++trusted_from;

    bool any_precision_loss = false;

    // Scans |lambda| through [lo, hi] on the geometric grid; brackets and
    // bisection run in signed lambda coordinates.
    auto scan_axis = [&](double sign) {
        std::vector<RootCandidate> roots;
        double x = lo;
        DeltaEval fx = char_delta_eval(problem, ctx, sign * x);
        any_precision_loss = any_precision_loss || fx.precision_loss;
        while (x < hi) {
            const double y = std::min(x * step, hi);
            DeltaEval fy = char_delta_eval(problem, ctx, sign * y);
            any_precision_loss = any_precision_loss || fy.precision_loss;
            if (fx.sign != 0 && fy.sign != 0 && fx.sign != fy.sign) {
                const double blo = (sign > 0) ? x : -y;
                const double bhi = (sign > 0) ? y : -x;
                const int slo = (sign > 0) ? fx.sign : fy.sign;
                roots.push_back(refine_root(problem, ctx, blo, bhi, slo,
                                            options.refine_tol,
                                            &any_precision_loss));
            } else if (fx.sign == 0) {
                RootCandidate rc;
                rc.lambda = sign * x;
                rc.bracket = {sign * x, sign * x};
                rc.residual = 0.0;
                roots.push_back(rc);
            }
            if (y >= hi) break;
            x = y;
            fx = fy;
        }
        return roots;  // |lambda| ascending
    };

    SpectrumReport report;

    // positive axis
    auto pos = scan_axis(+1.0);
    if (static_cast<int>(pos.size()) > count) pos.resize(static_cast<std::size_t>(count));
    // lambda = 0 is never crossed by the geometric grid
    {
        auto rr = detail::propagate_raw(problem, 0.0);
        const double d0 = problem.boundary.k21 * rr.y1.front() +
                          problem.boundary.k22 * rr.y2_ext;
        const double scale =
            (std::fabs(problem.boundary.k21) + std::fabs(problem.boundary.k22)) *
            (std::fabs(rr.y1.front()) + std::fabs(rr.y2_ext) +
             std::fabs(problem.boundary.k11) + std::fabs(problem.boundary.k12));
        if (std::fabs(d0) <= 1e-10 * scale) {
            RootCandidate rc;
            rc.lambda = 0.0;
            rc.bracket = {-options.refine_tol, options.refine_tol};
            rc.residual = std::fabs(d0);
            report.eigenvalues.push_back(
                make_result(problem, ctx, 0, rc, bcase, &any_precision_loss));
        }
    }
    for (std::size_t i = 0; i < pos.size(); ++i)
        report.eigenvalues.push_back(make_result(problem, ctx,
                                                 static_cast<int>(i) + 1, pos[i],
                                                 bcase, &any_precision_loss));

    if (both_signs) {
        auto neg = scan_axis(-1.0);
        if (static_cast<int>(neg.size()) > count)
            neg.resize(static_cast<std::size_t>(count));
        for (std::size_t i = 0; i < neg.size(); ++i)
            report.eigenvalues.push_back(make_result(problem, ctx,
                                                     -(static_cast<int>(i) + 1),
                                                     neg[i], bcase,
                                                     &any_precision_loss));
    }

    std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
              [](const EigenResult& x, const EigenResult& y) {
                  return x.lambda < y.lambda;
              });

    // one sign change per octave window in the asymptotic regime
    bool missed = false;
    for (int m = trusted_from; m <= count; ++m) {
        const double c = seed(m);
        const double wlo = c * std::sqrt(lat.q), whi = c / std::sqrt(lat.q);
        int in_window = 0;
        for (const auto& e : report.eigenvalues)
            if (e.lambda >= wlo && e.lambda < whi) ++in_window;
        if (in_window != 1) missed = true;
    }

    // normalized inner products
    const std::size_t K = report.eigenvalues.size();
    report.orthogonality_matrix.assign(K, std::vector<double>(K, 0.0));
    std::vector<double> norms(K);
    for (std::size_t i = 0; i < K; ++i)
        norms[i] = std::sqrt(report.eigenvalues[i].q_norm_sq);
    double orth_max = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v =
                (i == j) ? 1.0
                         : q_inner_product(report.eigenvalues[i].phi,
                                           report.eigenvalues[j].phi) /
                               (norms[i] * norms[j]);
            report.orthogonality_matrix[i][j] = v;
            report.orthogonality_matrix[j][i] = v;
            if (i != j) orth_max = std::max(orth_max, std::fabs(v));
        }
    }

    double simp_max = 0.0;
    for (const auto& e : report.eigenvalues)
        simp_max = std::max(simp_max, simplicity_check(problem, e));

    double asym_max = 0.0;
    if (bcase) {
        for (const auto& e : report.eigenvalues) {
            if (e.index < 5) continue;
            asym_max = std::max(asym_max, std::fabs(e.asymptotic_ratio - 1.0) /
                                              std::pow(lat.q, e.index));
        }
    }

    int positive_found = 0;
    for (const auto& e : report.eigenvalues)
        if (e.index >= 1) ++positive_found;

    report.flags.reality_ok = positive_found == count;
    report.flags.orthogonality_ok = orth_max <= options.orthogonality_tol;
    report.flags.simplicity_ok = simp_max <= options.simplicity_tol;
    report.flags.asymptotics_ok = !bcase || asym_max <= options.asymptotic_tol;
    report.flags.orthogonality_max = orth_max;
    report.flags.simplicity_max_defect = simp_max;
    report.flags.asymptotic_max_dev = asym_max;
    report.flags.missed_eigenvalue_warning = missed;
    report.flags.precision_loss = any_precision_loss;
    return report;
}

}  // namespace qdirac
