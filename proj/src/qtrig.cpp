#include "qdirac/qtrig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qdirac/bigfloat.hpp"
#include "qdirac/errors.hpp"

namespace qdirac {

namespace {

constexpr int kCancellationMargin = 20;  // bits of mantissa kept in reserve
constexpr long kMaxTerms = 200000;

// Core series loop, shared by the double and BigFloat paths. Sums
//   cos: sum_n (-1)^n q^{n^2} w^{2n} / (q;q)_{2n}
//   sin: w * sum_n (-1)^n q^{n(n+1)} w^{2n} / (q;q)_{2n+1}
// via the term-ratio recurrence. w enters only through w^2, so evenness of
// cos and oddness of sin hold exactly.
template <class Real>
struct SeriesResult {
    Real sum;
    double max_term_log2;
};

template <class Real>
Real make_real(double x, int bits);
template <>
double make_real<double>(double x, int) {
    return x;
}
template <>
BigFloat make_real<BigFloat>(double x, int bits) {
    return BigFloat(x, bits);
}

template <class Real>
SeriesResult<Real> sum_series(TrigKind kind, const Real& w, const Real& q,
                              int bits) {
    const Real w2 = w * w;
    // leading terms: 1 (cos) and w/(q;q)_1 = z (sin)
    Real term = (kind == TrigKind::Cos) ? make_real<Real>(1.0, bits)
                                        : w / (1.0 - q);
    Real sum = term;
    double max_log2 = log2_abs(term);

    // q^{e} factors advance by q^2 per term; the first ratio uses
    // q^{1}, q^{2} (cos) or q^{2}, q^{3} (sin).
    Real qp1 = (kind == TrigKind::Cos) ? q : q * q;
    Real qp2 = qp1 * q;
    const double log2_w2 = 2.0 * log2_abs(w);

    for (long n = 0; n < kMaxTerms; ++n) {
        // ratio t_{n+1}/t_n = -qp1 * w2 / ((1 - qp1)(1 - qp2))
        term = -(term * qp1 * w2) / ((1.0 - qp1) * (1.0 - qp2));
        if (!is_finite(term))
            throw NumericError(NumericError::Kind::Overflow,
                               "q-trig series term overflow");
        sum += term;
        const double tl = log2_abs(term);
        if (tl > max_log2) max_log2 = tl;

        // past the hump once the raising factor q^{2n+1} w^2 drops below 1
        const bool past_hump = log2_abs(qp1) + log2_w2 < 0.0;
        if (past_hump && tl < max_log2 - (bits + 10)) break;

        qp1 = qp1 * (q * q);
        qp2 = qp2 * (q * q);
    }
    return {sum, max_log2};
}

struct RawEval {
    double value;
    double max_term_log2;
    double cancellation_bits;  // max_term_log2 - log2|sum|
};

RawEval eval_double(TrigKind kind, double z, double q) {
    const double w = z * (1.0 - q);
    if (w == 0.0) return {kind == TrigKind::Cos ? 1.0 : 0.0, 0.0, 0.0};
    auto r = sum_series<double>(kind, w, q, 53);
    const double cancel = r.max_term_log2 - log2_abs(r.sum);
    return {r.sum, r.max_term_log2, cancel};
}

RawEval eval_big(TrigKind kind, double z, double q, int bits) {
    const BigFloat qb(q, bits);
    const BigFloat w = BigFloat(z, bits) * (1.0 - qb);
    if (w.is_zero()) return {kind == TrigKind::Cos ? 1.0 : 0.0, 0.0, 0.0};
    auto r = sum_series<BigFloat>(kind, w, qb, bits);
    const double cancel = r.max_term_log2 - log2_abs(r.sum);
    return {r.sum.to_double(), r.max_term_log2, cancel};
}

TrigEval evaluate(const QTrigContext& ctx, TrigKind kind, double z) {
    if (!std::isfinite(z))
        throw std::domain_error("q-trig: argument must be finite");

    const double wabs = std::fabs(z) * (1.0 - ctx.q());
    int bits = ctx.precision_bits();
    if (ctx.escalation_enabled() && wabs > ctx.escalation_threshold())
        bits = ctx.extended_bits();

    TrigEval out;
    for (;;) {
        RawEval r = (bits <= 53) ? eval_double(kind, z, ctx.q())
                                 : eval_big(kind, z, ctx.q(), bits);
        out.value = r.value;
        out.max_term_log2 = r.max_term_log2;
        out.bits_used = bits;
        out.precision_loss = r.cancellation_bits > bits - kCancellationMargin ||
                             !std::isfinite(r.value);
        if (out.precision_loss && ctx.escalation_enabled() &&
            bits < ctx.extended_bits()) {
            bits = ctx.extended_bits();
            continue;
        }
        return out;
    }
}

}  // namespace

QTrigContext::QTrigContext(double q, int precision_bits, int extended_bits)
    : q_(q), precision_bits_(precision_bits), extended_bits_(extended_bits) {
    if (!(q > 0.0) || !(q < 1.0))
        throw std::domain_error("QTrigContext: q must lie in (0,1)");
    if (precision_bits < 53)
        throw std::domain_error("QTrigContext: precision_bits must be >= 53");
    if (extended_bits < precision_bits)
        throw std::domain_error(
            "QTrigContext: extended_bits must be >= precision_bits");
    // |z|(1-q) at which the largest series term eats the safety margin:
    // (log2 w)^2 / log2(1/q) = precision_bits - margin.
    const double budget =
        static_cast<double>(precision_bits - kCancellationMargin);
    escalation_threshold_ = std::exp2(std::sqrt(budget * std::log2(1.0 / q)));
    poch_cache_.push_back(1.0);  // (q;q)_0
}

QTrigContext QTrigContext::binary64_only(double q) {
    return QTrigContext(q, 53, 53);
}

double QTrigContext::pochhammer(int n) const {
    if (n < 0) throw std::domain_error("pochhammer: n must be >= 0");
    std::lock_guard<std::mutex> lock(poch_mutex_);
    while (poch_cache_.size() <= static_cast<std::size_t>(n)) {
        const auto k = poch_cache_.size();
        poch_cache_.push_back(poch_cache_.back() *
                              (1.0 - std::pow(q_, static_cast<double>(k))));
    }
    return poch_cache_[static_cast<std::size_t>(n)];
}

double q_pochhammer(const QTrigContext& ctx, int n) { return ctx.pochhammer(n); }

TrigEval q_cos_eval(const QTrigContext& ctx, double z) {
    return evaluate(ctx, TrigKind::Cos, z);
}

TrigEval q_sin_eval(const QTrigContext& ctx, double z) {
    return evaluate(ctx, TrigKind::Sin, z);
}

double q_cos(const QTrigContext& ctx, double z) { return q_cos_eval(ctx, z).value; }
double q_sin(const QTrigContext& ctx, double z) { return q_sin_eval(ctx, z).value; }

double growth_envelope(const QTrigContext& ctx, double r) {
    if (!(r > 0.0)) throw std::domain_error("growth_envelope: r must be positive");
    const double lw = std::log(r * (1.0 - ctx.q()));
    return std::exp(-lw * lw / std::log(ctx.q()));
}

namespace {

double asymptotic_seed(TrigKind kind, double q, int m) {
    const double e = (kind == TrigKind::Cos) ? -(m - 0.5) : -double(m);
    return std::pow(q, e) / (1.0 - q);
}

struct Bracket {
    double lo, hi;
    double flo, fhi;
};

double refine_bisect(const QTrigContext& ctx, TrigKind kind, Bracket b,
                     double rel_tol, double* residual) {
    auto f = [&](double x) {
        return kind == TrigKind::Cos ? q_cos_eval(ctx, x).value
                                     : q_sin_eval(ctx, x).value;
    };
    double lo = b.lo, hi = b.hi, flo = b.flo;
    for (int it = 0; it < 200 && (hi - lo) > rel_tol * lo; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if (sign_of(fm) == sign_of(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    const double z = 0.5 * (lo + hi);
    if (residual) {
        // backward error from a local slope estimate
        const double h = std::max(rel_tol, 1e-13) * z;
        const double slope = (f(z + h) - f(z - h)) / (2.0 * h);
        const double fz = f(z);
        *residual = (std::isfinite(slope) && slope != 0.0 && std::isfinite(fz))
                        ? std::fabs(fz / slope)
                        : std::numeric_limits<double>::quiet_NaN();
    }
    return z;
}

}  // namespace

ZeroTable trig_zeros(const QTrigContext& ctx, TrigKind kind, int count,
                     double refinement_tol) {
    if (count < 1) throw std::domain_error("trig_zeros: count must be >= 1");
    if (!(refinement_tol > 0.0))
        throw std::domain_error("trig_zeros: refinement_tol must be positive");

    const double q = ctx.q();
    auto f = [&](double x) {
        return kind == TrigKind::Cos ? q_cos_eval(ctx, x).value
                                     : q_sin_eval(ctx, x).value;
    };

    ZeroTable table;
    table.kind = kind;
    table.q = q;
    table.refinement_tol = refinement_tol;

    const double step = std::pow(q, -1.0 / 64.0);  // 64 points per octave

    // Seed windows are trusted only once the O(q^m) seed error is far below
    // the octave width ~(1-q); below that index the zeros come from a dense
    // ordered scan. The scan may start at 1: both leading series terms
    // dominate there (cos > 0 for z^2 < 1 + q, sin > 0 well beyond z = 1).
    int dense_top = 4;
    while (dense_top < count && std::pow(q, dense_top) > 0.05 * (1.0 - q))
        ++dense_top;
    dense_top = std::min(dense_top, count);
    const double scan_lo =
        std::min(1.0, asymptotic_seed(kind, q, 1) * std::pow(q, 6.0));
    const double scan_hi =
        asymptotic_seed(kind, q, dense_top) * std::pow(q, -0.5);

    double x = scan_lo, fx = f(x);
    while (x < scan_hi && static_cast<int>(table.zeros.size()) < dense_top) {
        const double y = x * step;
        const double fy = f(y);
        if (fx == 0.0) {
            table.zeros.push_back(x);
            table.residuals.push_back(0.0);
        } else if (sign_of(fx) != sign_of(fy) && fy != 0.0) {
            double residual = 0.0;
            const double z = refine_bisect(ctx, kind, {x, y, fx, fy},
                                           refinement_tol, &residual);
            table.zeros.push_back(z);
            table.residuals.push_back(residual);
        }
        x = y;
        fx = fy;
    }
    if (static_cast<int>(table.zeros.size()) < dense_top)
        throw NumericError(
            NumericError::Kind::BracketFailure,
            "trig_zeros: dense scan found only " +
                std::to_string(table.zeros.size()) + " of the first " +
                std::to_string(dense_top) + " zeros");

    // One zero per octave window around each asymptotic seed past the dense
    // range.
    for (int m = dense_top + 1; m <= count; ++m) {
        const double seed = asymptotic_seed(kind, q, m);
        double lo = seed * std::pow(q, 0.5);
        double flo = f(lo);
        bool found = false;
        for (int k = 1; k <= 64; ++k) {
            const double hi = lo * step;
            const double fhi = f(hi);
            if (flo == 0.0) {
                table.zeros.push_back(lo);
                table.residuals.push_back(0.0);
                found = true;
                break;
            }
            if (sign_of(flo) != sign_of(fhi)) {
                double residual = 0.0;
                const double z = refine_bisect(ctx, kind, {lo, hi, flo, fhi},
                                               refinement_tol, &residual);
                table.zeros.push_back(z);
                table.residuals.push_back(residual);
                found = true;
                break;
            }
            lo = hi;
            flo = fhi;
        }
        if (!found)
            throw NumericError(NumericError::Kind::BracketFailure,
                               "trig_zeros: no sign change near seed for m = " +
                                   std::to_string(m));
    }

    table.zeros.resize(static_cast<std::size_t>(count));
    table.residuals.resize(static_cast<std::size_t>(count));
    for (std::size_t i = 1; i < table.zeros.size(); ++i)
        if (!(table.zeros[i] > table.zeros[i - 1]))
            throw NumericError(NumericError::Kind::BracketFailure,
                               "trig_zeros: zeros not strictly increasing");
    return table;
}

}  // namespace qdirac
