#pragma once

// Independent high-precision reference for the basic trigonometric series
// cos(z;q) and sin(z;q). Every term is rebuilt from scratch with MPFR
// (q^{n^2}, (q;q)_n as explicit products), deliberately sharing no code with
// the library evaluators it is used to check.

#include <mpfr.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdirac_test {

// out = cos(z;q) for kind==0, sin(z;q) for kind==1, summed term by term at
// the precision of `out`.
inline void qtrig_series_ref(mpfr_t out, int kind, double z, double q) {
    const mpfr_prec_t prec = mpfr_get_prec(out);
    mpfr_t mq, w, term, power, poch, factor, sum, max_term, tmp;
    mpfr_inits2(prec, mq, w, term, power, poch, factor, sum, max_term, tmp,
                (mpfr_ptr)nullptr);

    mpfr_set_d(mq, q, MPFR_RNDN);
    // w = z(1-q)
    mpfr_set_d(w, z, MPFR_RNDN);
    mpfr_ui_sub(tmp, 1, mq, MPFR_RNDN);
    mpfr_mul(w, w, tmp, MPFR_RNDN);

    mpfr_set_zero(sum, 1);
    mpfr_set_zero(max_term, 1);
    mpfr_set_ui(poch, 1, MPFR_RNDN);  // (q;q)_k, extended incrementally

    long k_done = 0;  // poch currently holds (q;q)_{k_done}
    const long n_hump =
        (z == 0.0) ? 0
                   : (long)std::ceil(std::fabs(std::log(std::fabs(z) * (1.0 - q))) /
                                     std::log(1.0 / q)) + 2;

    for (long n = 0; n < 20000; ++n) {
        const long wexp = (kind == 0) ? 2 * n : 2 * n + 1;
        const long qexp = (kind == 0) ? n * n : n * (n + 1);
        const long pidx = (kind == 0) ? 2 * n : 2 * n + 1;

        // extend pochhammer product up to (q;q)_{pidx}
        while (k_done < pidx) {
            ++k_done;
            mpfr_pow_ui(tmp, mq, (unsigned long)k_done, MPFR_RNDN);
            mpfr_ui_sub(tmp, 1, tmp, MPFR_RNDN);
            mpfr_mul(poch, poch, tmp, MPFR_RNDN);
        }

        mpfr_pow_ui(power, w, (unsigned long)wexp, MPFR_RNDN);
        mpfr_pow_ui(factor, mq, (unsigned long)qexp, MPFR_RNDN);
        mpfr_mul(term, power, factor, MPFR_RNDN);
        mpfr_div(term, term, poch, MPFR_RNDN);
        if (n % 2 == 1) mpfr_neg(term, term, MPFR_RNDN);

        mpfr_add(sum, sum, term, MPFR_RNDN);

        mpfr_abs(tmp, term, MPFR_RNDN);
        if (mpfr_cmp(tmp, max_term) > 0) mpfr_set(max_term, tmp, MPFR_RNDN);

        if (n > n_hump && !mpfr_zero_p(max_term)) {
            // |term| <= max_term * 2^-(prec+64) terminates the tail
            mpfr_mul_2si(tmp, tmp, (long)prec + 64, MPFR_RNDN);
            if (mpfr_cmp(tmp, max_term) < 0) break;
        }
        if (z == 0.0) break;
    }

    mpfr_set(out, sum, MPFR_RNDN);
    mpfr_clears(mq, w, term, power, poch, factor, sum, max_term, tmp,
                (mpfr_ptr)nullptr);
}

inline double qtrig_ref(int kind, double z, double q, mpfr_prec_t prec = 384) {
    mpfr_t v;
    mpfr_init2(v, prec);
    qtrig_series_ref(v, kind, z, q);
    double r = mpfr_get_d(v, MPFR_RNDN);
    mpfr_clear(v);
    return r;
}

inline double qcos_ref(double z, double q, mpfr_prec_t prec = 384) {
    return qtrig_ref(0, z, q, prec);
}

inline double qsin_ref(double z, double q, mpfr_prec_t prec = 384) {
    return qtrig_ref(1, z, q, prec);
}

inline std::string qtrig_ref_str(int kind, double z, double q, int digits,
                                 mpfr_prec_t prec = 512) {
    mpfr_t v;
    mpfr_init2(v, prec);
    qtrig_series_ref(v, kind, z, q);
    char buf[256];
    mpfr_snprintf(buf, sizeof buf, "%.*Rg", digits, v);
    mpfr_clear(v);
    return std::string(buf);
}

// First `count` positive zeros of cos(z;q)/sin(z;q) by dense geometric scan
// plus bisection, all on the reference series.
inline std::vector<double> qtrig_zeros_ref(int kind, int count, double q,
                                           mpfr_prec_t prec = 640) {
    std::vector<double> zeros;
    mpfr_t fa, fb, fm;
    mpfr_inits2(prec, fa, fb, fm, (mpfr_ptr)nullptr);

    const double top_seed =
        (kind == 0) ? std::pow(q, -(count + 1) + 0.5) / (1.0 - q)
                    : std::pow(q, -(count + 1)) / (1.0 - q);
    const double step = std::pow(2.0, 1.0 / 64.0);

    double a = 0.05 / (1.0 - q);
    qtrig_series_ref(fa, kind, a, q);
    while (a < top_seed && (int)zeros.size() < count) {
        double b = a * step;
        qtrig_series_ref(fb, kind, b, q);
        if (mpfr_sgn(fa) * mpfr_sgn(fb) < 0) {
            double lo = a, hi = b;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                qtrig_series_ref(fm, kind, mid, q);
                if (mpfr_sgn(fm) == 0) { lo = hi = mid; break; }
                if (mpfr_sgn(fm) * mpfr_sgn(fa) < 0) hi = mid; else lo = mid;
            }
            zeros.push_back(0.5 * (lo + hi));
        }
        a = b;
        mpfr_set(fa, fb, MPFR_RNDN);
    }
    mpfr_clears(fa, fb, fm, (mpfr_ptr)nullptr);
    if ((int)zeros.size() < count)
        throw std::runtime_error("qtrig_zeros_ref: scan exhausted before count");
    return zeros;
}

}  // namespace qdirac_test
