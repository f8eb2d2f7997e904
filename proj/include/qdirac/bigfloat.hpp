#pragma once

// Thin RAII wrapper over MPFR used by the extended-precision evaluation
// paths. Only the operations the series summation and the lattice recursion
// need are exposed; results carry the larger precision of their operands.

#include <mpfr.h>

#include <cmath>
#include <utility>

namespace qdirac {

class BigFloat {
public:
    explicit BigFloat(int bits) {
        mpfr_init2(v_, bits);
        mpfr_set_zero(v_, 1);
    }

    BigFloat(double x, int bits) {
        mpfr_init2(v_, bits);
        mpfr_set_d(v_, x, MPFR_RNDN);
    }

    BigFloat(const BigFloat& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }

    BigFloat(BigFloat&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }

    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }

    BigFloat& operator=(BigFloat&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }

    ~BigFloat() { mpfr_clear(v_); }

    int precision() const { return static_cast<int>(mpfr_get_prec(v_)); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    // log2-magnitude; well below any meaningful exponent for zero.
    double log2_abs() const {
        if (mpfr_zero_p(v_)) return -1.0e18;
        return static_cast<double>(mpfr_get_exp(v_));
    }

    friend BigFloat operator+(const BigFloat& a, const BigFloat& b) {
        BigFloat r(prec2(a, b));
        mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator-(const BigFloat& a, const BigFloat& b) {
        BigFloat r(prec2(a, b));
        mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b) {
        BigFloat r(prec2(a, b));
        mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator/(const BigFloat& a, const BigFloat& b) {
        BigFloat r(prec2(a, b));
        mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }

    friend BigFloat operator*(const BigFloat& a, double b) {
        BigFloat r(a.precision());
        mpfr_mul_d(r.v_, a.v_, b, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator*(double a, const BigFloat& b) { return b * a; }
    friend BigFloat operator+(const BigFloat& a, double b) {
        BigFloat r(a.precision());
        mpfr_add_d(r.v_, a.v_, b, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator-(const BigFloat& a, double b) {
        BigFloat r(a.precision());
        mpfr_sub_d(r.v_, a.v_, b, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator-(double a, const BigFloat& b) {
        BigFloat r(b.precision());
        mpfr_d_sub(r.v_, a, b.v_, MPFR_RNDN);
        return r;
    }

    BigFloat& operator+=(const BigFloat& o) {
        mpfr_add(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    BigFloat& operator-=(const BigFloat& o) {
        mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    BigFloat& operator*=(const BigFloat& o) {
        mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }

    BigFloat operator-() const {
        BigFloat r(*this);
        mpfr_neg(r.v_, r.v_, MPFR_RNDN);
        return r;
    }

    friend BigFloat abs(const BigFloat& a) {
        BigFloat r(a);
        mpfr_abs(r.v_, r.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat sqrt(const BigFloat& a) {
        BigFloat r(a.precision());
        mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
        return r;
    }

    friend bool operator<(const BigFloat& a, const BigFloat& b) {
        return mpfr_cmp(a.v_, b.v_) < 0;
    }
    friend bool operator>(const BigFloat& a, const BigFloat& b) {
        return mpfr_cmp(a.v_, b.v_) > 0;
    }
    friend bool operator<(const BigFloat& a, double b) {
        return mpfr_cmp_d(a.v_, b) < 0;
    }
    friend bool operator>(const BigFloat& a, double b) {
        return mpfr_cmp_d(a.v_, b) > 0;
    }

private:
    static int prec2(const BigFloat& a, const BigFloat& b) {
        return std::max(a.precision(), b.precision());
    }

    mpfr_t v_;
};

// Shared helpers so numeric kernels can be written once for double/BigFloat.
inline double log2_abs(double x) {
    if (x == 0.0) return -1.0e18;
    return std::log2(std::fabs(x));
}
inline double log2_abs(const BigFloat& x) { return x.log2_abs(); }

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const BigFloat& x) { return x.is_finite(); }

inline double to_double(double x) { return x; }
inline double to_double(const BigFloat& x) { return x.to_double(); }

inline int sign_of(double x) { return (x > 0) - (x < 0); }
inline int sign_of(const BigFloat& x) { return x.sign(); }

}  // namespace qdirac
