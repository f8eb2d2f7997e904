#pragma once

// Basic trigonometric functions cos(z;q), sin(z;q): series evaluation with
// cancellation tracking and extended-precision escalation, growth envelopes,
// and positive-zero tables.

#include <mutex>
#include <vector>

namespace qdirac {

enum class TrigKind { Cos, Sin };

// Evaluation context: q, working precision, escalation policy, and the
// (q;q)_n cache. The cache is grow-only and safe for concurrent extension;
// everything else is immutable after construction.
class QTrigContext {
public:
    explicit QTrigContext(double q, int precision_bits = 53,
                          int extended_bits = 256);

    // No extended-precision fallback; cancellation beyond the binary64
    // mantissa raises the precision-loss flag instead.
    static QTrigContext binary64_only(double q);

    double q() const { return q_; }
    int precision_bits() const { return precision_bits_; }
    int extended_bits() const { return extended_bits_; }
    bool escalation_enabled() const { return extended_bits_ > precision_bits_; }

    // |z|(1-q) above which evaluation goes straight to extended precision.
    double escalation_threshold() const { return escalation_threshold_; }
    void set_escalation_threshold(double t) { escalation_threshold_ = t; }

    // (q;q)_n = prod_{i=1..n} (1 - q^i), cached.
    double pochhammer(int n) const;

private:
    double q_;
    int precision_bits_;
    int extended_bits_;
    double escalation_threshold_;
    mutable std::vector<double> poch_cache_;
    mutable std::mutex poch_mutex_;
};

double q_pochhammer(const QTrigContext& ctx, int n);

struct TrigEval {
    double value = 0.0;
    double max_term_log2 = 0.0;  // log2 of the largest kept |term|
    int bits_used = 53;
    bool precision_loss = false;
};

TrigEval q_cos_eval(const QTrigContext& ctx, double z);
TrigEval q_sin_eval(const QTrigContext& ctx, double z);

double q_cos(const QTrigContext& ctx, double z);
double q_sin(const QTrigContext& ctx, double z);

// exp(-(log(r(1-q)))^2 / log q); meaningful as a maximum-modulus envelope
// for r(1-q) > 1.
double growth_envelope(const QTrigContext& ctx, double r);

// First `count` positive zeros in increasing order. residuals hold the
// backward error |f(z)| / |f'(z) estimate| of each refined zero.
struct ZeroTable {
    TrigKind kind = TrigKind::Cos;
    double q = 0.0;
    std::vector<double> zeros;
    std::vector<double> residuals;
    double refinement_tol = 0.0;
};

ZeroTable trig_zeros(const QTrigContext& ctx, TrigKind kind, int count,
                     double refinement_tol = 1e-13);

}  // namespace qdirac
