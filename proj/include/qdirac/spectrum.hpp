#pragma once

// Characteristic function Delta(lambda), eigenvalue localization and
// refinement, eigenfunction extraction, and the executable spectral checks
// (orthogonality, simplicity, asymptotic laws).

#include <optional>
#include <utility>
#include <vector>

#include "qdirac/solver.hpp"

namespace qdirac {

// The four boundary patterns with known eigenvalue asymptotics.
enum class BoundaryCase { Case1i, Case1ii, Case2i, Case2ii };

const char* boundary_case_name(BoundaryCase c);

// Pattern of vanishing coefficients; nullopt for a generic boundary.
std::optional<BoundaryCase> classify_boundary(const BoundarySpec& b);

// Leading term of the m-th positive eigenvalue for the given case:
//   1i, 1ii: q^{-m+1/2} / (a(1-q))
//   2i:      q^{-m+1}   / (a(1-q))
//   2ii:     q^{-m}     / (a(1-q))
double asymptotic_eigenvalue(BoundaryCase c, const QLattice& lattice, int m);

struct DeltaEval {
    double value = 0.0;
    int sign = 0;
    double amp_log2 = 0.0;  // parasitic amplification of the march (log2)
    int bits_used = 53;
    bool precision_loss = false;
    bool overflow = false;
};

// k21 phi1(a,lambda) + k22 phi2(a/q,lambda) via the recursion, re-run in
// extended precision when cancellation eats the mantissa margin.
DeltaEval char_delta_eval(const Problem& problem, const QTrigContext& ctx,
                          double lambda);
double char_delta(const Problem& problem, const QTrigContext& ctx, double lambda);

struct EigenResult {
    int index = 0;  // m >= 1 positive branch, 0 for lambda = 0, m <= -1 negative
    double lambda = 0.0;
    Spinor phi;
    double phi2_ext = 0.0;
    double q_norm_sq = 0.0;
    double delta_prime = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};
    double residual = 0.0;          // |Delta(lambda)|
    double asymptotic_ratio = 0.0;  // NaN when no asymptotic law applies
    SolveFlags flags;
    // Boundary pair of the eigenfunction, evaluated at the extended-precision
    // root (both values shrink superexponentially in m and cannot be read off
    // a double-precision lambda).
    double boundary_phi1 = 0.0;
    double boundary_phi2_ext = 0.0;
};

struct VerificationFlags {
    bool reality_ok = false;
    bool orthogonality_ok = false;
    bool simplicity_ok = false;
    bool asymptotics_ok = false;
    double orthogonality_max = 0.0;
    double simplicity_max_defect = 0.0;
    double asymptotic_max_dev = 0.0;  // max |ratio - 1| / q^m over m >= 5
    bool missed_eigenvalue_warning = false;
    bool precision_loss = false;
};

struct SpectrumReport {
    std::vector<EigenResult> eigenvalues;  // ascending lambda
    std::vector<std::vector<double>> orthogonality_matrix;  // normalized
    VerificationFlags flags;
};

struct SpectrumOptions {
    int scan_points_per_octave = 96;
    double refine_tol = 1e-12;  // relative tolerance on lambda
    int lead_octaves = 8;       // scan starts lead_octaves below the first seed
    double orthogonality_tol = 1e-6;
    double simplicity_tol = 1e-6;
    double asymptotic_tol = 5.0;  // |ratio-1| <= tol * q^m for m >= 5
};

SpectrumReport find_eigenvalues(const Problem& problem, const QTrigContext& ctx,
                                int count, bool both_signs = true,
                                const SpectrumOptions& options = {});

// Jackson integral of s1.y1 s2.y1 + s1.y2 s2.y2 over [0, a].
double q_inner_product(const Spinor& s1, const Spinor& s2);

// Relative defect |Delta'(lambda_m) - c ||phi||^2| / |Delta'(lambda_m)| with
// the proportionality c read off the boundary values; near 0 it certifies
// the norm identity and the simplicity of the eigenvalue at once.
double simplicity_check(const Problem& problem, const EigenResult& eig);

// Max over nodes and both components of |phi_i - leading term| divided by
// the asymptotic envelope |lambda|^{-1} exp(-(log(|lambda| x (1-q)))^2/log q)
// (q^{1/2}-shifted argument for the second component).
double eigenfunction_asymptotics_check(const Problem& problem,
                                       const QTrigContext& ctx,
                                       const EigenResult& eig, int min_index = 5);

}  // namespace qdirac
