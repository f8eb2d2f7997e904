#pragma once

// Solutions of the q-Dirac system on the lattice: exact outward recursion,
// successive approximation of the equivalent integral equations, free
// solutions, and the q-Wronskian.

#include <utility>

#include "qdirac/qcore.hpp"
#include "qdirac/qtrig.hpp"

namespace qdirac {

// Coefficients of the two boundary forms
//   B1(y) = k11 y1(0) + k12 y2(0),  B2(y) = k21 y1(a) + k22 y2(a/q).
struct BoundarySpec {
    double k11 = 0.0;
    double k12 = 0.0;
    double k21 = 0.0;
    double k22 = 0.0;
};

void validate_boundary(const BoundarySpec& b);

struct Problem {
    Problem(QLatticePtr lattice, LatticeFn p, LatticeFn r, BoundarySpec boundary);

    QLatticePtr lattice;
    LatticeFn p;
    LatticeFn r;
    BoundarySpec boundary;
};

// Convenience: problem with p = r = 0 on the given lattice.
Problem zero_potential_problem(QLatticePtr lattice, BoundarySpec boundary);

enum class SolveMethod { Recursion, IntegralEquation };

struct SolveFlags {
    bool overflow = false;
    bool precision_loss = false;
};

struct SolutionAtLambda {
    double lambda = 0.0;
    Spinor phi;
    double phi2_ext = 0.0;  // phi_2 at a/q (also stored as phi.y2 ext value)
    SolveMethod method = SolveMethod::Recursion;
    double residual = 0.0;  // max system defect, filled on construction
    SolveFlags flags;
    int iterations = 0;       // integral-equation path only
    double last_change = 0.0;  // sup-norm change of the final sweep
};

// The two solutions of the free (p = r = 0) system with Wronskian 1:
//   ( cos(lambda x;q), -sqrt(q) sin(lambda sqrt(q) x;q) )
//   ( sin(lambda x;q),  cos(lambda sqrt(q) x;q) )
// sampled at every node and at the extension node.
std::pair<Spinor, Spinor> free_solutions(const QLatticePtr& lattice,
                                         const QTrigContext& ctx, double lambda);

// Marches the initial data (k12, -k11), imposed at the deepest node, outward
// through the two exact node relations of the system, then extends phi_2 to
// a/q through the relation at t_0.
SolutionAtLambda propagate(const Problem& problem, double lambda);

// Fixed point of the integral-equation map, iterated from the free term.
// All q-integrals are lattice Jackson sums; the trig factors at off-lattice
// arguments are evaluated by series. Throws NumericError on non-convergence.
SolutionAtLambda successive_approx(const Problem& problem, const QTrigContext& ctx,
                                   double lambda, double tol = 1e-12,
                                   int max_iter = 200);

// s1.y1(t_n) s2.y2(t_{n-1}) - s2.y1(t_n) s1.y2(t_{n-1}); node_index 0 uses
// the extension values.
double wronskian(const Spinor& s1, const Spinor& s2, int node_index);

// Max absolute defect of both equations of the system over the nodes where
// the required shifted values exist.
double system_defect(const Problem& problem, const SolutionAtLambda& sol);

namespace detail {

// Recursion in extended precision; returns k21*phi1(a) + k22*phi2(a/q)
// without rounding intermediates to double.
struct BigDelta {
    double value = 0.0;
    int sign = 0;
    double amp_log2 = 0.0;
    double delta_log2 = 0.0;
};
BigDelta propagate_delta_big(const Problem& problem, double lambda, int bits);

// Double recursion with parasitic-amplification tracking (shared with
// spectrum). amp_log2 bounds the growth factor the march applies to
// rounding noise; the solution samples themselves stay much smaller.
struct RawRecursion {
    std::vector<double> y1, y2;
    double y2_ext = 0.0;
    double amp_log2 = 0.0;
    bool finite = true;
};
RawRecursion propagate_raw(const Problem& problem, double lambda);

// Bisection continued in extended-precision lambda. Near an eigenvalue the
// boundary pair (phi1(a), phi2(a/q)) is the difference of almost-coincident
// trig zeros and shrinks superexponentially in m, so a double-precision
// lambda cannot resolve it; the polished root can. Returns the eigenfunction
// marched at the polished root, rounded to double per node.
struct PolishedRoot {
    double lambda = 0.0;
    double phi1_a = 0.0;
    double phi2_ext = 0.0;
    std::vector<double> y1, y2;
    double residual = 0.0;  // |Delta| at the polished root
};
PolishedRoot polish_root_big(const Problem& problem, double lo, double hi,
                             int bits);

SolutionAtLambda assemble_solution(const Problem& problem, double lambda,
                                   std::vector<double> y1, std::vector<double> y2,
                                   double y2_ext, SolveMethod method,
                                   SolveFlags flags);

}  // namespace detail

}  // namespace qdirac
