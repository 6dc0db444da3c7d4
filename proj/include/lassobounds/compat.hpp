#pragma once

#include "lassobounds/core.hpp"
#include "lassobounds/qp.hpp"
#include "lassobounds/rng.hpp"
#include "lassobounds/types.hpp"

namespace lassobounds {

enum class MatrixKind { empirical, theoretical };

/// A compatibility-constant query.
///
/// The minimum runs over { b : sum_S aw_j |b_j| - sum_C w_j |b_j| = 1 } where
/// C is the complement of S and the free set; free coordinates appear in the
/// quadratic form but in neither constraint term. Constant weights w = u*1
/// reproduce the scalar-u constant. Weights on S (active_weights) default to
/// one and exist for the weighted total-variation bound, whose weight vector
/// runs over all coordinates.
struct CompatSpec {
    ActiveSet S;
    Vector weights;         // over complement of (S u free), increasing index; empty = ones
    Vector active_weights;  // over S, increasing index; empty = ones
    ActiveSet free;
    MatrixKind kind = MatrixKind::empirical;

    /// Constant weights u on the complement (p is the full dimension).
    static CompatSpec uniform(ActiveSet S, double u, int p, ActiveSet free = {});
};

struct CompatResult {
    double value = 0.0;       // (|S| + |free|) * min ||X b||^2 / n
    Vector minimizer;         // attaining b*, length p
    std::vector<int> signs;   // z*_S in {-1,+1}, aligned with S.indices()
    double certificate_gap = 0.0;
    int subproblem_count = 0;
    double qp_kkt_residual = 0.0;
    double b_star_l1_on_S = 0.0;
};

/// One sign-fixed convex subproblem:
///   minimize ||X b||^2  s.t.  sum_S aw_j z_j b_j - sum_C w_j |b_j| >= 1,
///                             z_j b_j >= 0 for j in S.
struct QpSubproblem {
    Matrix design;
    ActiveSet S;
    std::vector<int> z;  // one sign per S index
    Vector weights;
    Vector active_weights;
    ActiveSet free;
};

/// Returns (||X b||^2 at the minimum, attaining b).
std::pair<double, Vector> solve_qp_subproblem(const QpSubproblem& sub,
                                              double tol = 1e-10);

/// Exact empirical compatibility constant via sign enumeration: 2^{|S|-1}
/// convex subproblems (the sign of the lowest index in S is pinned to +1 by
/// the b -> -b symmetry). |S| > 20 throws CapExceeded.
CompatResult kappa_hat_sq(const DesignMatrix& X, const CompatSpec& spec,
                          double tol = 1e-10);

/// Older-style constant: minimum of |S| ||X b||^2 / n over ||b_S||_1 = 1,
/// ||b_{-S}||_1 <= 1/u.
double phi_hat_sq(const DesignMatrix& X, const ActiveSet& S, double u,
                  double tol = 1e-10);

/// Same engine on the p x p factor design chol^T, normalized so
/// value = |S| * min ||sigma0^{1/2} b||_2^2.
CompatResult kappa_theoretical_sq(const CovarianceModel& model,
                                  const CompatSpec& spec, double tol = 1e-10);

/// Independent oracle: random search over the constraint surface followed by
/// coordinatewise golden-section refinement. Always an upper bound on the
/// exact constant; with samples >= 1e6 it agrees to 1e-3 relative for p <= 4.
double brute_force_compat(const DesignMatrix& X, const CompatSpec& spec,
                          long samples, Rng& rng);

/// l1 bound on the minimizer: returns (||b*_S||_1, bound) where the bound is
/// (kappa(S) - u kappa(u,S)) / ((1-u) kappa(u,S)) for 0 <= u < 1.
std::pair<double, double> ell1_bound_check(const DesignMatrix& X,
                                           const ActiveSet& S, double u,
                                           double tol = 1e-10);

/// Cone inclusion check for v > u > 0: returns (kappa^2(v,S), minimum over
/// the u-constraint set intersected with the l1 ball of radius
/// 1 + (1+u)/(v-u)); the first is never smaller than the second.
std::pair<double, double> cone_bound_check(const DesignMatrix& X,
                                           const ActiveSet& S, double u,
                                           double v, double tol = 1e-10);

/// minimize ||X b||^2 s.t. zS^T b_S - sum_C w_j |b_j| >= 1 with b_S free in
/// sign. This is the weight-box subproblem behind the noisy lower bound.
/// Returns (||X b||^2, b).
std::pair<double, Vector> constrained_min_fixed_signs(
    const DesignMatrix& X, const ActiveSet& S, const std::vector<int>& z_S,
    const Vector& complement_weights, double tol = 1e-10);

}  // namespace lassobounds
