#pragma once

#include "lassobounds/core.hpp"
#include "lassobounds/lasso.hpp"
#include "lassobounds/types.hpp"

namespace lassobounds {

/// Piecewise-constant layout on {1..n}: d holds the s+1 distances between
/// the start, the s jumps, and the end; interior distances must be even.
struct TvInstance {
    int n = 0;
    std::vector<int> d;  // size s+1, sum = n, d_j >= 1

    TvInstance(int n_, std::vector<int> distances);

    int s() const { return static_cast<int>(d.size()) - 1; }
    /// 0-based jump locations {d1, d1+d2, ...} (first index of each new block).
    std::vector<int> jump_locations() const;
    ActiveSet jump_set() const { return ActiveSet(jump_locations()); }
};

struct TvSignal {
    Vector f;
    double tv = 0.0;
};

double total_variation(const Vector& f);

/// Lower-triangular all-ones design; (X b)_i accumulates the increments
/// b_k = f_k - f_{k-1} with f_0 = 0.
DesignMatrix tv_design(int n);

/// (s+1) / (n/d_1 + sum_{j=2..s} 4n/d_j + n/d_{s+1})
double tv_kappa_closed_form(const TvInstance& inst);

/// The explicit minimizer: supported on the jump set plus the unpenalized
/// first coordinate, normalized so the constraint value is one. Feeding it
/// to the quadratic form reproduces the closed-form constant.
Vector tv_bstar(const TvInstance& inst);

/// minimize ||y - f||^2 + 2 lambda TV(f), via the increment reparametrization
/// with the first coefficient unpenalized. The underlying coefficient
/// solution (with its subgradient certificate) is available on request.
TvSignal tv_denoise(const Vector& y, double lambda, double tol = 1e-10,
                    int max_iter = 200000, LassoSolution* solution = nullptr);

struct TvNoiselessError {
    double predicted = 0.0;
    double actual = 0.0;
    double rel_err = 0.0;
};

/// Exact shrinkage identity for a piecewise-constant f0 whose jumps alternate
/// in direction and clear the displayed thresholds; throws BetaminViolated
/// (naming the jump) otherwise.
TvNoiselessError tv_noiseless_error(const Vector& f0, double lambda_star,
                                    double tol = 1e-10);

struct WeightedKappaBound {
    double lhs = 0.0;         // sqrt(s+1) / kappa(w, S)
    double rhs = 0.0;         // ||w||_inf sqrt(s+1)/kappa(S) + sqrt(n sum (w_i - w_{i-1})^2)
    double kappa_w_sq = 0.0;  // engine value for the weighted constant
};

/// Weighted compatibility sandwich for an n-vector of nonnegative weights;
/// weights index signal positions, entry 1 is unused (free coordinate).
WeightedKappaBound weighted_kappa_bound(const TvInstance& inst, const Vector& w,
                                        double tol = 1e-10);

struct VdiagLogCheck {
    double ratio_sum = 0.0;  // sum (v_i - v_{i-1})^2 / ||v||_inf^2, v = 0 on S0
    double bound = 0.0;      // (s0 + 1) log n
    Vector v;                // extended anti-projection diagonal, length n
};

/// Smoothness of the anti-projection diagonal along the grid, checked against
/// (s0+1) log n. The diagonal is set to zero on the jump set plus {1}.
VdiagLogCheck tv_vdiag_log_check(const TvInstance& inst);

}  // namespace lassobounds
