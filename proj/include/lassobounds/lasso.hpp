#pragma once

#include "lassobounds/core.hpp"
#include "lassobounds/types.hpp"

namespace lassobounds {

/// Objective ||y - X b||_2^2 + 2 lambda * sum over penalized j of |b_j|.
/// No 1/n factor anywhere; downstream formulas rely on this exact scaling.
struct LassoProblem {
    DesignMatrix X;
    Vector y;
    double lambda = 0.0;
    // true = coordinate is penalized; an all-true mask is the plain problem
    std::vector<bool> penalty_mask;

    LassoProblem(DesignMatrix design, Vector response, double lam);
    LassoProblem(DesignMatrix design, Vector response, double lam,
                 std::vector<bool> mask);
};

struct LassoSolution {
    Vector beta;
    Vector zeta;           // subgradient certificate, zero on unpenalized coords
    ActiveSet support;     // |beta_j| >= support_tol * ||beta||_inf
    double kkt_residual;   // max-norm stationarity violation
    double objective;
    int iterations;
};

inline constexpr double kSupportTolRel = 1e-8;

/// Cyclic coordinate descent with exact coordinate minimization.
/// Convergence is declared on the KKT residual: penalized coordinates must
/// satisfy |X_j^T(Xb - y) + lambda zeta_j| <= tol * max(1, lambda) and
/// unpenalized ones |X_j^T(Xb - y)| <= tol. Throws NoConvergence (carrying
/// the best iterate) after max_iter full sweeps.
LassoSolution solve_lasso(const LassoProblem& prob, double tol = 1e-10,
                          int max_iter = 200000,
                          const Vector* warm_start = nullptr);

/// Same objective with y := X beta0.
LassoSolution solve_noiseless(const DesignMatrix& X, const Vector& beta0,
                              double lambda_star, double tol = 1e-10,
                              int max_iter = 200000);

/// Minimizes n ||S^{1/2} (b - beta0)||_2^2 + 2 lambda ||b||_1 by reduction to
/// the fixed-design problem with the p x p design sqrt(n) * chol^T.
LassoSolution solve_population_noiseless(const CovarianceModel& model, int n,
                                         const Vector& beta0, double lambda,
                                         double tol = 1e-10,
                                         int max_iter = 200000);

/// Best feasible subgradient for the given beta and the resulting
/// stationarity violation; residual 0 iff beta is exactly optimal.
std::pair<double, Vector> kkt_residual(const DesignMatrix& X, const Vector& y,
                                       double lambda, const Vector& beta,
                                       const std::vector<bool>& penalty_mask);

}  // namespace lassobounds
