#include "lassobounds/lasso.hpp"

#include <cmath>

namespace lassobounds {

namespace {

double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

ActiveSet extract_support(const Vector& beta) {
    const double bmax = beta.cwiseAbs().maxCoeff();
    const double cut = kSupportTolRel * bmax;
    std::vector<int> idx;
    for (int j = 0; j < beta.size(); ++j)
        if (bmax > 0.0 && std::abs(beta(j)) >= cut) idx.push_back(j);
    return ActiveSet(std::move(idx));
}

}  // namespace

LassoProblem::LassoProblem(DesignMatrix design, Vector response, double lam)
    : LassoProblem(std::move(design), std::move(response), lam,
                   std::vector<bool>()) {}

LassoProblem::LassoProblem(DesignMatrix design, Vector response, double lam,
                           std::vector<bool> mask)
    : X(std::move(design)), y(std::move(response)), lambda(lam),
      penalty_mask(std::move(mask)) {
    if (lambda < 0.0) throw Error("LassoProblem: lambda must be >= 0");
    if (y.size() != X.n()) throw Error("LassoProblem: dimension mismatch");
    if (penalty_mask.empty())
        penalty_mask.assign(static_cast<size_t>(X.p()), true);
    if (static_cast<int>(penalty_mask.size()) != X.p())
        throw Error("LassoProblem: penalty mask size mismatch");
}

std::pair<double, Vector> kkt_residual(const DesignMatrix& X, const Vector& y,
                                       double lambda, const Vector& beta,
                                       const std::vector<bool>& penalty_mask) {
    const int p = X.p();
    const Vector grad = X.X.transpose() * (X.X * beta - y);
    const double bmax = beta.cwiseAbs().maxCoeff();
    const double cut = kSupportTolRel * bmax;
    Vector zeta = Vector::Zero(p);
    double resid = 0.0;
    for (int j = 0; j < p; ++j) {
        const bool penalized = penalty_mask.empty() || penalty_mask[static_cast<size_t>(j)];
        if (!penalized) {
            resid = std::max(resid, std::abs(grad(j)));
            continue;
        }
        const bool active = bmax > 0.0 && std::abs(beta(j)) >= cut && beta(j) != 0.0;
        if (active) {
            zeta(j) = beta(j) > 0.0 ? 1.0 : -1.0;
            resid = std::max(resid, std::abs(grad(j) + lambda * zeta(j)));
        } else if (lambda > 0.0) {
            zeta(j) = std::clamp(-grad(j) / lambda, -1.0, 1.0);
            resid = std::max(resid, std::abs(grad(j) + lambda * zeta(j)));
        } else {
            resid = std::max(resid, std::abs(grad(j)));
        }
    }
    return {resid, zeta};
}

LassoSolution solve_lasso(const LassoProblem& prob, double tol, int max_iter,
                          const Vector* warm_start) {
    if (tol <= 0.0) throw Error("solve_lasso: tol must be > 0");
    const DesignMatrix& X = prob.X;
    const int p = X.p();
    const double lambda = prob.lambda;

    Vector beta = warm_start ? *warm_start : Vector::Zero(p);
    if (beta.size() != p) throw Error("solve_lasso: warm start size mismatch");

    Vector col_sq(p);
    for (int j = 0; j < p; ++j) col_sq(j) = X.X.col(j).squaredNorm();

    Vector r = prob.y - X.X * beta;  // running residual y - X beta

    const double pen_scale = tol * std::max(1.0, lambda);
    int sweep = 0;
    for (; sweep < max_iter; ++sweep) {
        for (int j = 0; j < p; ++j) {
            if (col_sq(j) == 0.0) continue;
            const double old = beta(j);
            const double c = X.X.col(j).dot(r) + col_sq(j) * old;
            double next;
            if (prob.penalty_mask[static_cast<size_t>(j)]) {
                next = soft_threshold(c, lambda) / col_sq(j);
            } else {
                next = c / col_sq(j);
            }
            if (next != old) {
                r.noalias() -= X.X.col(j) * (next - old);
                beta(j) = next;
            }
        }
        // refresh the residual occasionally to stop drift on long runs
        if ((sweep & 0xFF) == 0xFF) r = prob.y - X.X * beta;

        const Vector grad = -(X.X.transpose() * r);  // X^T (X beta - y)
        const double bmax = beta.cwiseAbs().maxCoeff();
        const double cut = kSupportTolRel * bmax;
        double pen_resid = 0.0, free_resid = 0.0;
        for (int j = 0; j < p; ++j) {
            if (!prob.penalty_mask[static_cast<size_t>(j)]) {
                free_resid = std::max(free_resid, std::abs(grad(j)));
            } else if (bmax > 0.0 && std::abs(beta(j)) >= cut && beta(j) != 0.0) {
                pen_resid = std::max(pen_resid,
                                     std::abs(grad(j) + (beta(j) > 0.0 ? lambda : -lambda)));
            } else {
                pen_resid = std::max(pen_resid, std::max(0.0, std::abs(grad(j)) - lambda));
            }
        }
        if (pen_resid <= pen_scale && free_resid <= tol) {
            auto [resid, zeta] = kkt_residual(X, prob.y, lambda, beta, prob.penalty_mask);
            LassoSolution sol;
            sol.beta = beta;
            sol.zeta = zeta;
            sol.support = extract_support(beta);
            sol.kkt_residual = resid;
            double l1 = 0.0;
            for (int j = 0; j < p; ++j)
                if (prob.penalty_mask[static_cast<size_t>(j)]) l1 += std::abs(beta(j));
            sol.objective = (prob.y - X.X * beta).squaredNorm() + 2.0 * lambda * l1;
            sol.iterations = sweep + 1;
            return sol;
        }
    }
    const double resid =
        kkt_residual(X, prob.y, lambda, beta, prob.penalty_mask).first;
    throw NoConvergence("solve_lasso: no convergence after " +
                            std::to_string(max_iter) + " sweeps (residual " +
                            format_double(resid) + ")",
                        max_iter, resid, beta);
}

LassoSolution solve_noiseless(const DesignMatrix& X, const Vector& beta0,
                              double lambda_star, double tol, int max_iter) {
    LassoProblem prob(X, X.X * beta0, lambda_star);
    return solve_lasso(prob, tol, max_iter);
}

LassoSolution solve_population_noiseless(const CovarianceModel& model, int n,
                                         const Vector& beta0, double lambda,
                                         double tol, int max_iter) {
    // n ||S^{1/2}(b - beta0)||^2 = ||sqrt(n) chol^T (b - beta0)||^2
    const double rn = std::sqrt(static_cast<double>(n));
    DesignMatrix A(Matrix(rn * model.chol.transpose()));
    return solve_noiseless(A, beta0, lambda, tol, max_iter);
}

}  // namespace lassobounds
