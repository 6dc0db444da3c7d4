#include <doctest.h>

#include "lassobounds/lasso.hpp"
#include "lassobounds/rng.hpp"

using namespace lassobounds;

namespace {

DesignMatrix column_ones() {
    Matrix X(2, 1);
    X << 1, 1;
    return DesignMatrix(X);
}

}  // namespace

TEST_CASE("one-column problem, interior lambda") {
    // stationarity 2(2b - 4) + 2 lambda sign(b) = 0 with lambda = 1 -> b = 1.5
    Vector y(2);
    y << 2, 2;
    LassoSolution sol = solve_lasso(LassoProblem(column_ones(), y, 1.0));
    CHECK(sol.beta(0) == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(sol.zeta(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.kkt_residual <= 1e-8);
}

TEST_CASE("one-column problem, full shrinkage at the critical lambda") {
    Vector y(2);
    y << 2, 2;
    LassoSolution sol = solve_lasso(LassoProblem(column_ones(), y, 4.0));
    CHECK(sol.beta(0) == 0.0);
}

TEST_CASE("one-column problem, no penalty") {
    Vector y(2);
    y << 2, 2;
    LassoSolution sol = solve_lasso(LassoProblem(column_ones(), y, 0.0));
    CHECK(sol.beta(0) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("noiseless coordinatewise shrinkage") {
    Matrix X = std::sqrt(3.0) * Matrix::Identity(3, 3);
    Vector beta0(3);
    beta0 << 2, 0, 0;
    LassoSolution sol = solve_noiseless(DesignMatrix(X), beta0, 3.0);
    CHECK(sol.beta(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.beta(1) == 0.0);
    CHECK(sol.beta(2) == 0.0);
}

TEST_CASE("noiseless with zero penalty returns beta0 fit") {
    Rng rng(5);
    Matrix X(6, 3);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    Vector beta0(3);
    beta0 << 0.5, -1.0, 2.0;
    LassoSolution sol = solve_noiseless(DesignMatrix(X), beta0, 0.0);
    CHECK((X * (sol.beta - beta0)).norm() < 1e-8);
}

TEST_CASE("noiseless fixed point at the origin") {
    Matrix X = Matrix::Identity(3, 3);
    LassoSolution sol = solve_noiseless(DesignMatrix(X), Vector::Zero(3), 2.5);
    CHECK(sol.beta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("population problem matches the fixed-design construction") {
    CovarianceModel model = CovarianceModel::identity(3);
    Vector beta0(3);
    beta0 << 2, 0, 0;
    LassoSolution sol = solve_population_noiseless(model, 3, beta0, 3.0);
    CHECK(sol.beta(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.beta(1) == 0.0);
}

TEST_CASE("population full shrinkage for huge lambda") {
    CovarianceModel model = CovarianceModel::identity(2);
    Vector beta0(2);
    beta0 << 1, -1;
    const int n = 4;
    const double lambda = 2.0 * n * 1.0;  // beyond n * max |sigma0 beta0|
    LassoSolution sol = solve_population_noiseless(model, n, beta0, lambda);
    CHECK(sol.beta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("population separable diagonal case") {
    Matrix sigma = Matrix::Zero(2, 2);
    sigma(0, 0) = 4.0;
    sigma(1, 1) = 1.0;
    CovarianceModel model = CovarianceModel::from_sigma(sigma);
    Vector beta0(2);
    beta0 << 1, 1;
    // coordinate stationarity: n sigma_jj (b - beta0_j) + lambda sign = 0
    LassoSolution sol = solve_population_noiseless(model, 1, beta0, 1.0);
    CHECK(sol.beta(0) == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(sol.beta(1) == 0.0);
}

TEST_CASE("kkt residual of a certified optimum is tiny") {
    Vector y(2);
    y << 2, 2;
    DesignMatrix X = column_ones();
    LassoSolution sol = solve_lasso(LassoProblem(X, y, 1.0));
    auto [resid, zeta] = kkt_residual(X, y, 1.0, sol.beta, {true});
    CHECK(resid <= 1e-8);
    CHECK(zeta(0) == doctest::Approx(1.0));
}

TEST_CASE("kkt residual of the zero vector is the correlation excess") {
    Rng rng(11);
    Matrix X(8, 4);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 4; ++j) X(i, j) = rng.normal();
    Vector y(8);
    for (int i = 0; i < 8; ++i) y(i) = rng.normal();
    DesignMatrix D(X);
    const double corr_inf = (X.transpose() * y).cwiseAbs().maxCoeff();
    const double lambda = 0.5 * corr_inf;
    auto [resid, zeta] = kkt_residual(D, y, lambda, Vector::Zero(4),
                                      std::vector<bool>(4, true));
    CHECK(resid == doctest::Approx(corr_inf - lambda).epsilon(1e-12));
    CHECK(zeta.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("kkt residual at lambda zero for the exact least squares fit") {
    Rng rng(13);
    Matrix X(10, 3);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    Vector y(10);
    for (int i = 0; i < 10; ++i) y(i) = rng.normal();
    Vector ols = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    auto [resid, zeta] = kkt_residual(DesignMatrix(X), y, 0.0, ols,
                                      std::vector<bool>(3, true));
    CHECK(resid <= 1e-8);
    (void)zeta;
}

TEST_CASE("soft-threshold oracle on orthogonal designs") {
    // for X^T X = c I the solution is coordinatewise soft thresholding
    Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const int p = 1 + static_cast<int>(rng.below(10));
        const double scale = 0.5 + 2.0 * rng.uniform();
        Matrix X = scale * Matrix::Identity(p, p);
        Vector y(p);
        for (int j = 0; j < p; ++j) y(j) = 3.0 * rng.normal();
        const double lambda = rng.uniform() * scale * 2.0;
        LassoSolution sol = solve_lasso(LassoProblem(DesignMatrix(X), y, lambda));
        for (int j = 0; j < p; ++j) {
            const double c = scale * scale;
            const double corr = scale * y(j);
            const double expect =
                (corr > lambda ? corr - lambda : (corr < -lambda ? corr + lambda : 0.0)) / c;
            CHECK(sol.beta(j) == doctest::Approx(expect).epsilon(1e-9));
        }
    }
}

TEST_CASE("subgradient validity on random problems") {
    Rng rng(202);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 12, p = 6;
        Matrix X(n, p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
        Vector y(n);
        for (int i = 0; i < n; ++i) y(i) = rng.normal();
        const double lambda = 1.0 + 3.0 * rng.uniform();
        LassoSolution sol = solve_lasso(LassoProblem(DesignMatrix(X), y, lambda));
        CHECK(sol.zeta.cwiseAbs().maxCoeff() <= 1.0 + 1e-8);
        const double dot = sol.zeta.dot(sol.beta);
        CHECK(dot == doctest::Approx(sol.beta.cwiseAbs().sum()).epsilon(1e-7));
    }
}

TEST_CASE("scaling consistency") {
    Rng rng(303);
    Matrix X(9, 4);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 4; ++j) X(i, j) = rng.normal();
    Vector y(9);
    for (int i = 0; i < 9; ++i) y(i) = rng.normal();
    const double lambda = 1.3;
    LassoSolution base = solve_lasso(LassoProblem(DesignMatrix(X), y, lambda));
    for (double c : {0.1, 10.0}) {
        LassoSolution scaled = solve_lasso(
            LassoProblem(DesignMatrix(Matrix(c * X)), Vector(c * y), c * c * lambda));
        CHECK((scaled.beta - base.beta).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("warm start does not change the answer") {
    Rng rng(404);
    Matrix X(10, 5);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 5; ++j) X(i, j) = rng.normal();
    Vector y(10);
    for (int i = 0; i < 10; ++i) y(i) = rng.normal();
    LassoProblem prob(DesignMatrix(X), y, 2.0);
    LassoSolution cold = solve_lasso(prob);
    LassoProblem prob_next(DesignMatrix(X), y, 1.0);
    LassoSolution warm = solve_lasso(prob_next, 1e-10, 200000, &cold.beta);
    LassoSolution cold2 = solve_lasso(prob_next);
    CHECK((warm.beta - cold2.beta).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("unpenalized coordinate absorbs the mean") {
    // free first coordinate on an all-ones column: exact least squares step
    Matrix X(4, 2);
    X << 1, 0, 1, 0, 1, 1, 1, 1;
    Vector y(4);
    y << 1, 1, 5, 5;
    std::vector<bool> mask = {false, true};
    LassoSolution sol = solve_lasso(LassoProblem(DesignMatrix(X), y, 100.0, mask));
    CHECK(sol.beta(1) == 0.0);
    CHECK(sol.beta(0) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("objective sequence over truncated runs is non-increasing") {
    // cyclic descent is deterministic, so running k sweeps from cold gives
    // the k-th iterate; its objective must never rise
    Rng rng(606);
    Matrix X(10, 6);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 6; ++j) X(i, j) = rng.normal();
    Vector y(10);
    for (int i = 0; i < 10; ++i) y(i) = 2.0 * rng.normal();
    LassoProblem prob(DesignMatrix(X), y, 1.0);
    auto objective = [&](const Vector& b) {
        return (y - X * b).squaredNorm() + 2.0 * prob.lambda * b.cwiseAbs().sum();
    };
    double prev = objective(Vector::Zero(6));
    for (int sweeps = 1; sweeps <= 12; ++sweeps) {
        Vector beta;
        try {
            beta = solve_lasso(prob, 1e-14, sweeps).beta;
        } catch (const NoConvergence& e) {
            beta = e.best;
        }
        const double obj = objective(beta);
        CHECK(obj <= prev + 1e-12);
        prev = obj;
    }
}

TEST_CASE("no convergence carries the best iterate") {
    Rng rng(505);
    Matrix X(6, 3);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    Vector y(6);
    for (int i = 0; i < 6; ++i) y(i) = rng.normal();
    try {
        solve_lasso(LassoProblem(DesignMatrix(X), y, 0.5), 1e-14, 1);
        // a single sweep may legitimately converge on easy data; nothing to check
    } catch (const NoConvergence& e) {
        CHECK(e.best.size() == 3);
        CHECK(e.iterations == 1);
        CHECK(e.residual > 0.0);
    }
}
