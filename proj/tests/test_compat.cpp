#include <doctest.h>

#include "lassobounds/compat.hpp"
#include "lassobounds/rng.hpp"
#include "lassobounds/tv.hpp"

using namespace lassobounds;

namespace {

DesignMatrix random_design(int n, int p, Rng& rng) {
    Matrix X(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    return DesignMatrix(std::move(X));
}

}  // namespace

TEST_CASE("sign-fixed subproblem: hand-solved two-variable case") {
    QpSubproblem sub;
    sub.design = std::sqrt(2.0) * Matrix::Identity(2, 2);
    sub.S = ActiveSet({0});
    sub.z = {1};
    auto [value, b] = solve_qp_subproblem(sub);
    CHECK(value == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(b(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(b(1)) < 1e-9);
}

TEST_CASE("sign-fixed subproblem with duplicate columns matches a grid") {
    Matrix X(3, 2);
    X << 1, 1, 2, 2, -1, -1;  // identical columns
    QpSubproblem sub;
    sub.design = X;
    sub.S = ActiveSet({0});
    sub.z = {1};
    auto [value, b] = solve_qp_subproblem(sub);
    (void)b;
    double best = 1e300;
    for (int k = -40000; k <= 40000; ++k) {
        const double b2 = k / 4000.0;
        const double b1 = 1.0 + std::abs(b2);
        Vector v(2);
        v << b1, b2;
        best = std::min(best, (X * v).squaredNorm());
    }
    CHECK(value == doctest::Approx(best).epsilon(1e-5));
}

TEST_CASE("zero complement weights relax the constraint entirely") {
    Rng rng(21);
    DesignMatrix X = random_design(6, 3, rng);
    QpSubproblem sub;
    sub.design = X.X;
    sub.S = ActiveSet({0});
    sub.z = {1};
    sub.weights = Vector::Zero(2);
    auto [value, b] = solve_qp_subproblem(sub);
    // grid oracle: b1 = 1 fixed by the constraint, complement free
    double best = 1e300;
    for (int i = -300; i <= 300; ++i)
        for (int j = -300; j <= 300; ++j) {
            Vector v(3);
            v << 1.0, i / 100.0, j / 100.0;
            best = std::min(best, (X.X * v).squaredNorm());
        }
    CHECK(value <= best + 1e-8);
    CHECK(b(0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("kappa is one on scaled orthonormal designs") {
    for (int p = 2; p <= 6; ++p) {
        Matrix X = std::sqrt(static_cast<double>(p)) * Matrix::Identity(p, p);
        std::vector<int> idx;
        for (int j = 0; j < p; j += 2) idx.push_back(j);
        CompatResult res = kappa_hat_sq(DesignMatrix(X),
                                        CompatSpec::uniform(ActiveSet(idx), 1.0, p));
        CHECK(res.value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(res.certificate_gap <= 1e-6);
    }
}

TEST_CASE("kappa on the step design with a free level coordinate") {
    DesignMatrix X = tv_design(8);
    CompatSpec spec;
    spec.S = ActiveSet({4});           // jump at position 5, 1-based
    spec.free = ActiveSet({0});        // level coefficient
    CompatResult res = kappa_hat_sq(X, spec);
    CHECK(res.value == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(res.subproblem_count == 1);
    // minimizer profile: b*_5 = 1, b*_1 = -1/2
    CHECK(res.minimizer(4) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(res.minimizer(0) == doctest::Approx(-0.5).epsilon(1e-7));
}

TEST_CASE("kappa agrees with the random-search oracle on small designs") {
    Rng rng(31);
    for (int trial = 0; trial < 3; ++trial) {
        DesignMatrix X = random_design(7, 3, rng);
        CompatSpec spec = CompatSpec::uniform(ActiveSet({0}), 1.0, 3);
        CompatResult exact = kappa_hat_sq(X, spec);
        Rng orng(1000 + static_cast<std::uint64_t>(trial));
        const double oracle = brute_force_compat(X, spec, 1000000, orng);
        CHECK(oracle >= exact.value - 1e-9);
        CHECK(std::abs(oracle - exact.value) <= 1e-3 * std::max(1.0, exact.value));
    }
}

TEST_CASE("phi on the identity design") {
    Matrix X = 2.0 * Matrix::Identity(4, 4);
    CHECK(phi_hat_sq(DesignMatrix(X), ActiveSet({0}), 1.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("phi never exceeds kappa") {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const int p = 2 + static_cast<int>(rng.below(5));
        const int n = p + 2 + static_cast<int>(rng.below(6));
        DesignMatrix X = random_design(n, p, rng);
        std::vector<int> idx;
        const int s = 1 + static_cast<int>(rng.below(std::min(3, p)));
        while (static_cast<int>(idx.size()) < s) {
            int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
            if (std::find(idx.begin(), idx.end(), j) == idx.end()) idx.push_back(j);
        }
        ActiveSet S(idx);
        for (double u : {0.5, 1.0, 2.0}) {
            const double phi = phi_hat_sq(X, S, u);
            CompatResult kap = kappa_hat_sq(X, CompatSpec::uniform(S, u, p));
            CHECK(kap.value >= phi - 1e-8);
        }
    }
}

TEST_CASE("phi matches a dense grid on a correlated two-column design") {
    Matrix X(2, 2);
    X << 1.0, 0.8, 0.0, 0.6;
    // u = 0.7 leaves the complement ball slack, u = 2 makes it bind
    for (double u : {0.7, 2.0}) {
        const double phi = phi_hat_sq(DesignMatrix(X), ActiveSet({0}), u);
        double best = 1e300;
        for (int sgn = -1; sgn <= 1; sgn += 2)
            for (int k = -20000; k <= 20000; ++k) {
                const double b2 = k / 10000.0;
                if (std::abs(b2) > 1.0 / u) continue;
                Vector v(2);
                v << static_cast<double>(sgn), b2;
                best = std::min(best, (X * v).squaredNorm() / 2.0);
            }
        CHECK(phi == doctest::Approx(best).epsilon(1e-3));
    }
}

TEST_CASE("cone restricted minimum matches a grid when the ball binds") {
    Matrix X3(3, 2);  // strongly cancelling pair
    X3 << 1.0, -0.98, 0.0, 0.19899749, 0.0, 0.0;
    DesignMatrix D(X3);
    const double u = 0.3, v = 2.0;
    auto [kappa_v, restricted] = cone_bound_check(D, ActiveSet({0}), u, v);
    const double radius = 1.0 + (1.0 + u) / (v - u);
    double best = 1e300;
    for (int k = -40000; k <= 40000; ++k) {
        const double b2 = k / 10000.0;
        const double b1_mag = 1.0 + u * std::abs(b2);
        if (b1_mag + std::abs(b2) > radius) continue;
        for (int sgn = -1; sgn <= 1; sgn += 2) {
            Vector b(2);
            b << sgn * b1_mag, b2;
            best = std::min(best, (X3 * b).squaredNorm() / 3.0);
        }
    }
    CHECK(restricted == doctest::Approx(best).epsilon(1e-4));
    CHECK(kappa_v >= restricted - 1e-8);
}

TEST_CASE("theoretical constant on the identity covariance") {
    CovarianceModel model = CovarianceModel::identity(4);
    for (int s = 1; s <= 3; ++s) {
        std::vector<int> idx;
        for (int j = 0; j < s; ++j) idx.push_back(j);
        CompatResult res = kappa_theoretical_sq(
            model, CompatSpec::uniform(ActiveSet(idx), 1.0, 4));
        CHECK(res.value == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("theoretical constant matches the one-dimensional scan") {
    for (double rho : {0.3, 0.7, -0.5}) {
        Matrix sigma(2, 2);
        sigma << 1.0, rho, rho, 1.0;
        CovarianceModel model = CovarianceModel::from_sigma(sigma);
        CompatResult res = kappa_theoretical_sq(
            model, CompatSpec::uniform(ActiveSet({0}), 1.0, 2));
        double best = 1e300;
        for (int k = -100000; k <= 100000; ++k) {
            const double b2 = k * 1e-4;
            const double b1 = 1.0 + std::abs(b2);
            best = std::min(best, b1 * b1 + 2.0 * rho * b1 * b2 + b2 * b2);
        }
        CHECK(res.value == doctest::Approx(best).epsilon(1e-6));
    }
}

TEST_CASE("theoretical constant at weight zero frees the complement") {
    Matrix sigma(2, 2);
    sigma << 1.0, 0.6, 0.6, 1.0;
    CovarianceModel model = CovarianceModel::from_sigma(sigma);
    CompatResult res = kappa_theoretical_sq(
        model, CompatSpec::uniform(ActiveSet({0}), 0.0, 2));
    // b1 = 1, b2 free: min of 1 + 1.2 b2 + b2^2 is 1 - 0.36
    CHECK(res.value == doctest::Approx(0.64).epsilon(1e-8));
}

TEST_CASE("oracle stays above the engine and close on the step design") {
    DesignMatrix X = tv_design(8);
    CompatSpec spec;
    spec.S = ActiveSet({4});
    spec.free = ActiveSet({0});
    Rng rng(55);
    const double oracle = brute_force_compat(X, spec, 1000000, rng);
    CHECK(oracle >= 0.5 - 1e-9);
    CHECK(oracle == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("oracle agrees with the engine on a weighted free-coordinate spec") {
    DesignMatrix X = tv_design(8);
    CompatSpec spec;
    spec.S = ActiveSet({4});
    spec.free = ActiveSet({0});
    spec.active_weights = Vector::Constant(1, 0.8);
    Vector w(6);
    w << 0.5, 0.7, 0.9, 1.0, 1.1, 1.2;
    spec.weights = w;
    CompatResult exact = kappa_hat_sq(X, spec);
    Rng rng(4242);
    const double oracle = brute_force_compat(X, spec, 1000000, rng);
    CHECK(oracle >= exact.value - 1e-9);
    CHECK(oracle == doctest::Approx(exact.value).epsilon(1e-3));
}

TEST_CASE("oracle on the identity design") {
    Matrix X = 2.0 * Matrix::Identity(4, 4);
    CompatSpec spec = CompatSpec::uniform(ActiveSet({1}), 1.0, 4);
    Rng rng(66);
    const double oracle = brute_force_compat(DesignMatrix(X), spec, 500000, rng);
    CHECK(oracle == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("l1 bound on the minimizer") {
    SUBCASE("identity design at u = 0 is tight") {
        Matrix X = Matrix::Identity(3, 3);
        auto [lhs, rhs] = ell1_bound_check(DesignMatrix(X), ActiveSet({0}), 0.0);
        CHECK(lhs == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(rhs == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("random designs at u = 0.5 and u = 0.99") {
        Rng rng(71);
        for (int trial = 0; trial < 10; ++trial) {
            DesignMatrix X = random_design(8, 4, rng);
            for (double u : {0.5, 0.99}) {
                auto [lhs, rhs] = ell1_bound_check(X, ActiveSet({0, 2}), u);
                CHECK(lhs <= rhs + 1e-6);
                CHECK(std::isfinite(rhs));
            }
        }
    }
}

TEST_CASE("cone inclusion bound") {
    SUBCASE("identity design") {
        Matrix X = 2.0 * Matrix::Identity(4, 4);  // columns of norm sqrt(n)
        auto [kappa_v, restricted] =
            cone_bound_check(DesignMatrix(X), ActiveSet({0}), 0.5, 1.0);
        CHECK(kappa_v == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(restricted == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(kappa_v >= restricted - 1e-8);
    }
    SUBCASE("random p = 4 designs") {
        Rng rng(81);
        for (int trial = 0; trial < 10; ++trial) {
            DesignMatrix X = random_design(9, 4, rng);
            auto [kappa_v, restricted] =
                cone_bound_check(X, ActiveSet({1, 3}), 0.5, 2.0);
            CHECK(kappa_v >= restricted - 1e-8);
        }
    }
    SUBCASE("vanishing gap blows up the radius but keeps the inequality") {
        Rng rng(91);
        DesignMatrix X = random_design(8, 4, rng);
        auto [kappa_v, restricted] =
            cone_bound_check(X, ActiveSet({0}), 0.5, 0.51);
        CHECK(kappa_v >= restricted - 1e-8);
    }
}

TEST_CASE("kappa never decreases under pointwise larger weights") {
    // larger complement weights shrink the constraint set {g_w(b) >= 1}, so
    // kappa^2(1-vbar,S) <= kappa^2(1,S) <= kappa^2(1+vbar,S)
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        const int p = 3 + static_cast<int>(rng.below(3));
        DesignMatrix X = random_design(p + 3, p, rng);
        ActiveSet S({0, 1});
        const double vbar = rng.uniform() * 0.9;
        CompatResult lo = kappa_hat_sq(X, CompatSpec::uniform(S, 1.0 - vbar, p));
        CompatResult mid = kappa_hat_sq(X, CompatSpec::uniform(S, 1.0, p));
        CompatResult hi = kappa_hat_sq(X, CompatSpec::uniform(S, 1.0 + vbar, p));
        CHECK(lo.value <= mid.value + 1e-8);
        CHECK(mid.value <= hi.value + 1e-8);
    }
}

TEST_CASE("nonzero minimizer on S whenever the value is positive") {
    Rng rng(111);
    for (int trial = 0; trial < 20; ++trial) {
        const int p = 2 + static_cast<int>(rng.below(4));
        DesignMatrix X = random_design(p + 2, p, rng);
        std::vector<int> idx = {0};
        if (p > 2 && trial % 2) idx.push_back(2);
        CompatResult res = kappa_hat_sq(X, CompatSpec::uniform(ActiveSet(idx), 1.0, p));
        if (res.value > 1e-10) {
            for (int j : idx) CHECK(std::abs(res.minimizer(j)) > 1e-10);
        }
    }
}

TEST_CASE("stationarity certificate at unit weights") {
    Rng rng(121);
    for (int trial = 0; trial < 20; ++trial) {
        const int p = 3 + static_cast<int>(rng.below(4));
        DesignMatrix X = random_design(p + 4, p, rng);
        CompatResult res =
            kappa_hat_sq(X, CompatSpec::uniform(ActiveSet({0, 1}), 1.0, p));
        CHECK(res.certificate_gap <= 1e-6);
    }
}

TEST_CASE("sign symmetry: flipping complement columns preserves the value") {
    Rng rng(131);
    DesignMatrix X = random_design(8, 5, rng);
    ActiveSet S({0, 1});
    CompatResult base = kappa_hat_sq(X, CompatSpec::uniform(S, 1.0, 5));
    Matrix Xf = X.X;
    Xf.col(2) *= -1.0;
    Xf.col(4) *= -1.0;
    CompatResult flipped =
        kappa_hat_sq(DesignMatrix(Xf), CompatSpec::uniform(S, 1.0, 5));
    CHECK(flipped.value == doctest::Approx(base.value).epsilon(1e-8));
}

TEST_CASE("scale law: c X multiplies the value by c^2") {
    Rng rng(141);
    DesignMatrix X = random_design(7, 4, rng);
    ActiveSet S({1, 2});
    CompatResult base = kappa_hat_sq(X, CompatSpec::uniform(S, 1.0, 4));
    for (double c : {0.5, 3.0}) {
        CompatResult scaled = kappa_hat_sq(DesignMatrix(Matrix(c * X.X)),
                                           CompatSpec::uniform(S, 1.0, 4));
        CHECK(scaled.value == doctest::Approx(c * c * base.value).epsilon(1e-8));
    }
}

TEST_CASE("guards: empty S, oversized S, invalid weights") {
    Matrix X = Matrix::Identity(4, 4);
    DesignMatrix D(X);
    CHECK_THROWS_AS(kappa_hat_sq(D, CompatSpec::uniform(ActiveSet(), 1.0, 4)),
                    InfeasibleSpec);
    Matrix big = Matrix::Identity(22, 22);
    std::vector<int> all;
    for (int j = 0; j < 21; ++j) all.push_back(j);
    CHECK_THROWS_AS(kappa_hat_sq(DesignMatrix(big),
                                 CompatSpec::uniform(ActiveSet(all), 1.0, 22)),
                    CapExceeded);
    CompatSpec bad = CompatSpec::uniform(ActiveSet({0}), 1.0, 4);
    bad.weights = Vector::Constant(3, -0.5);
    CHECK_THROWS_AS(kappa_hat_sq(D, bad), InfeasibleSpec);
}

TEST_CASE("degenerate value reports a witnessing direction") {
    // a zero column inside S gives value 0 with b* = e_j
    Matrix X = Matrix::Identity(3, 3);
    X.col(1).setZero();
    CompatResult res =
        kappa_hat_sq(DesignMatrix(X), CompatSpec::uniform(ActiveSet({1}), 1.0, 3));
    CHECK(res.value <= 1e-12);
    CHECK(res.minimizer.cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("fixed-sign box subproblem matches the sign-constrained engine") {
    // with signs fixed to the engine's optimum the two problems coincide
    Rng rng(151);
    DesignMatrix X = random_design(8, 4, rng);
    ActiveSet S({0, 2});
    CompatResult res = kappa_hat_sq(X, CompatSpec::uniform(S, 1.0, 4));
    auto [val, b] = constrained_min_fixed_signs(X, S, res.signs, Vector::Ones(2));
    (void)b;
    const double engine_raw = res.value * X.n() / S.size();
    CHECK(val <= engine_raw + 1e-8);
}
