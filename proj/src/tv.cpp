#include "lassobounds/tv.hpp"

#include "lassobounds/compat.hpp"
#include "lassobounds/projections.hpp"

#include <cmath>
#include <numeric>

namespace lassobounds {

TvInstance::TvInstance(int n_, std::vector<int> distances)
    : n(n_), d(std::move(distances)) {
    if (n < 2) throw Error("TvInstance: n must be >= 2");
    if (d.size() < 2) throw Error("TvInstance: need at least one jump");
    long total = 0;
    for (size_t j = 0; j < d.size(); ++j) {
        if (d[j] < 1) throw Error("TvInstance: distances must be >= 1");
        total += d[j];
        // interior distances (strictly between two jumps) must be even
        if (j >= 1 && j + 1 < d.size() && d[j] % 2 != 0)
            throw OddDistance("TvInstance: interior distance d[" +
                              std::to_string(j + 1) + "] = " +
                              std::to_string(d[j]) + " is odd");
    }
    if (total != n)
        throw Error("TvInstance: distances sum to " + std::to_string(total) +
                    ", expected n = " + std::to_string(n));
}

std::vector<int> TvInstance::jump_locations() const {
    std::vector<int> loc;
    int acc = 0;
    for (size_t j = 0; j + 1 < d.size(); ++j) {
        acc += d[j];
        loc.push_back(acc);  // 0-based start of the next block
    }
    return loc;
}

double total_variation(const Vector& f) {
    double tv = 0.0;
    for (int i = 1; i < f.size(); ++i) tv += std::abs(f(i) - f(i - 1));
    return tv;
}

DesignMatrix tv_design(int n) {
    if (n < 2) throw Error("tv_design: n must be >= 2");
    Matrix X = Matrix::Zero(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c <= r; ++c) X(r, c) = 1.0;
    return DesignMatrix(std::move(X));
}

namespace {

double harmonic_denominator(const TvInstance& inst) {
    const double n = inst.n;
    const int s = inst.s();
    double acc = n / inst.d[0] + n / inst.d[static_cast<size_t>(s)];
    for (int j = 1; j < s; ++j) acc += 4.0 * n / inst.d[static_cast<size_t>(j)];
    return acc;
}

// Plateau values of the unnormalized profile: block 1 sits at -n/d_1,
// interior block j at (-1)^j 2n/d_j, the last block at (-1)^{s+1} n/d_{s+1}.
std::vector<double> profile_levels(const TvInstance& inst) {
    const double n = inst.n;
    const int s = inst.s();
    std::vector<double> lev(static_cast<size_t>(s) + 1);
    lev[0] = -n / inst.d[0];
    for (int j = 1; j < s; ++j)
        lev[static_cast<size_t>(j)] = (j % 2 == 0 ? -1.0 : 1.0) * 2.0 * n / inst.d[static_cast<size_t>(j)];
    lev[static_cast<size_t>(s)] = (s % 2 == 0 ? -1.0 : 1.0) * n / inst.d[static_cast<size_t>(s)];
    return lev;
}

// Unnormalized increment vector of the profile; nonzero exactly at
// coordinate 0 and the jump locations.
Vector tv_btilde(const TvInstance& inst) {
    const std::vector<double> lev = profile_levels(inst);
    Vector bt = Vector::Zero(inst.n);
    bt(0) = lev[0];
    const std::vector<int> loc = inst.jump_locations();
    for (size_t j = 0; j < loc.size(); ++j) bt(loc[j]) = lev[j + 1] - lev[j];
    return bt;
}

}  // namespace

double tv_kappa_closed_form(const TvInstance& inst) {
    return static_cast<double>(inst.s() + 1) / harmonic_denominator(inst);
}

Vector tv_bstar(const TvInstance& inst) {
    Vector bt = tv_btilde(inst);
    double norm_s = 0.0;
    for (int j : inst.jump_locations()) norm_s += std::abs(bt(j));
    return bt / norm_s;
}

TvSignal tv_denoise(const Vector& y, double lambda, double tol, int max_iter,
                    LassoSolution* solution) {
    const int n = static_cast<int>(y.size());
    std::vector<bool> mask(static_cast<size_t>(n), true);
    mask[0] = false;  // level coefficient carries no penalty
    LassoProblem prob(tv_design(n), y, lambda, std::move(mask));
    LassoSolution sol = solve_lasso(prob, tol, max_iter);
    TvSignal out;
    out.f = prob.X.X * sol.beta;
    out.tv = total_variation(out.f);
    if (solution) *solution = std::move(sol);
    return out;
}

TvNoiselessError tv_noiseless_error(const Vector& f0, double lambda_star,
                                    double tol) {
    const int n = static_cast<int>(f0.size());
    std::vector<int> loc;
    for (int i = 1; i < n; ++i)
        if (f0(i) != f0(i - 1)) loc.push_back(i);
    if (loc.empty()) throw Error("tv_noiseless_error: signal has no jumps");

    std::vector<int> d;
    int prev = 0;
    for (int l : loc) {
        d.push_back(l - prev);
        prev = l;
    }
    d.push_back(n - prev);
    TvInstance inst(n, d);
    const int s = inst.s();

    // alternation and magnitude guards
    const Vector bt = tv_btilde(inst);
    double prev_jump = 0.0;
    for (int k = 0; k < s; ++k) {
        const int l = loc[static_cast<size_t>(k)];
        const double jump = f0(l) - f0(l - 1);
        if (k > 0 && jump * prev_jump >= 0.0)
            throw BetaminViolated(
                "tv_noiseless_error: jumps must alternate in direction at position " +
                    std::to_string(l + 1),
                l);
        prev_jump = jump;
        const double threshold = std::abs(bt(l)) * lambda_star / static_cast<double>(n);
        if (std::abs(jump) < threshold)
            throw BetaminViolated(
                "tv_noiseless_error: jump at position " + std::to_string(l + 1) +
                    " has magnitude " + format_double(std::abs(jump)) +
                    " below threshold " + format_double(threshold),
                l);
    }

    TvNoiselessError out;
    out.predicted = harmonic_denominator(inst) * lambda_star * lambda_star /
                    static_cast<double>(n);
    TvSignal fit = tv_denoise(f0, lambda_star, tol);
    out.actual = (fit.f - f0).squaredNorm();
    out.rel_err = out.predicted > 0.0
                      ? std::abs(out.predicted - out.actual) / out.predicted
                      : std::abs(out.predicted - out.actual);
    return out;
}

WeightedKappaBound weighted_kappa_bound(const TvInstance& inst, const Vector& w,
                                        double tol) {
    const int n = inst.n;
    if (w.size() != n) throw Error("weighted_kappa_bound: need one weight per position");
    if (w.minCoeff() < 0.0) throw Error("weighted_kappa_bound: weights must be >= 0");
    const ActiveSet S = inst.jump_set();
    const ActiveSet free_set(std::vector<int>{0});

    CompatSpec spec;
    spec.S = S;
    spec.free = free_set;
    Vector aw(S.size());
    for (int k = 0; k < S.size(); ++k) aw(k) = w(S.indices()[static_cast<size_t>(k)]);
    spec.active_weights = aw;
    std::vector<double> cw;
    for (int j = 1; j < n; ++j)
        if (!S.contains(j)) cw.push_back(w(j));
    spec.weights = Eigen::Map<Vector>(cw.data(), static_cast<int>(cw.size()));

    CompatResult res = kappa_hat_sq(tv_design(n), spec, tol);
    if (res.value <= 1e-12)
        throw DegenerateKappa("weighted_kappa_bound: kappa(w,S) vanishes");

    WeightedKappaBound out;
    out.kappa_w_sq = res.value;
    const double sq = std::sqrt(static_cast<double>(inst.s() + 1));
    out.lhs = sq / std::sqrt(res.value);
    double diff_sq = 0.0;
    for (int i = 1; i < n; ++i) diff_sq += (w(i) - w(i - 1)) * (w(i) - w(i - 1));
    out.rhs = w.cwiseAbs().maxCoeff() * sq / std::sqrt(tv_kappa_closed_form(inst)) +
              std::sqrt(static_cast<double>(n) * diff_sq);
    return out;
}

VdiagLogCheck tv_vdiag_log_check(const TvInstance& inst) {
    const int n = inst.n;
    if (n < 4) throw Error("tv_vdiag_log_check: n must be >= 4");
    std::vector<int> s0 = inst.jump_locations();
    s0.push_back(0);
    const ActiveSet S0(std::move(s0));
    ProjectionDiag pd = anti_projection_diag(tv_design(n), S0);
    if (!pd.rank_ok) throw RankDeficient("tv_vdiag_log_check: X_S0 rank deficient");

    VdiagLogCheck out;
    out.v = Vector::Zero(n);
    for (const auto& [j, vsq] : pd.v_sq) out.v(j) = std::sqrt(vsq);
    const double vinf = out.v.cwiseAbs().maxCoeff();
    double acc = 0.0;
    for (int i = 1; i < n; ++i) acc += (out.v(i) - out.v(i - 1)) * (out.v(i) - out.v(i - 1));
    out.ratio_sum = acc / (vinf * vinf);
    out.bound = static_cast<double>(inst.s() + 1) * std::log(static_cast<double>(n));
    return out;
}

}  // namespace lassobounds
