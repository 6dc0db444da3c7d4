#include "lassobounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

namespace lassobounds {

namespace {

constexpr double kLog2 = 0.6931471805599453;

ActiveSet support_of(const Vector& beta0) {
    std::vector<int> idx;
    for (int j = 0; j < beta0.size(); ++j)
        if (beta0(j) != 0.0) idx.push_back(j);
    if (idx.empty()) throw Error("beta0 has empty support");
    return ActiveSet(std::move(idx));
}

BetaminReport betamin_from_engine(const CompatResult& res, const ActiveSet& S0,
                                  const Vector& beta0, double lambda,
                                  double n) {
    if (res.value <= 1e-12)
        throw DegenerateKappa("betamin: kappa^2(S0) vanishes");
    const double s0 = static_cast<double>(S0.size());

    // the minimizer is defined up to a global flip; pick the orientation
    // that matches more of beta0's signs (ties go to +1)
    int match_plus = 0, match_minus = 0;
    const std::vector<int>& idx = S0.indices();
    for (size_t k = 0; k < idx.size(); ++k) {
        const int zb = beta0(idx[k]) > 0.0 ? 1 : -1;
        if (zb == res.signs[k]) ++match_plus;
        else ++match_minus;
    }
    const int flip = match_minus > match_plus ? -1 : 1;

    BetaminReport rep;
    rep.S0 = S0;
    rep.kappa_sq = res.value;
    rep.signs_match = true;
    rep.margin = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < idx.size(); ++k) {
        const int j = idx[k];
        const double thr = std::abs(res.minimizer(j)) * s0 * lambda / (res.value * n);
        const int sign = flip * res.signs[k];
        rep.thresholds[j] = thr;
        rep.signs[j] = sign;
        if ((beta0(j) > 0.0 ? 1 : -1) != sign) rep.signs_match = false;
        rep.margin = std::min(rep.margin, std::abs(beta0(j)) - thr);
    }
    rep.satisfied = rep.signs_match && rep.margin > 0.0;
    return rep;
}

}  // namespace

BetaminReport betamin_noiseless(const DesignMatrix& X, const Vector& beta0,
                                double lambda_star, double tol) {
    const ActiveSet S0 = support_of(beta0);
    CompatResult res = kappa_hat_sq(X, CompatSpec::uniform(S0, 1.0, X.p()), tol);
    return betamin_from_engine(res, S0, beta0, lambda_star,
                               static_cast<double>(X.n()));
}

BetaminReport betamin_population(const CovarianceModel& model,
                                 const Vector& beta0, double lambda, int n,
                                 double tol) {
    const ActiveSet S0 = support_of(beta0);
    CompatResult res =
        kappa_theoretical_sq(model, CompatSpec::uniform(S0, 1.0, model.p()), tol);
    return betamin_from_engine(res, S0, beta0, lambda, static_cast<double>(n));
}

Vector construct_betamin_beta0(const DesignMatrix& X, const ActiveSet& S0,
                               double lambda_star, double margin, double tol) {
    if (margin <= 1.0)
        throw Error("construct_betamin_beta0: margin must exceed 1");
    CompatResult res = kappa_hat_sq(X, CompatSpec::uniform(S0, 1.0, X.p()), tol);
    if (res.value <= 1e-12)
        throw DegenerateKappa("construct_betamin_beta0: kappa^2(S0) vanishes");
    const double s0 = static_cast<double>(S0.size());
    const double n = static_cast<double>(X.n());
    Vector beta0 = Vector::Zero(X.p());
    const std::vector<int>& idx = S0.indices();
    for (size_t k = 0; k < idx.size(); ++k) {
        const int j = idx[k];
        const double thr = std::abs(res.minimizer(j)) * s0 * lambda_star / (res.value * n);
        beta0(j) = margin * thr * static_cast<double>(res.signs[k]);
    }
    return beta0;
}

NoiselessIdentity verify_noiseless_identity(const DesignMatrix& X,
                                            const Vector& beta0,
                                            double lambda_star, double tol) {
    BetaminReport rep = betamin_noiseless(X, beta0, lambda_star, tol);
    if (!rep.satisfied)
        throw BetaminViolated("verify_noiseless_identity: betamin condition fails",
                              -1, std::make_shared<BetaminReport>(rep));
    LassoSolution sol = solve_noiseless(X, beta0, lambda_star, tol);
    NoiselessIdentity out;
    out.s0 = rep.S0.size();
    out.kappa_sq = rep.kappa_sq;
    out.lhs = (X.X * (sol.beta - beta0)).squaredNorm();
    out.rhs = static_cast<double>(out.s0) * lambda_star * lambda_star /
              (static_cast<double>(X.n()) * rep.kappa_sq);
    out.rel_err = out.rhs > 0.0 ? std::abs(out.lhs - out.rhs) / out.rhs
                                : std::abs(out.lhs - out.rhs);
    return out;
}

// ---------------------------------------------------------------------------
// Monte-Carlo experiments
// ---------------------------------------------------------------------------

double binomial_slack(double nominal, long replicates) {
    const double q = std::clamp(nominal, 0.0, 1.0);
    return 3.0 * std::sqrt(std::max(q * (1.0 - q), 0.0) /
                           static_cast<double>(replicates));
}

namespace {

void validate_cfg(const ExperimentConfig& cfg) {
    if (cfg.replicates < 1) throw ConfigError("replicates must be >= 1");
    if (cfg.t <= 0.0 || cfg.x <= 0.0) throw ConfigError("t and x must be > 0");
    if (cfg.margin <= 1.0) throw ConfigError("margin must exceed 1");
}

ActiveSet default_s0(const ExperimentConfig& cfg, int p) {
    if (cfg.S0_override) return *cfg.S0_override;
    if (cfg.s0 < 1 || cfg.s0 > p) throw ConfigError("s0 out of range");
    std::vector<int> idx(static_cast<size_t>(cfg.s0));
    std::iota(idx.begin(), idx.end(), 0);
    return ActiveSet(std::move(idx));
}

Vector draw_normal(Rng& rng, int n) {
    Vector z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    return z;
}

}  // namespace

NoisySetup prepare_noisy_setup(const ExperimentConfig& cfg,
                               const DesignMatrix& X, double tol) {
    validate_cfg(cfg);
    const int p = X.p();
    NoisySetup st;
    st.S0 = default_s0(cfg, p);
    const int s0 = st.S0.size();

    ProjectionDiag pd = anti_projection_diag(X, st.S0);
    if (!pd.rank_ok)
        throw RankDeficient("noisy setup: X_S0 must have full column rank");
    const std::vector<int> comp = st.S0.complement(p);
    st.v.resize(static_cast<int>(comp.size()));
    for (size_t k = 0; k < comp.size(); ++k)
        st.v(static_cast<int>(k)) = std::sqrt(pd.v_sq.at(comp[k]));
    st.u.resize(s0);
    for (int k = 0; k < s0; ++k)
        st.u(k) = std::sqrt(pd.u_sq.at(st.S0.indices()[static_cast<size_t>(k)]));

    st.factor = std::sqrt(2.0 * (std::log(2.0 * p) + cfg.t));
    const double lambda_floor = st.v.size() > 0 ? st.v.maxCoeff() * st.factor : 0.0;
    if (cfg.lambda_multiplier <= 1.0)
        throw ConfigError("lambda multiplier must exceed 1: the tuning "
                          "parameter has to clear the noise-level floor");
    st.lambda = cfg.lambda_multiplier * lambda_floor;
    if (!(st.lambda > 0.0))
        throw ConfigError("noise-level floor is zero; nothing to tune against");
    st.vbar = st.v * (st.factor / st.lambda);
    st.ubar = st.u * (st.factor / st.lambda);
    if (st.vbar.size() > 0 && st.vbar.maxCoeff() >= 1.0)
        throw ConfigError("vbar must stay below 1");

    CompatSpec lower_spec;
    lower_spec.S = st.S0;
    lower_spec.weights = Vector::Ones(st.vbar.size()) + st.vbar;
    CompatResult lower = kappa_hat_sq(X, lower_spec, tol);
    if (lower.value <= 1e-12)
        throw DegenerateKappa("noisy setup: kappa^2(1+vbar, S0) vanishes");
    st.kappa_lower_sq = lower.value;
    st.zstar = lower.signs;

    CompatSpec upper_spec;
    upper_spec.S = st.S0;
    upper_spec.weights = Vector::Ones(st.vbar.size()) - st.vbar;
    CompatResult upper = kappa_hat_sq(X, upper_spec, tol);
    if (upper.value <= 1e-12)
        throw DegenerateKappa("noisy setup: kappa^2(1-vbar, S0) vanishes");
    st.kappa_upper_sq = upper.value;

    // Weight-box sweep for the betamin scale: corners on the complement
    // coordinates most entangled with S0, the two extreme corners, the
    // center, and random interior weights. The maximum found is a lower
    // estimate, so the threshold built from it is inflated by 2.
    st.bbox = Vector::Zero(s0);
    auto absorb = [&](const Vector& w) {
        auto [val, b] = constrained_min_fixed_signs(X, st.S0, st.zstar, w, tol);
        if (val <= 1e-12)
            throw DegenerateKappa("noisy setup: weight-box subproblem degenerate");
        for (int k = 0; k < s0; ++k) {
            const int j = st.S0.indices()[static_cast<size_t>(k)];
            st.bbox(k) = std::max(st.bbox(k), std::abs(b(j)) / val);
        }
        ++st.box_evaluations;
    };
    const Vector ones = Vector::Ones(st.vbar.size());
    absorb(ones + st.vbar);
    absorb(ones - st.vbar);
    absorb(ones);

    std::vector<int> order(comp.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ba = std::abs(lower.minimizer(comp[static_cast<size_t>(a)]));
        const double bb = std::abs(lower.minimizer(comp[static_cast<size_t>(b)]));
        if (ba != bb) return ba > bb;
        if (st.v(a) != st.v(b)) return st.v(a) > st.v(b);
        return a < b;
    });
    const int k_sel = std::min<int>(cfg.box_corner_cap, static_cast<int>(comp.size()));
    for (long mask = 0; mask < (1L << k_sel); ++mask) {
        Vector w = ones;
        for (int b = 0; b < k_sel; ++b) {
            const int ci = order[static_cast<size_t>(b)];
            w(ci) = (mask >> b) & 1 ? 1.0 + st.vbar(ci) : 1.0 - st.vbar(ci);
        }
        absorb(w);
    }
    Rng box_rng = Rng(cfg.seed).substream(0xB0C5);
    for (int r = 0; r < cfg.box_random_draws; ++r) {
        Vector w = ones;
        for (int k = 0; k < w.size(); ++k)
            w(k) += st.vbar(k) * box_rng.uniform(-1.0, 1.0);
        absorb(w);
    }

    st.beta0 = Vector::Zero(p);
    for (int k = 0; k < s0; ++k) {
        const int j = st.S0.indices()[static_cast<size_t>(k)];
        const double threshold = 2.0 * st.lambda * (st.bbox(k) + st.ubar(k));
        st.beta0(j) = cfg.margin * threshold * static_cast<double>(st.zstar[static_cast<size_t>(k)]);
    }
    return st;
}

namespace {

NoisyBoundsReport run_noisy_core(const ExperimentConfig& cfg,
                                 const DesignMatrix& X) {
    NoisySetup st = prepare_noisy_setup(cfg, X, cfg.tol);
    const int n = X.n();
    const double s0 = static_cast<double>(st.S0.size());
    const double rn = std::sqrt(static_cast<double>(n));
    const double lower_bound =
        std::sqrt(s0 / st.kappa_lower_sq) * st.lambda / rn - std::sqrt(s0) -
        std::sqrt(2.0 * cfg.x);
    const double upper_bound =
        std::sqrt(s0 / st.kappa_upper_sq) * st.lambda / rn + std::sqrt(s0) +
        std::sqrt(2.0 * cfg.x);

    NoisyBoundsReport out;
    out.lower.label = "noisy-lower";
    out.lower.formula =
        "||X(bhat-beta0)||_2 >= sqrt(s0/kappa^2(1+vbar,S0)) * sqrt(lambda^2/n)"
        " - sqrt(s0) - sqrt(2x)";
    out.upper.label = "noisy-upper";
    out.upper.formula =
        "||X(bhat-beta0)||_2 <= sqrt(s0/kappa^2(1-vbar,S0)) * sqrt(lambda^2/n)"
        " + sqrt(s0) + sqrt(2x)";

    const Rng base(cfg.seed);
    long held_lower = 0, held_upper = 0, held_both = 0;
    for (int rep = 0; rep < cfg.replicates; ++rep) {
        Rng sub = base.substream(static_cast<std::uint64_t>(rep));
        const Vector eps = draw_normal(sub, n);
        LassoProblem prob(X, X.X * st.beta0 + eps, st.lambda);
        LassoSolution sol = solve_lasso(prob, 1e-9);
        const double measured = (X.X * (sol.beta - st.beta0)).norm();
        const double U = noise_projection_norm(X, st.S0, eps);

        const bool lo = measured >= lower_bound;
        const bool hi = measured <= upper_bound;
        held_lower += lo;
        held_upper += hi;
        held_both += lo && hi;
        out.lower.trials.push_back({rep, measured, lower_bound, lo, st.lambda,
                                    st.kappa_lower_sq, U});
        out.upper.trials.push_back({rep, measured, upper_bound, hi, st.lambda,
                                    st.kappa_upper_sq, U});
    }

    const double nominal = 1.0 - std::exp(-cfg.t) - std::exp(-cfg.x);
    const double slack = binomial_slack(nominal, cfg.replicates);
    auto finish = [&](BoundReport& r, long held, double kappa) {
        r.coverage = static_cast<double>(held) / cfg.replicates;
        r.nominal = nominal;
        r.slack = slack;
        r.pass = r.coverage >= nominal - slack;
        r.details["lambda"] = st.lambda;
        r.details["kappa_sq"] = kappa;
        r.details["s0"] = s0;
        r.details["n"] = n;
        r.details["box_evaluations"] = st.box_evaluations;
    };
    finish(out.lower, held_lower, st.kappa_lower_sq);
    finish(out.upper, held_upper, st.kappa_upper_sq);
    out.coverage_both = static_cast<double>(held_both) / cfg.replicates;
    out.pass_both = out.coverage_both >= nominal - slack;
    return out;
}

}  // namespace

NoisyBoundsReport noisy_bounds_experiment(const ExperimentConfig& cfg,
                                          const DesignMatrix& X) {
    return run_noisy_core(cfg, X);
}

BoundReport noisy_lower_experiment(const ExperimentConfig& cfg,
                                   const DesignMatrix& X) {
    return run_noisy_core(cfg, X).lower;
}

BoundReport noisy_upper_experiment(const ExperimentConfig& cfg,
                                   const DesignMatrix& X) {
    return run_noisy_core(cfg, X).upper;
}

BoundReport variance_bound_experiment(const ExperimentConfig& cfg,
                                      const DesignMatrix& X) {
    if (cfg.lambda_star_ratio < 0.0 || cfg.lambda_star_ratio > 1.0)
        throw ConfigError("lambda_star_ratio must lie in [0, 1]");
    NoisySetup st = prepare_noisy_setup(cfg, X, cfg.tol);
    const int n = X.n();
    const int p = X.p();
    const double s = static_cast<double>(st.S0.size());
    const double lambda = st.lambda;
    const double lambda_star = cfg.lambda_star_ratio * lambda;

    Vector beta_star;
    Vector zeta_star;
    if (lambda_star == 0.0) {
        beta_star = st.beta0;
        zeta_star = Vector::Zero(p);
    } else {
        LassoSolution noiseless = solve_noiseless(X, st.beta0, lambda_star, 1e-10);
        beta_star = noiseless.beta;
        zeta_star = noiseless.zeta;
    }

    // subgradient strictness over the complement of S
    const std::vector<int> comp = st.S0.complement(p);
    for (size_t k = 0; k < comp.size(); ++k) {
        const int j = comp[k];
        const double lhs = lambda_star * std::abs(zeta_star(j)) / lambda;
        if (!(lhs < 1.0 - st.vbar(static_cast<int>(k))))
            throw HypothesisFailed(
                "variance bound: subgradient strictness fails at coordinate " +
                    std::to_string(j + 1),
                "lambda*|zeta*_j|/lambda < 1 - vbar_j");
    }

    double bound;
    double kappa_w_sq = 0.0;
    const bool degenerate_branch = cfg.lambda_star_ratio == 1.0;
    if (degenerate_branch) {
        bound = std::sqrt(s) + std::sqrt(2.0 * cfg.x);
    } else {
        CompatSpec wspec;
        wspec.S = st.S0;
        Vector wbar(static_cast<int>(comp.size()));
        for (size_t k = 0; k < comp.size(); ++k) {
            const int j = comp[k];
            wbar(static_cast<int>(k)) =
                (1.0 - st.vbar(static_cast<int>(k)) -
                 lambda_star * std::abs(zeta_star(j)) / lambda) /
                (1.0 - lambda_star / lambda);
        }
        wspec.weights = wbar;
        CompatResult res = kappa_hat_sq(X, wspec, cfg.tol);
        if (res.value <= 1e-12)
            throw DegenerateKappa("variance bound: kappa^2(wbar, S) vanishes");
        kappa_w_sq = res.value;
        bound = std::sqrt(s / kappa_w_sq) * (lambda - lambda_star) /
                    std::sqrt(static_cast<double>(n)) +
                std::sqrt(s) + std::sqrt(2.0 * cfg.x);
    }

    BoundReport out;
    out.label = "variance-bound";
    out.formula =
        "||X(bhat-beta*)||_2 <= sqrt(s/kappa^2(wbar,S)) * "
        "sqrt((lambda-lambda*)^2/n) + sqrt(s) + sqrt(2x)";
    const Rng base(cfg.seed);
    long held = 0;
    for (int rep = 0; rep < cfg.replicates; ++rep) {
        Rng sub = base.substream(static_cast<std::uint64_t>(rep));
        const Vector eps = draw_normal(sub, n);
        LassoProblem prob(X, X.X * st.beta0 + eps, lambda);
        LassoSolution sol = solve_lasso(prob, 1e-9);
        const double measured = (X.X * (sol.beta - beta_star)).norm();
        const double U = noise_projection_norm(X, st.S0, eps);
        const bool ok = measured <= bound;
        held += ok;
        out.trials.push_back({rep, measured, bound, ok, lambda,
                              degenerate_branch ? 0.0 : kappa_w_sq, U});
    }
    out.nominal = 1.0 - std::exp(-cfg.t) - std::exp(-cfg.x);
    out.slack = binomial_slack(out.nominal, cfg.replicates);
    out.coverage = static_cast<double>(held) / cfg.replicates;
    out.pass = out.coverage >= out.nominal - out.slack;
    out.details["lambda"] = lambda;
    out.details["lambda_star"] = lambda_star;
    out.details["kappa_wbar_sq"] = kappa_w_sq;
    out.details["s"] = s;
    return out;
}

BoundReport random_design_experiment(const ExperimentConfig& cfg,
                                     const CovarianceModel& model) {
    validate_cfg(cfg);
    const int p = model.p();
    const int n = cfg.n;
    if (n < 1) throw ConfigError("n must be >= 1");
    const ActiveSet S0 = default_s0(cfg, p);
    const double s0 = static_cast<double>(S0.size());

    CompatResult base =
        kappa_theoretical_sq(model, CompatSpec::uniform(S0, 1.0, p), cfg.tol);
    if (base.value <= 1e-12)
        throw DegenerateKappa("random design: kappa^2(S0) vanishes");

    const double log2p = std::log(2.0 * p);
    const double lambda =
        cfg.lambda_multiplier * 3.0 * std::sqrt(model.max_entry) *
        (std::sqrt(2.0 * n * (log2p + cfg.t)) + 2.0 * (log2p + cfg.t));

    Vector beta0 = Vector::Zero(p);
    for (int k = 0; k < S0.size(); ++k) {
        const int j = S0.indices()[static_cast<size_t>(k)];
        const double thr =
            std::abs(base.minimizer(j)) * s0 * lambda / (base.value * n);
        beta0(j) = cfg.margin * thr * static_cast<double>(base.signs[static_cast<size_t>(k)]);
    }

    LassoSolution pop = solve_population_noiseless(model, n, beta0, lambda, 1e-11);
    const Vector dstar = pop.beta - beta0;
    const double bias =
        std::sqrt(static_cast<double>(n) * dstar.dot(model.sigma0 * dstar));

    // rho: worst normalized set constant over |S| <= (Lmax^2/kappa^2(S0)) 4 s0.
    // Exact enumeration for p <= 8; larger p uses a declared nested family
    // and the result is only a lower estimate.
    const int cap = std::max(
        1, std::min(p, static_cast<int>(std::floor(
               (model.lambda_max_sq / base.value) * 4.0 * s0))));
    double rho_sq = 0.0;
    bool rho_exact = p <= 8;
    auto consider = [&](const std::vector<int>& subset) {
        if (subset.empty() || static_cast<int>(subset.size()) > cap) return;
        CompatResult r = kappa_theoretical_sq(
            model, CompatSpec::uniform(ActiveSet(subset), 1.0, p), cfg.tol);
        if (r.value <= 1e-12) {
            rho_sq = std::numeric_limits<double>::infinity();
            return;
        }
        rho_sq = std::max(rho_sq, (model.max_entry / r.value) * log2p *
                                      static_cast<double>(subset.size()) / n);
    };
    if (rho_exact) {
        for (long mask = 1; mask < (1L << p); ++mask) {
            std::vector<int> subset;
            for (int j = 0; j < p; ++j)
                if ((mask >> j) & 1) subset.push_back(j);
            consider(subset);
        }
    } else {
        consider(S0.indices());
        Rng order_rng = Rng(cfg.seed).substream(0x0DDE);
        std::vector<int> order(static_cast<size_t>(p));
        std::iota(order.begin(), order.end(), 0);
        for (int i = p - 1; i > 0; --i)
            std::swap(order[static_cast<size_t>(i)],
                      order[order_rng.below(static_cast<std::uint64_t>(i + 1))]);
        std::vector<int> prefix;
        for (int j = 0; j < std::min(p, cap); ++j) {
            prefix.push_back(order[static_cast<size_t>(j)]);
            consider(prefix);
        }
    }
    const double rho = std::sqrt(rho_sq);
    const double gamma =
        2.0 * std::sqrt(model.lambda_max_sq) * std::sqrt(static_cast<double>(n)) / lambda +
        (2.0 / std::sqrt(model.max_entry)) * rho * lambda /
            std::sqrt(static_cast<double>(n) * log2p);

    BoundReport out;
    out.label = "random-design-concentration";
    out.formula =
        "| ||X(bhat-beta0)||_2 - sqrt(n)||sigma0^{1/2}(beta*-beta0)||_2 | <= "
        "(gamma + slack) sqrt(n)||sigma0^{1/2}(beta*-beta0)||_2 + 4 sqrt(log 2)"
        " + sqrt(2x)";
    out.regime_ok = (model.lambda_max_sq / model.max_entry <= 0.5 * log2p) &&
                    (rho <= 0.5);

    const double bound = (gamma + cfg.slack) * bias + 4.0 * std::sqrt(kLog2) +
                         std::sqrt(2.0 * cfg.x);
    const double bias_term_sq = s0 * lambda * lambda / (n * base.value);
    const Rng rng_base(cfg.seed);
    long held = 0, within_half = 0, dominated = 0;
    for (int rep = 0; rep < cfg.replicates; ++rep) {
        Rng sub = rng_base.substream(static_cast<std::uint64_t>(rep));
        DesignMatrix X = sample_gaussian_design(model, n, sub);
        const Vector eps = draw_normal(sub, n);
        LassoProblem prob(X, X.X * beta0 + eps, lambda);
        LassoSolution sol = solve_lasso(prob, 1e-9);
        const double measured = (X.X * (sol.beta - beta0)).norm();
        const double dev = std::abs(measured - bias);
        const bool ok = dev <= bound;
        held += ok;
        within_half += dev <= 0.5 * bias;
        const double var_err_sq = (X.X * (sol.beta - pop.beta)).squaredNorm();
        dominated += bias_term_sq > var_err_sq;
        out.trials.push_back({rep, measured, bound, ok, lambda, base.value, 0.0});
    }
    out.nominal = 1.0 - 2.0 * std::exp(-cfg.x);
    out.slack = binomial_slack(out.nominal, cfg.replicates);
    out.coverage = static_cast<double>(held) / cfg.replicates;
    out.pass = !out.regime_ok || out.coverage >= out.nominal - out.slack;
    out.details["lambda"] = lambda;
    out.details["gamma"] = gamma;
    out.details["rho"] = rho;
    out.details["rho_exact"] = rho_exact ? 1.0 : 0.0;
    out.details["bias"] = bias;
    out.details["kappa_sq_S0"] = base.value;
    out.details["within_half_bias_fraction"] =
        static_cast<double>(within_half) / cfg.replicates;
    out.details["bias_dominance_fraction"] =
        static_cast<double>(dominated) / cfg.replicates;
    return out;
}

BoundReport empirical_vs_theoretical_kappa(const ExperimentConfig& cfg,
                                           const CovarianceModel& model,
                                           double u, double v) {
    validate_cfg(cfg);
    if (!(v > u && u > 0.0))
        throw ConfigError("empirical_vs_theoretical_kappa: need v > u > 0");
    const int p = model.p();
    const ActiveSet S = default_s0(cfg, p);
    CompatResult theo = kappa_theoretical_sq(model, CompatSpec::uniform(S, u, p), cfg.tol);

    const std::vector<double> etas = {0.1, 0.25, 0.5};
    std::vector<long> counts(etas.size(), 0);
    const Rng base(cfg.seed);
    for (int rep = 0; rep < cfg.replicates; ++rep) {
        Rng sub = base.substream(static_cast<std::uint64_t>(rep));
        DesignMatrix X = sample_gaussian_design(model, cfg.n, sub);
        CompatResult emp = kappa_hat_sq(X, CompatSpec::uniform(S, v, p), cfg.tol);
        for (size_t e = 0; e < etas.size(); ++e) {
            const double factor = (1.0 - etas[e]) * (1.0 - etas[e]);
            if (emp.value >= factor * theo.value) ++counts[e];
        }
    }

    BoundReport out;
    out.label = "empirical-vs-theoretical-kappa";
    out.formula = "kappa_hat^2(v,S) >= (1-eta)^2 kappa^2(u,S)";
    out.nominal = 0.0;
    out.slack = 0.0;
    out.pass = true;  // frequency curve is reported, not asserted
    const char* eta_keys[] = {"freq_eta_0.10", "freq_eta_0.25", "freq_eta_0.50"};
    for (size_t e = 0; e < etas.size(); ++e)
        out.details[eta_keys[e]] =
            static_cast<double>(counts[e]) / cfg.replicates;
    out.coverage = static_cast<double>(counts[1]) / cfg.replicates;
    out.details["kappa_theoretical_sq"] = theo.value;
    out.details["u"] = u;
    out.details["v"] = v;
    return out;
}

std::vector<BoundReport> probability_probes(const ProbeConfig& cfg) {
    std::vector<BoundReport> reports;
    const Rng base(cfg.seed);

    {  // max of p standard normals against sqrt(2(log(2p)+t))
        BoundReport r;
        r.label = "max-gauss-tail";
        r.formula = "P(max_j |Z_j| >= sqrt(2(log(2p)+t))) <= exp(-t)";
        const double cut = std::sqrt(2.0 * (std::log(2.0 * cfg.p) + cfg.t));
        long viol = 0;
        Rng rng = base.substream(1);
        for (long rep = 0; rep < cfg.replicates_gauss; ++rep) {
            double mx = 0.0;
            for (int j = 0; j < cfg.p; ++j) mx = std::max(mx, std::abs(rng.normal()));
            viol += mx >= cut;
        }
        r.nominal = std::min(1.0, std::exp(-cfg.t));
        r.slack = binomial_slack(r.nominal, cfg.replicates_gauss);
        r.coverage = static_cast<double>(viol) / cfg.replicates_gauss;
        r.pass = r.coverage <= r.nominal + r.slack;
        r.details["p"] = cfg.p;
        r.details["t"] = cfg.t;
        reports.push_back(std::move(r));
    }
    {  // chi-norm upper tail
        BoundReport r;
        r.label = "chi-norm-tail";
        r.formula = "P(||Z||_2 >= sqrt(T) + sqrt(2x)) <= exp(-x)";
        const double cut = std::sqrt(static_cast<double>(cfg.T)) + std::sqrt(2.0 * cfg.x);
        long viol = 0, viol_two = 0;
        Rng rng = base.substream(2);
        for (long rep = 0; rep < cfg.replicates_chi; ++rep) {
            double ss = 0.0;
            for (int j = 0; j < cfg.T; ++j) {
                const double z = rng.normal();
                ss += z * z;
            }
            const double norm = std::sqrt(ss);
            viol += norm >= cut;
            viol_two += std::abs(norm - std::sqrt(static_cast<double>(cfg.T))) >=
                        std::sqrt(2.0 * cfg.x);
        }
        r.nominal = std::min(1.0, std::exp(-cfg.x));
        r.slack = binomial_slack(r.nominal, cfg.replicates_chi);
        r.coverage = static_cast<double>(viol) / cfg.replicates_chi;
        r.pass = r.coverage <= r.nominal + r.slack;
        const double two_nominal = std::min(1.0, 2.0 * std::exp(-cfg.x));
        const double two_freq = static_cast<double>(viol_two) / cfg.replicates_chi;
        r.details["two_sided_freq"] = two_freq;
        r.details["two_sided_nominal"] = two_nominal;
        r.pass = r.pass && two_freq <= two_nominal +
                               binomial_slack(two_nominal, cfg.replicates_chi);
        r.details["T"] = cfg.T;
        r.details["x"] = cfg.x;
        reports.push_back(std::move(r));
    }
    {  // bivariate cross moment
        BoundReport r;
        r.label = "cross-moment-tail";
        r.formula =
            "P(|U^T V - n sigma_uv| > 3 sigma_u sigma_v (sqrt(2nt)+t)) <= 4 exp(-t)";
        const double cut = 3.0 * cfg.sigma_u * cfg.sigma_v *
                           (std::sqrt(2.0 * cfg.n_cross * cfg.t) + cfg.t);
        const double c21 = cfg.sigma_uv / cfg.sigma_u;
        const double c22 = std::sqrt(
            std::max(cfg.sigma_v * cfg.sigma_v - c21 * c21, 0.0));
        long viol = 0;
        Rng rng = base.substream(3);
        for (long rep = 0; rep < cfg.replicates_cross; ++rep) {
            double dot = 0.0;
            for (int i = 0; i < cfg.n_cross; ++i) {
                const double z1 = rng.normal();
                const double z2 = rng.normal();
                const double ui = cfg.sigma_u * z1;
                const double vi = c21 * z1 + c22 * z2;
                dot += ui * vi;
            }
            viol += std::abs(dot - cfg.n_cross * cfg.sigma_uv) > cut;
        }
        r.nominal = std::min(1.0, 4.0 * std::exp(-cfg.t));
        r.slack = binomial_slack(r.nominal, cfg.replicates_cross);
        r.coverage = static_cast<double>(viol) / cfg.replicates_cross;
        r.pass = r.coverage <= r.nominal + r.slack;
        r.details["n"] = cfg.n_cross;
        r.details["t"] = cfg.t;
        reports.push_back(std::move(r));
    }
    {  // quadratic form lower bound, reported per eta
        BoundReport r;
        r.label = "quadratic-form-lower";
        r.formula =
            "inf over ||b||_1 <= M ||sigma0^{1/2} b||_2 of ||Xb||^2/n / "
            "||sigma0^{1/2} b||^2 >= (1-eta)^2";
        const int p = cfg.p;
        const int n = 4 * p;
        const double M = 0.5 * std::sqrt(static_cast<double>(n) / std::log(2.0 * p));
        CovarianceModel model = CovarianceModel::identity(p);
        const std::vector<double> etas = {0.1, 0.25, 0.5};
        const char* eta_keys[] = {"freq_eta_0.10", "freq_eta_0.25", "freq_eta_0.50"};
        std::vector<long> counts(etas.size(), 0);
        Rng rng = base.substream(4);
        for (long rep = 0; rep < cfg.replicates_quad; ++rep) {
            DesignMatrix X = sample_gaussian_design(model, n, rng);
            double worst = std::numeric_limits<double>::infinity();
            for (int probe = 0; probe < 200; ++probe) {
                Vector b = Vector::Zero(p);
                const int nz = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
                for (int k = 0; k < nz; ++k)
                    b(static_cast<int>(rng.below(static_cast<std::uint64_t>(p)))) = rng.normal();
                const double pop = std::sqrt(b.dot(model.sigma0 * b));
                if (pop <= 0.0 || b.cwiseAbs().sum() > M * pop) continue;
                worst = std::min(worst,
                                 (X.X * b).squaredNorm() /
                                     (static_cast<double>(n) * pop * pop));
            }
            for (size_t e = 0; e < etas.size(); ++e)
                if (worst >= (1.0 - etas[e]) * (1.0 - etas[e])) ++counts[e];
        }
        for (size_t e = 0; e < etas.size(); ++e)
            r.details[eta_keys[e]] =
                static_cast<double>(counts[e]) / cfg.replicates_quad;
        r.details["report_only"] = 1.0;
        r.details["M"] = M;
        r.pass = true;
        r.nominal = 0.0;
        reports.push_back(std::move(r));
    }
    {  // concentration of the prediction norm about its conditional mean
        BoundReport r;
        r.label = "prediction-norm-concentration";
        r.formula = "P(| ||X(bhat-b)||_2 - m_b | >= sqrt(2x)) <= 2 exp(-x)";
        const int p = 4;
        const int n = 40;
        CovarianceModel model = CovarianceModel::identity(p);
        Rng rng = base.substream(5);
        DesignMatrix X = sample_gaussian_design(model, n, rng);
        Vector beta0 = Vector::Zero(p);
        beta0(0) = 1.0;
        const double lambda = 2.0 * std::sqrt(2.0 * n * std::log(2.0 * p));
        auto fit_norm = [&](Rng& r2) {
            const Vector eps = draw_normal(r2, n);
            LassoProblem prob(X, X.X * beta0 + eps, lambda);
            LassoSolution sol = solve_lasso(prob, 1e-8);
            return (X.X * (sol.beta - beta0)).norm();
        };
        // nested estimate of the conditional mean; labeled approximate
        double mean = 0.0;
        const long inner = std::max(200L, cfg.replicates_conc / 4);
        for (long rep = 0; rep < inner; ++rep) {
            Rng sub = rng.substream(static_cast<std::uint64_t>(rep) + 1000000);
            mean += fit_norm(sub);
        }
        mean /= static_cast<double>(inner);
        long viol = 0;
        for (long rep = 0; rep < cfg.replicates_conc; ++rep) {
            Rng sub = rng.substream(static_cast<std::uint64_t>(rep));
            viol += std::abs(fit_norm(sub) - mean) >= std::sqrt(2.0 * cfg.x);
        }
        r.nominal = std::min(1.0, 2.0 * std::exp(-cfg.x));
        r.slack = binomial_slack(r.nominal, cfg.replicates_conc);
        r.coverage = static_cast<double>(viol) / cfg.replicates_conc;
        r.details["report_only"] = 1.0;
        r.details["approximate_mean"] = mean;
        r.pass = true;
        reports.push_back(std::move(r));
    }
    return reports;
}

}  // namespace lassobounds
