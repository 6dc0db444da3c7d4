#pragma once

#include "lassobounds/compat.hpp"
#include "lassobounds/core.hpp"
#include "lassobounds/lasso.hpp"
#include "lassobounds/projections.hpp"
#include "lassobounds/rng.hpp"
#include "lassobounds/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lassobounds {

struct BetaminReport {
    ActiveSet S0;
    std::map<int, double> thresholds;  // coordinate -> required magnitude
    std::map<int, int> signs;          // coordinate -> required sign
    bool satisfied = false;
    bool signs_match = false;
    double margin = 0.0;  // min_j |beta0_j| - threshold_j
    double kappa_sq = 0.0;
};

/// Fixed-design betamin check: thresholds |b*_j| s0 lambda* / (n kappa^2(S0))
/// with signs from the compatibility minimizer. The global sign of b* is
/// chosen to match beta0 where possible (the minimizer is only defined up to
/// a flip).
BetaminReport betamin_noiseless(const DesignMatrix& X, const Vector& beta0,
                                double lambda_star, double tol = 1e-10);

/// Population version, driven by the theoretical compatibility engine.
BetaminReport betamin_population(const CovarianceModel& model,
                                 const Vector& beta0, double lambda, int n,
                                 double tol = 1e-10);

/// beta0 with |beta0_j| = margin * threshold_j and the required signs on S0;
/// margin must exceed 1.
Vector construct_betamin_beta0(const DesignMatrix& X, const ActiveSet& S0,
                               double lambda_star, double margin,
                               double tol = 1e-10);

struct NoiselessIdentity {
    double lhs = 0.0;   // ||X(beta* - beta0)||_2^2
    double rhs = 0.0;   // s0 lambda*^2 / (n kappa^2(S0))
    double rel_err = 0.0;
    double kappa_sq = 0.0;
    int s0 = 0;
};

/// The exact identity for the noiseless solution under betamin; throws
/// BetaminViolated (carrying the report) when the hypothesis fails.
NoiselessIdentity verify_noiseless_identity(const DesignMatrix& X,
                                            const Vector& beta0,
                                            double lambda_star,
                                            double tol = 1e-10);

// ---------------------------------------------------------------------------
// Monte-Carlo experiments
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    int n = 32;
    int s0 = 1;
    double t = 2.0;
    double x = 2.0;
    double lambda_multiplier = 1.01;  // times the minimal admissible lambda
    double lambda_star_ratio = 0.0;   // variance experiment: lambda* / lambda
    double margin = 1.5;              // betamin construction margin
    double slack = 0.1;               // o(1) stand-in for the random-design bound
    int replicates = 1000;
    std::uint64_t seed = 1;
    double tol = 1e-10;               // engine tolerance for the setup solves
    int box_corner_cap = 12;          // weight-box corners: 2^min(cap, |C|)
    int box_random_draws = 256;
    std::optional<ActiveSet> S0_override;
};

struct TrialRecord {
    int replicate = 0;
    double measured = 0.0;  // the norm the bound speaks about
    double bound = 0.0;
    bool held = false;
    double lambda = 0.0;
    double kappa_sq = 0.0;
    double U = 0.0;  // ||P_{S0} eps||_2
};

struct BoundReport {
    std::string label;
    std::string formula;
    double coverage = 0.0;
    double nominal = 0.0;
    double slack = 0.0;  // 3 binomial standard errors at the nominal level
    bool pass = false;
    bool regime_ok = true;
    std::vector<TrialRecord> trials;
    std::map<std::string, double> details;
};

/// Shared fixed-design machinery: projection scales, the tuning parameter
/// from the noise-level rule, the weighted compatibility constants, and a
/// beta0 built to clear the (inflated) weight-box betamin thresholds.
struct NoisySetup {
    ActiveSet S0;
    double lambda = 0.0;
    double factor = 0.0;  // sqrt(2 (log(2p) + t))
    Vector v;             // over complement of S0
    Vector vbar;
    Vector u;             // over S0
    Vector ubar;
    double kappa_lower_sq = 0.0;  // weights 1 + vbar
    double kappa_upper_sq = 0.0;  // weights 1 - vbar
    std::vector<int> zstar;       // signs of the 1+vbar minimizer on S0
    Vector bbox;                  // over S0: max |b_j(w)| / ||X b(w)||^2 over the box
    Vector beta0;
    int box_evaluations = 0;
};

NoisySetup prepare_noisy_setup(const ExperimentConfig& cfg,
                               const DesignMatrix& X, double tol = 1e-10);

BoundReport noisy_lower_experiment(const ExperimentConfig& cfg,
                                   const DesignMatrix& X);
BoundReport noisy_upper_experiment(const ExperimentConfig& cfg,
                                   const DesignMatrix& X);

struct NoisyBoundsReport {
    BoundReport lower;
    BoundReport upper;
    double coverage_both = 0.0;
    bool pass_both = false;
};

/// Lower and upper checks coupled on one eps stream per replicate, plus the
/// coverage of their conjunction.
NoisyBoundsReport noisy_bounds_experiment(const ExperimentConfig& cfg,
                                          const DesignMatrix& X);

/// Compares the noisy solution against the noiseless one at lambda* =
/// ratio * lambda through the weighted constant built from the noiseless
/// subgradient. Throws HypothesisFailed when the subgradient strictness
/// fails.
BoundReport variance_bound_experiment(const ExperimentConfig& cfg,
                                      const DesignMatrix& X);

/// Gaussian-design concentration of the prediction error around the
/// population bias, with the rho constant enumerated exactly for p <= 8.
BoundReport random_design_experiment(const ExperimentConfig& cfg,
                                     const CovarianceModel& model);

/// Frequency of kappa_hat^2(v,S) >= (1-eta)^2 kappa^2(u,S) over sampled
/// designs, reported for eta in {0.1, 0.25, 0.5}.
BoundReport empirical_vs_theoretical_kappa(const ExperimentConfig& cfg,
                                           const CovarianceModel& model,
                                           double u, double v);

struct ProbeConfig {
    long replicates_gauss = 100000;
    long replicates_chi = 100000;
    long replicates_cross = 10000;
    long replicates_quad = 200;
    long replicates_conc = 2000;
    int p = 8;
    int T = 4;
    int n_cross = 100;
    double t = 1.0;
    double x = 2.0;
    double sigma_u = 1.0;
    double sigma_v = 1.0;
    double sigma_uv = 0.0;
    std::uint64_t seed = 1;
};

/// Tail probes for the probability toolbox: asserted bounds for the Gaussian
/// max, the chi norm and the cross-moment; report-only probes for the
/// quadratic-form lower bound and the conditional-mean concentration.
std::vector<BoundReport> probability_probes(const ProbeConfig& cfg);

double binomial_slack(double nominal, long replicates);

}  // namespace lassobounds
