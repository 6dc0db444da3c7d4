// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Tolerances are fixed here, not configurable.

#include "lassobounds/bounds.hpp"
#include "lassobounds/compat.hpp"
#include "lassobounds/core.hpp"
#include "lassobounds/serialize.hpp"
#include "lassobounds/tv.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#ifndef LASSOBOUNDS_CLI_PATH
#define LASSOBOUNDS_CLI_PATH "lassobounds"
#endif
#ifndef LASSOBOUNDS_CONFIG_DIR
#define LASSOBOUNDS_CONFIG_DIR "configs"
#endif

using namespace lassobounds;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string note;
};

DesignMatrix random_design(int n, int p, Rng& rng) {
    Matrix X(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    return DesignMatrix(std::move(X));
}

ActiveSet random_subset(int p, int size, Rng& rng) {
    std::vector<int> idx;
    while (static_cast<int>(idx.size()) < size) {
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
        if (std::find(idx.begin(), idx.end(), j) == idx.end()) idx.push_back(j);
    }
    return ActiveSet(std::move(idx));
}

// 1. exact noiseless identity on 50 random designs
Outcome criterion_noiseless_identity() {
    Outcome out;
    Rng rng(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int p = 3 + static_cast<int>(rng.below(8));           // <= 10
        const int n = p + 4 + static_cast<int>(rng.below(static_cast<std::uint64_t>(37 - p)));  // <= 40
        const int s0 = 1 + static_cast<int>(rng.below(3));
        DesignMatrix X = random_design(n, p, rng);
        ActiveSet S0 = random_subset(p, std::min(s0, p - 1), rng);
        const double lambda_star = 0.5 + 2.5 * rng.uniform();
        Vector beta0 = construct_betamin_beta0(X, S0, lambda_star, 2.0);
        NoiselessIdentity id = verify_noiseless_identity(X, beta0, lambda_star);
        worst = std::max(worst, id.rel_err);
        if (id.rel_err > 1e-6) {
            out.pass = false;
            out.note = "rel_err " + format_double(id.rel_err) + " at trial " +
                       std::to_string(trial);
            return out;
        }
    }
    out.note = "50 instances, worst rel_err " + format_double(worst);
    return out;
}

// every distance layout of length s+1 summing to n with even interiors
void enumerate_layouts(int n, int s, std::vector<TvInstance>& out) {
    std::vector<int> d(static_cast<size_t>(s) + 1);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        const int remaining = s + 1 - pos;
        if (remaining == 1) {
            if (left >= 1) {
                d[static_cast<size_t>(pos)] = left;
                out.emplace_back(n, d);
            }
            return;
        }
        const bool interior = pos >= 1 && pos + 1 < s + 1;
        const int step = interior ? 2 : 1;
        for (int v = interior ? 2 : 1; v <= left - (remaining - 1); v += step) {
            d[static_cast<size_t>(pos)] = v;
            rec(pos + 1, left - v);
        }
    };
    rec(0, n);
}

// 2. closed-form constant equals the enumeration engine
Outcome criterion_tv_closed_form() {
    Outcome out;
    std::vector<TvInstance> instances = {TvInstance(4, {2, 2}),
                                         TvInstance(12, {4, 4, 4})};
    // exhaustive for the two small sizes, representative above
    for (int n : {8, 16})
        for (int s : {1, 2, 3}) enumerate_layouts(n, s, instances);
    for (const TvInstance& inst :
         {TvInstance(32, {16, 16}), TvInstance(32, {10, 22}),
          TvInstance(32, {10, 12, 10}), TvInstance(32, {6, 20, 6}),
          TvInstance(32, {8, 8, 8, 8}), TvInstance(32, {5, 10, 12, 5}),
          TvInstance(32, {1, 14, 16, 1}), TvInstance(64, {32, 32}),
          TvInstance(64, {20, 44}), TvInstance(64, {21, 22, 21}),
          TvInstance(64, {10, 40, 14}), TvInstance(64, {16, 16, 16, 16}),
          TvInstance(64, {11, 20, 22, 11}), TvInstance(64, {2, 30, 30, 2})})
        instances.push_back(inst);
    double worst = 0.0;
    for (const TvInstance& inst : instances) {
        CompatSpec spec;
        spec.S = inst.jump_set();
        spec.free = ActiveSet({0});
        CompatResult res = kappa_hat_sq(tv_design(inst.n), spec);
        const double closed = tv_kappa_closed_form(inst);
        const double rel = std::abs(res.value - closed) / closed;
        worst = std::max(worst, rel);
        if (rel > 1e-6) {
            out.pass = false;
            std::ostringstream msg;
            msg << "n=" << inst.n << " s=" << inst.s() << ": engine "
                << format_double(res.value) << " vs closed form "
                << format_double(closed);
            out.note = msg.str();
            return out;
        }
    }
    // the two worked values
    if (std::abs(tv_kappa_closed_form(TvInstance(8, {4, 4})) - 0.5) > 1e-15 ||
        std::abs(tv_kappa_closed_form(TvInstance(12, {4, 4, 4})) - 1.0 / 6.0) >
            1e-15) {
        out.pass = false;
        out.note = "worked closed-form values off";
        return out;
    }
    out.note = std::to_string(instances.size()) +
               " instances, worst relative gap " + format_double(worst);
    return out;
}

// 3. exact shrinkage identity for piecewise-constant signals
Outcome criterion_tv_noiseless_error() {
    Outcome out;
    Vector f8(8);
    for (int i = 0; i < 8; ++i) f8(i) = i >= 4 ? 10.0 : 0.0;
    TvNoiselessError e8 = tv_noiseless_error(f8, 1.0);
    Vector f12(12);
    for (int i = 0; i < 12; ++i) f12(i) = (i >= 4 && i < 8) ? 10.0 : 0.0;
    TvNoiselessError e12 = tv_noiseless_error(f12, 1.0);
    const bool ok = e8.rel_err <= 1e-6 && e12.rel_err <= 1e-6 &&
                    std::abs(e8.predicted - 0.5) < 1e-12 &&
                    std::abs(e12.predicted - 1.5) < 1e-12;
    out.pass = ok;
    out.note = "rel_err " + format_double(e8.rel_err) + " (n=8), " +
               format_double(e12.rel_err) + " (n=12)";
    return out;
}

// 4. kappa >= phi and monotonicity in the weights, 200 randomized instances
Outcome criterion_phi_and_monotonicity() {
    Outcome out;
    Rng rng(4004);
    const double us[] = {0.5, 1.0, 2.0};
    for (int trial = 0; trial < 200; ++trial) {
        const int p = 2 + static_cast<int>(rng.below(5));  // <= 6
        const int n = p + 2 + static_cast<int>(rng.below(6));
        DesignMatrix X = random_design(n, p, rng);
        ActiveSet S = random_subset(p, 1 + static_cast<int>(rng.below(
                                           static_cast<std::uint64_t>(
                                               std::min(3, p)))),
                                    rng);
        const double u = us[trial % 3];
        const double phi = phi_hat_sq(X, S, u);
        CompatResult kap = kappa_hat_sq(X, CompatSpec::uniform(S, u, p));
        if (kap.value < phi - 1e-8) {
            out.pass = false;
            out.note = "kappa < phi at trial " + std::to_string(trial);
            return out;
        }
        const double vbar = 0.1 + 0.8 * rng.uniform();
        const double lo = kappa_hat_sq(X, CompatSpec::uniform(S, 1.0 - vbar, p)).value;
        const double mid = kappa_hat_sq(X, CompatSpec::uniform(S, 1.0, p)).value;
        const double hi = kappa_hat_sq(X, CompatSpec::uniform(S, 1.0 + vbar, p)).value;
        if (lo > mid + 1e-8 || mid > hi + 1e-8) {
            out.pass = false;
            out.note = "weight monotonicity violated at trial " + std::to_string(trial);
            return out;
        }
    }
    out.note = "200 instances";
    return out;
}

// 5. weighted total-variation sandwich
Outcome criterion_weighted_tv() {
    Outcome out;
    Rng rng(5005);
    const std::vector<TvInstance> instances = {
        TvInstance(12, {4, 4, 4}), TvInstance(16, {8, 8}),
        TvInstance(20, {6, 8, 6}), TvInstance(24, {8, 4, 6, 6})};
    for (const TvInstance& inst : instances) {
        WeightedKappaBound unit = weighted_kappa_bound(inst, Vector::Ones(inst.n));
        if (std::abs(unit.lhs - unit.rhs) > 1e-8) {
            out.pass = false;
            out.note = "unit-weight equality off by " +
                       format_double(std::abs(unit.lhs - unit.rhs));
            return out;
        }
        for (int trial = 0; trial < 25; ++trial) {
            Vector w(inst.n);
            double level = 0.4 + 1.2 * rng.uniform();
            for (int i = 0; i < inst.n; ++i) {
                level = std::clamp(level + 0.25 * rng.uniform(-1.0, 1.0), 0.1, 3.0);
                w(i) = level;
            }
            WeightedKappaBound r = weighted_kappa_bound(inst, w);
            if (r.lhs > r.rhs + 1e-6) {
                out.pass = false;
                out.note = "sandwich violated: lhs " + format_double(r.lhs) +
                           " rhs " + format_double(r.rhs);
                return out;
            }
        }
    }
    out.note = "100 weight sequences over 4 instances, equality at unit weights";
    return out;
}

// 6. exact engine vs random-search oracle
Outcome criterion_oracle_agreement() {
    Outcome out;
    Rng rng(6006);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int p = 2 + static_cast<int>(rng.below(3));  // <= 4
        const int n = p + 2 + static_cast<int>(rng.below(7));
        DesignMatrix X = random_design(n, p, rng);
        ActiveSet S = random_subset(p, 1 + static_cast<int>(rng.below(2)), rng);
        CompatSpec spec = CompatSpec::uniform(S, 1.0, p);
        CompatResult exact = kappa_hat_sq(X, spec);
        Rng oracle_rng = rng.substream(static_cast<std::uint64_t>(trial));
        const double oracle = brute_force_compat(X, spec, 1000000, oracle_rng);
        const double rel =
            std::abs(oracle - exact.value) / std::max(exact.value, 1e-12);
        worst = std::max(worst, rel);
        if (oracle < exact.value - 1e-9 || rel > 1e-3) {
            out.pass = false;
            out.note = "oracle " + format_double(oracle) + " vs engine " +
                       format_double(exact.value) + " at trial " +
                       std::to_string(trial);
            return out;
        }
    }
    out.note = "20 instances, worst relative gap " + format_double(worst);
    return out;
}

// 7. noisy lower/upper coverage and their conjunction
Outcome criterion_noisy_coverage() {
    Outcome out;
    DesignMatrix X = tv_design(32);
    ExperimentConfig cfg;
    cfg.S0_override = ActiveSet({16});
    cfg.t = 2.0;
    cfg.x = 2.0;
    cfg.lambda_multiplier = 1.01;
    cfg.replicates = 1000;
    cfg.seed = 20240601;
    NoisyBoundsReport rep = noisy_bounds_experiment(cfg, X);
    const double floor = rep.lower.nominal - rep.lower.slack;
    out.pass = rep.lower.coverage >= floor && rep.upper.coverage >= floor &&
               rep.coverage_both >= floor;
    std::ostringstream msg;
    msg << "coverage lower " << rep.lower.coverage << ", upper "
        << rep.upper.coverage << ", both " << rep.coverage_both
        << " vs floor " << format_double(floor);
    out.note = msg.str();
    return out;
}

// 8. probability tail probes
Outcome criterion_probability_probes() {
    Outcome out;
    for (double t : {1.0, 3.0}) {
        ProbeConfig cfg;
        cfg.replicates_gauss = 100000;
        cfg.replicates_chi = 100000;
        cfg.replicates_cross = 10000;
        cfg.replicates_quad = 10;
        cfg.replicates_conc = 100;
        cfg.t = t;
        cfg.x = 2.0;
        cfg.seed = 8008;
        std::vector<BoundReport> reports = probability_probes(cfg);
        for (int k = 0; k < 3; ++k) {
            if (!reports[static_cast<size_t>(k)].pass) {
                out.pass = false;
                out.note = reports[static_cast<size_t>(k)].label +
                           " exceeded its bound at t=" + format_double(t);
                return out;
            }
        }
    }
    out.note = "gauss-max/chi-norm at 1e5, cross-moment at 1e4, t in {1,3}";
    return out;
}

// 9. random-design concentration around the population bias
Outcome criterion_random_design() {
    Outcome out;
    CovarianceModel model = CovarianceModel::identity(4);
    ExperimentConfig cfg;
    cfg.n = 200;
    cfg.s0 = 1;
    cfg.t = 2.0;
    cfg.x = 2.0;
    cfg.margin = 2.0;
    cfg.lambda_multiplier = 1.0;
    cfg.replicates = 200;
    cfg.seed = 9009;
    BoundReport rep = random_design_experiment(cfg, model);
    const double frac = rep.details.at("within_half_bias_fraction");
    out.pass = rep.regime_ok && frac >= 0.9;
    out.note = "deviation within half the bias in " + format_double(frac) +
               " of replicates; bias dominance " +
               format_double(rep.details.at("bias_dominance_fraction"));
    return out;
}

// 10. CLI determinism: same seed, byte-identical outputs
Outcome criterion_cli_determinism() {
    Outcome out;
    const fs::path base = fs::temp_directory_path() / "lb_acceptance_cli";
    fs::remove_all(base);
    fs::create_directories(base);
    const fs::path design = base / "design.csv";
    {
        std::ofstream f(design);
        const std::string r3 = format_double(std::sqrt(3.0));
        f << r3 << ",0,0\n0," << r3 << ",0\n0,0," << r3 << "\n";
    }
    const fs::path beta0 = base / "beta0.csv";
    {
        std::ofstream f(beta0);
        f << "2\n0\n0\n";
    }
    const std::string cli = LASSOBOUNDS_CLI_PATH;
    const std::string cfgdir = LASSOBOUNDS_CONFIG_DIR;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"compat", "compat --tv n=8 d=4,4 --seed 3"},
        {"tv", "tv --n 12 --d 4,4,4 --seed 3"},
        {"noiseless", "noiseless --design " + design.string() + " --beta0 " +
                          beta0.string() + " --lambda-star 3 --seed 3"},
        {"experiment", "experiment --config " + cfgdir +
                           "/tv_both.toml --replicates 50 --seed 33"},
        {"probe", "probe --replicates 3000 --seed 9"},
    };
    for (const auto& [name, args] : commands) {
        const fs::path d1 = base / (name + "_1");
        const fs::path d2 = base / (name + "_2");
        for (const fs::path& d : {d1, d2}) {
            const std::string cmd =
                cli + " " + args + " --out " + d.string() + " >/dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0) {
                out.pass = false;
                out.note = name + " invocation failed";
                return out;
            }
        }
        for (const auto& entry : fs::directory_iterator(d1)) {
            const fs::path other = d2 / entry.path().filename();
            std::ifstream a(entry.path(), std::ios::binary);
            std::ifstream b(other, std::ios::binary);
            std::stringstream sa, sb;
            sa << a.rdbuf();
            sb << b.rdbuf();
            if (!fs::exists(other) || sa.str() != sb.str()) {
                out.pass = false;
                out.note = name + ": " + entry.path().filename().string() +
                           " differs between identical runs";
                return out;
            }
        }
    }
    fs::remove_all(base);
    out.note = "5 commands, all outputs byte-identical across reruns";
    return out;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<Outcome()> run;
        double limit_seconds;
    };
    const std::vector<Entry> entries = {
        {1, "noiseless-identity", criterion_noiseless_identity, 60.0},
        {2, "tv-closed-form", criterion_tv_closed_form, 120.0},
        {3, "tv-shrinkage-equality", criterion_tv_noiseless_error, 0.0},
        {4, "phi-bound-and-weight-monotonicity", criterion_phi_and_monotonicity, 0.0},
        {5, "weighted-tv-sandwich", criterion_weighted_tv, 0.0},
        {6, "oracle-agreement", criterion_oracle_agreement, 0.0},
        {7, "noisy-bound-coverage", criterion_noisy_coverage, 300.0},
        {8, "probability-probes", criterion_probability_probes, 0.0},
        {9, "random-design-bias-dominance", criterion_random_design, 0.0},
        {10, "cli-determinism", criterion_cli_determinism, 0.0},
    };
    int failures = 0;
    for (const Entry& e : entries) {
        const auto start = std::chrono::steady_clock::now();
        Outcome oc;
        try {
            oc = e.run();
        } catch (const std::exception& ex) {
            oc.pass = false;
            oc.note = std::string("exception: ") + ex.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        if (e.limit_seconds > 0.0 && secs > e.limit_seconds) {
            oc.pass = false;
            oc.note += " [exceeded " + format_double(e.limit_seconds) + "s budget]";
        }
        std::printf("[%s] %2d %-36s (%.2fs) %s\n", oc.pass ? "PASS" : "FAIL",
                    e.id, e.name, secs, oc.note.c_str());
        if (!oc.pass) ++failures;
    }
    if (failures == 0) std::printf("all %zu criteria passed\n", entries.size());
    else std::printf("%d criteria FAILED\n", failures);
    return failures;
}
