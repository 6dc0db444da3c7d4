#include "lassobounds/bounds.hpp"
#include "lassobounds/compat.hpp"
#include "lassobounds/core.hpp"
#include "lassobounds/serialize.hpp"
#include "lassobounds/tv.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace lb = lassobounds;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string out = ".";
    std::uint64_t seed = 1;
    double tol = 1e-10;
    long replicates = -1;  // -1 = keep config value
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--out", opts.out, "output directory");
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_option("--tol", opts.tol, "solver tolerance");
    cmd->add_option("--replicates", opts.replicates, "replicate count override");
}

std::string out_path(const CommonOpts& opts, const std::string& name) {
    fs::create_directories(opts.out);
    return (fs::path(opts.out) / name).string();
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    return out;
}

// --tv tokens of the form n=8 d=4,4
lb::TvInstance parse_tv_tokens(const std::vector<std::string>& tokens) {
    int n = -1;
    std::vector<int> d;
    for (const std::string& t : tokens) {
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw lb::ConfigError("--tv expects n=<int> d=<int,int,...>");
        const std::string key = t.substr(0, eq);
        const std::string val = t.substr(eq + 1);
        if (key == "n") n = std::stoi(val);
        else if (key == "d") d = parse_int_list(val);
        else throw lb::ConfigError("--tv: unknown key '" + key + "'");
    }
    if (n < 2 || d.empty()) throw lb::ConfigError("--tv needs both n= and d=");
    return lb::TvInstance(n, d);
}

lb::CompatSpec spec_from_json(const std::string& path, int p) {
    std::ifstream in(path);
    if (!in) throw lb::ConfigError("cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw lb::ConfigError(path + ": " + e.what());
    }
    lb::CompatSpec spec;
    if (!j.contains("S")) throw lb::ConfigError(path + ": missing key S");
    spec.S = lb::ActiveSet::from_one_based(j["S"].get<std::vector<int>>());
    if (j.contains("free"))
        spec.free = lb::ActiveSet::from_one_based(j["free"].get<std::vector<int>>());
    const int csize = p - spec.S.size() - spec.free.size();
    if (j.contains("weights")) {
        if (j["weights"].is_number()) {
            spec.weights = lb::Vector::Constant(csize, j["weights"].get<double>());
        } else {
            const auto w = j["weights"].get<std::vector<double>>();
            spec.weights = Eigen::Map<const lb::Vector>(w.data(),
                                                        static_cast<int>(w.size()));
        }
    } else if (j.contains("u")) {
        spec.weights = lb::Vector::Constant(csize, j["u"].get<double>());
    }
    if (j.contains("active_weights")) {
        const auto w = j["active_weights"].get<std::vector<double>>();
        spec.active_weights =
            Eigen::Map<const lb::Vector>(w.data(), static_cast<int>(w.size()));
    }
    if (j.contains("kind"))
        spec.kind = j["kind"].get<std::string>() == "theoretical"
                        ? lb::MatrixKind::theoretical
                        : lb::MatrixKind::empirical;
    return spec;
}

// ---------------------------------------------------------------------------
// compat
// ---------------------------------------------------------------------------

struct CompatArgs {
    CommonOpts common;
    std::string design_csv;
    std::string spec_json;
    std::vector<std::string> tv_tokens;
};

void cmd_compat(const CompatArgs& args) {
    lb::CompatResult res;
    if (!args.tv_tokens.empty()) {
        lb::TvInstance inst = parse_tv_tokens(args.tv_tokens);
        lb::CompatSpec spec;
        spec.S = inst.jump_set();
        spec.free = lb::ActiveSet({0});
        res = lb::kappa_hat_sq(lb::tv_design(inst.n), spec, args.common.tol);
    } else {
        if (args.design_csv.empty())
            throw lb::ConfigError("compat: need --design or --tv");
        lb::Matrix M = lb::read_csv_matrix(args.design_csv);
        if (args.spec_json.empty())
            throw lb::ConfigError("compat: need --spec with --design");
        lb::CompatSpec spec = spec_from_json(args.spec_json, static_cast<int>(M.cols()));
        if (spec.kind == lb::MatrixKind::theoretical) {
            res = lb::kappa_theoretical_sq(lb::CovarianceModel::from_sigma(M), spec,
                                           args.common.tol);
        } else {
            res = lb::kappa_hat_sq(lb::DesignMatrix(M), spec, args.common.tol);
        }
    }
    lb::write_text_atomic(out_path(args.common, "result.json"),
                          lb::to_json(res).dump());
}

// ---------------------------------------------------------------------------
// tv
// ---------------------------------------------------------------------------

struct TvArgs {
    CommonOpts common;
    int n = 0;
    std::string d_csv;
    std::string signal_csv;
    double lambda = -1.0;  // < 0: use the sqrt(n log n) default
};

void cmd_tv(const TvArgs& args) {
    lb::TvInstance inst(args.n, parse_int_list(args.d_csv));
    lb::CompatSpec spec;
    spec.S = inst.jump_set();
    spec.free = lb::ActiveSet({0});
    lb::CompatResult engine =
        lb::kappa_hat_sq(lb::tv_design(inst.n), spec, args.common.tol);
    lb::VdiagLogCheck vd = lb::tv_vdiag_log_check(inst);

    lb::JsonValue out = lb::JsonValue::object();
    out.set("n", inst.n);
    lb::JsonValue dd = lb::JsonValue::array();
    for (int x : inst.d) dd.push(x);
    out.set("d", std::move(dd));
    lb::JsonValue jumps = lb::JsonValue::array();
    for (int j : inst.jump_locations()) jumps.push(j + 1);
    out.set("jumps", std::move(jumps));
    out.set("kappa_closed_form", lb::tv_kappa_closed_form(inst));
    out.set("kappa_engine", lb::to_json(engine));
    out.set("bstar", lb::JsonValue::array_of(lb::tv_bstar(inst)));
    lb::JsonValue vdj = lb::JsonValue::object();
    vdj.set("ratio_sum", vd.ratio_sum);
    vdj.set("bound", vd.bound);
    out.set("vdiag_check", std::move(vdj));

    if (!args.signal_csv.empty()) {
        lb::Vector y = lb::read_csv_vector(args.signal_csv);
        const double lambda =
            args.lambda >= 0.0
                ? args.lambda
                : std::sqrt(static_cast<double>(y.size()) *
                            std::log(static_cast<double>(y.size())));
        lb::LassoSolution sol;
        lb::TvSignal fit = lb::tv_denoise(y, lambda, args.common.tol, 200000, &sol);
        lb::write_csv_vector(out_path(args.common, "fhat.csv"), fit.f);
        lb::write_text_atomic(
            out_path(args.common, "solution.json"),
            lb::to_json(sol, static_cast<int>(y.size()),
                        static_cast<int>(y.size()), lambda)
                .dump());
        lb::JsonValue den = lb::JsonValue::object();
        den.set("lambda", lambda);
        den.set("tv", fit.tv);
        den.set("rss", (y - fit.f).squaredNorm());
        out.set("denoise", std::move(den));
    }
    lb::write_text_atomic(out_path(args.common, "tv.json"), out.dump());
}

// ---------------------------------------------------------------------------
// noiseless
// ---------------------------------------------------------------------------

struct NoiselessArgs {
    CommonOpts common;
    std::string design_csv;
    std::string beta0_csv;
    double lambda_star = 0.0;
};

void cmd_noiseless(const NoiselessArgs& args) {
    lb::DesignMatrix X(lb::read_csv_matrix(args.design_csv));
    lb::Vector beta0 = lb::read_csv_vector(args.beta0_csv);
    if (beta0.size() != X.p())
        throw lb::ConfigError("noiseless: beta0 length does not match the design");
    try {
        lb::NoiselessIdentity id =
            lb::verify_noiseless_identity(X, beta0, args.lambda_star, args.common.tol);
        lb::write_text_atomic(out_path(args.common, "identity.json"),
                              lb::to_json(id, args.lambda_star).dump());
    } catch (const lb::BetaminViolated& e) {
        if (e.report)
            lb::write_text_atomic(out_path(args.common, "betamin.json"),
                                  lb::to_json(*e.report).dump());
        throw;
    }
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

struct ExperimentArgs {
    CommonOpts common;
    std::string config_path;
    bool seed_given = false;
    bool tol_given = false;
};

lb::JsonValue config_echo(const lb::FlatConfig& cfg) {
    lb::JsonValue out = lb::JsonValue::object();
    for (const auto& [key, value] : cfg.entries()) {
        if (auto* b = std::get_if<bool>(&value.v)) out.set(key, *b);
        else if (auto* d = std::get_if<double>(&value.v)) out.set(key, *d);
        else if (auto* s = std::get_if<std::string>(&value.v)) out.set(key, *s);
        else if (auto* a = std::get_if<std::vector<double>>(&value.v)) {
            lb::JsonValue arr = lb::JsonValue::array();
            for (double x : *a) arr.push(x);
            out.set(key, std::move(arr));
        } else if (auto* sa = std::get_if<std::vector<std::string>>(&value.v)) {
            lb::JsonValue arr = lb::JsonValue::array();
            for (const std::string& x : *sa) arr.push(x);
            out.set(key, std::move(arr));
        }
    }
    return out;
}

struct BuiltDesign {
    lb::DesignMatrix X;
    std::optional<lb::ActiveSet> S0;
};

BuiltDesign build_design(const lb::FlatConfig& cfg) {
    const std::string type = cfg.get_string("design.type", "tv");
    BuiltDesign out;
    if (type == "tv") {
        const int n = static_cast<int>(cfg.get_long("design.n", 32));
        std::vector<int> d;
        for (double x : cfg.get_doubles("design.d")) d.push_back(static_cast<int>(x));
        if (d.empty()) d = {n / 2, n - n / 2};
        lb::TvInstance inst(n, d);
        out.X = lb::tv_design(n);
        out.S0 = inst.jump_set();
    } else if (type == "identity") {
        const int n = static_cast<int>(cfg.get_long("design.n", 16));
        out.X = lb::DesignMatrix(
            lb::Matrix(std::sqrt(static_cast<double>(n)) *
                       lb::Matrix::Identity(n, n)));
    } else if (type == "csv") {
        out.X = lb::DesignMatrix(
            lb::read_csv_matrix(cfg.at("design.path").as_string()));
    } else {
        throw lb::ConfigError("unknown design.type '" + type + "'");
    }
    if (cfg.has("design.S0")) {
        std::vector<int> s0;
        for (double x : cfg.get_doubles("design.S0"))
            s0.push_back(static_cast<int>(x));
        out.S0 = lb::ActiveSet::from_one_based(s0);
    }
    return out;
}

lb::CovarianceModel build_model(const lb::FlatConfig& cfg) {
    const std::string type = cfg.get_string("model.type", "identity");
    if (type == "identity") {
        return lb::CovarianceModel::identity(
            static_cast<int>(cfg.get_long("model.p", 4)));
    }
    if (type == "csv")
        return lb::CovarianceModel::from_sigma(
            lb::read_csv_matrix(cfg.at("model.path").as_string()));
    throw lb::ConfigError("unknown model.type '" + type + "'");
}

lb::ExperimentConfig experiment_config(const lb::FlatConfig& cfg,
                                       const ExperimentArgs& args) {
    lb::ExperimentConfig ec;
    ec.n = static_cast<int>(cfg.get_long("params.n", cfg.get_long("design.n", 32)));
    ec.s0 = static_cast<int>(cfg.get_long("params.s0", 1));
    ec.t = cfg.get_double("params.t", 2.0);
    ec.x = cfg.get_double("params.x", 2.0);
    ec.lambda_multiplier = cfg.get_double("params.lambda_multiplier", 1.01);
    ec.lambda_star_ratio = cfg.get_double("params.lambda_star_ratio", 0.0);
    ec.margin = cfg.get_double("params.margin", 1.5);
    ec.slack = cfg.get_double("params.slack", 0.1);
    ec.replicates = static_cast<int>(cfg.get_long("params.replicates", 1000));
    ec.seed = static_cast<std::uint64_t>(cfg.get_long("params.seed", 1));
    ec.box_corner_cap = static_cast<int>(cfg.get_long("params.box_corner_cap", 12));
    ec.box_random_draws =
        static_cast<int>(cfg.get_long("params.box_random_draws", 256));
    if (args.common.replicates >= 0)
        ec.replicates = static_cast<int>(args.common.replicates);
    if (args.seed_given) ec.seed = args.common.seed;
    if (args.tol_given) ec.tol = args.common.tol;
    if (ec.replicates < 1) throw lb::ConfigError("replicates must be >= 1");
    return ec;
}

void cmd_experiment(const ExperimentArgs& args) {
    lb::FlatConfig cfg = lb::parse_config_file(args.config_path);
    const std::string kind = cfg.get_string("kind", "");
    if (kind.empty()) throw lb::ConfigError(args.config_path + ": missing 'kind'");
    lb::ExperimentConfig ec = experiment_config(cfg, args);

    lb::JsonValue report = lb::JsonValue::object();
    report.set("kind", kind);

    if (kind == "tv_lower" || kind == "tv_upper" || kind == "tv_both" ||
        kind == "fixed_lower" || kind == "fixed_upper") {
        BuiltDesign d = build_design(cfg);
        ec.S0_override = d.S0;
        lb::NoisyBoundsReport both = lb::noisy_bounds_experiment(ec, d.X);
        if (kind == "tv_lower" || kind == "fixed_lower") {
            report.set("report", lb::to_json(both.lower));
            lb::write_trials_csv(out_path(args.common, "trials.csv"),
                                 both.lower.trials);
        } else if (kind == "tv_upper" || kind == "fixed_upper") {
            report.set("report", lb::to_json(both.upper));
            lb::write_trials_csv(out_path(args.common, "trials.csv"),
                                 both.upper.trials);
        } else {
            report.set("lower", lb::to_json(both.lower));
            report.set("upper", lb::to_json(both.upper));
            report.set("coverage_both", both.coverage_both);
            report.set("pass_both", both.pass_both);
            lb::write_trials_csv(out_path(args.common, "trials_lower.csv"),
                                 both.lower.trials);
            lb::write_trials_csv(out_path(args.common, "trials_upper.csv"),
                                 both.upper.trials);
        }
    } else if (kind == "variance") {
        BuiltDesign d = build_design(cfg);
        ec.S0_override = d.S0;
        lb::BoundReport rep = lb::variance_bound_experiment(ec, d.X);
        report.set("report", lb::to_json(rep));
        lb::write_trials_csv(out_path(args.common, "trials.csv"), rep.trials);
    } else if (kind == "random_design") {
        lb::CovarianceModel model = build_model(cfg);
        lb::BoundReport rep = lb::random_design_experiment(ec, model);
        report.set("report", lb::to_json(rep));
        lb::write_trials_csv(out_path(args.common, "trials.csv"), rep.trials);
    } else if (kind == "kappa_compare") {
        lb::CovarianceModel model = build_model(cfg);
        const double u = cfg.get_double("params.u", 0.5);
        const double v = cfg.get_double("params.v", 1.0);
        lb::BoundReport rep = lb::empirical_vs_theoretical_kappa(ec, model, u, v);
        report.set("report", lb::to_json(rep));
        lb::write_trials_csv(out_path(args.common, "trials.csv"), rep.trials);
    } else {
        throw lb::ConfigError("unknown experiment kind '" + kind + "'");
    }
    report.set("config", config_echo(cfg));
    lb::write_text_atomic(out_path(args.common, "report.json"), report.dump());
}

// ---------------------------------------------------------------------------
// probe
// ---------------------------------------------------------------------------

void cmd_probe(const ExperimentArgs& args) {
    lb::ProbeConfig pc;
    lb::FlatConfig cfg;
    if (!args.config_path.empty()) {
        cfg = lb::parse_config_file(args.config_path);
        pc.replicates_gauss = cfg.get_long("probes.replicates_gauss", pc.replicates_gauss);
        pc.replicates_chi = cfg.get_long("probes.replicates_chi", pc.replicates_chi);
        pc.replicates_cross = cfg.get_long("probes.replicates_cross", pc.replicates_cross);
        pc.replicates_quad = cfg.get_long("probes.replicates_quad", pc.replicates_quad);
        pc.replicates_conc = cfg.get_long("probes.replicates_conc", pc.replicates_conc);
        pc.p = static_cast<int>(cfg.get_long("probes.p", pc.p));
        pc.T = static_cast<int>(cfg.get_long("probes.T", pc.T));
        pc.n_cross = static_cast<int>(cfg.get_long("probes.n", pc.n_cross));
        pc.t = cfg.get_double("probes.t", pc.t);
        pc.x = cfg.get_double("probes.x", pc.x);
        pc.sigma_u = cfg.get_double("probes.sigma_u", pc.sigma_u);
        pc.sigma_v = cfg.get_double("probes.sigma_v", pc.sigma_v);
        pc.sigma_uv = cfg.get_double("probes.sigma_uv", pc.sigma_uv);
        pc.seed = static_cast<std::uint64_t>(cfg.get_long("probes.seed", 1));
    }
    if (args.seed_given) pc.seed = args.common.seed;
    if (args.common.replicates >= 0) {
        pc.replicates_gauss = args.common.replicates;
        pc.replicates_chi = args.common.replicates;
        pc.replicates_cross = args.common.replicates;
    }
    std::vector<lb::BoundReport> reports = lb::probability_probes(pc);
    lb::JsonValue out = lb::JsonValue::object();
    lb::JsonValue arr = lb::JsonValue::array();
    bool all_pass = true;
    for (const lb::BoundReport& r : reports) {
        arr.push(lb::to_json(r));
        if (!r.details.count("report_only")) all_pass = all_pass && r.pass;
    }
    out.set("pass", all_pass);
    out.set("probes", std::move(arr));
    if (!args.config_path.empty()) out.set("config", config_echo(cfg));
    lb::write_text_atomic(out_path(args.common, "report.json"), out.dump());
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const lb::BetaminViolated*>(&e)) return 4;
    if (dynamic_cast<const lb::HypothesisFailed*>(&e)) return 3;
    if (dynamic_cast<const lb::DegenerateKappa*>(&e)) return 2;
    if (dynamic_cast<const lb::NotPsd*>(&e)) return 2;
    if (dynamic_cast<const lb::RankDeficient*>(&e)) return 2;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact compatibility constants and prediction-error bounds "
                 "for l1-penalized least squares"};
    app.require_subcommand(1);

    CompatArgs compat_args;
    CLI::App* compat = app.add_subcommand(
        "compat", "compatibility constant of a design and index set");
    add_common(compat, compat_args.common);
    compat->add_option("--design", compat_args.design_csv, "design matrix CSV");
    compat->add_option("--spec", compat_args.spec_json, "query spec JSON");
    compat->add_option("--tv", compat_args.tv_tokens,
                       "total-variation instance, e.g. --tv n=8 d=4,4")
        ->expected(-1);

    TvArgs tv_args;
    CLI::App* tv = app.add_subcommand("tv", "total-variation instance analysis");
    add_common(tv, tv_args.common);
    tv->add_option("--n", tv_args.n, "signal length")->required();
    tv->add_option("--d", tv_args.d_csv, "comma-separated distances")->required();
    tv->add_option("--signal", tv_args.signal_csv, "optional signal CSV to denoise");
    tv->add_option("--lambda", tv_args.lambda, "denoising penalty");

    NoiselessArgs nl_args;
    CLI::App* noiseless = app.add_subcommand(
        "noiseless", "verify the exact noiseless prediction-error identity");
    add_common(noiseless, nl_args.common);
    noiseless->add_option("--design", nl_args.design_csv)->required();
    noiseless->add_option("--beta0", nl_args.beta0_csv)->required();
    noiseless->add_option("--lambda-star", nl_args.lambda_star)->required();

    ExperimentArgs exp_args;
    CLI::App* experiment =
        app.add_subcommand("experiment", "run a Monte-Carlo bound experiment");
    add_common(experiment, exp_args.common);
    experiment->add_option("--config", exp_args.config_path, "TOML or JSON config")
        ->required();

    ExperimentArgs probe_args;
    CLI::App* probe =
        app.add_subcommand("probe", "tail-bound probes for the probability toolbox");
    add_common(probe, probe_args.common);
    probe->add_option("--config", probe_args.config_path, "TOML or JSON config");

    CLI11_PARSE(app, argc, argv);

    exp_args.seed_given = experiment->count("--seed") > 0;
    exp_args.tol_given = experiment->count("--tol") > 0;
    probe_args.seed_given = probe->count("--seed") > 0;

    try {
        if (*compat) cmd_compat(compat_args);
        else if (*tv) cmd_tv(tv_args);
        else if (*noiseless) cmd_noiseless(nl_args);
        else if (*experiment) cmd_experiment(exp_args);
        else if (*probe) cmd_probe(probe_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}
