#include "lassobounds/compat.hpp"

#include <cmath>
#include <limits>

namespace lassobounds {

namespace {

enum class VarKind { s_nonneg, plus, minus, free_var };

struct VarDesc {
    int coord;
    VarKind kind;
    double sign = 1.0;  // z_j for s_nonneg
};

struct Built {
    QpProblem qp;
    std::vector<VarDesc> vars;
    Vector x0;
};

Vector recover_b(int p, const std::vector<VarDesc>& vars, const Vector& x) {
    Vector b = Vector::Zero(p);
    for (size_t i = 0; i < vars.size(); ++i) {
        const VarDesc& v = vars[i];
        switch (v.kind) {
            case VarKind::s_nonneg: b(v.coord) += v.sign * x(static_cast<int>(i)); break;
            case VarKind::plus: b(v.coord) += x(static_cast<int>(i)); break;
            case VarKind::minus: b(v.coord) -= x(static_cast<int>(i)); break;
            case VarKind::free_var: b(v.coord) += x(static_cast<int>(i)); break;
        }
    }
    return b;
}

void check_spec(const CompatSpec& spec, int p) {
    if (spec.S.empty()) throw InfeasibleSpec("compat: S must be nonempty");
    if (!spec.S.disjoint(spec.free))
        throw InfeasibleSpec("compat: S and free sets must be disjoint");
    for (int j : spec.S)
        if (j >= p) throw InfeasibleSpec("compat: S index out of range");
    for (int j : spec.free)
        if (j >= p) throw InfeasibleSpec("compat: free index out of range");
    if (spec.weights.size() > 0) {
        if (spec.weights.minCoeff() < 0.0 || !spec.weights.allFinite())
            throw InfeasibleSpec("compat: weights must be finite and >= 0");
        const int csize = p - spec.S.size() - spec.free.size();
        if (spec.weights.size() != csize)
            throw InfeasibleSpec("compat: weight vector must cover the complement");
    }
    if (spec.active_weights.size() > 0 &&
        spec.active_weights.size() != spec.S.size())
        throw InfeasibleSpec("compat: active_weights must cover S");
}

std::vector<int> penalized_complement(const CompatSpec& spec, int p) {
    std::vector<int> c;
    for (int j = 0; j < p; ++j)
        if (!spec.S.contains(j) && !spec.free.contains(j)) c.push_back(j);
    return c;
}

// Sign-fixed subproblem in split variables. Complement coordinates with zero
// weight drop out of the constraint and become plain free variables.
Built build_sign_fixed(const Matrix& A, const CompatSpec& spec,
                       const std::vector<int>& z) {
    const int p = static_cast<int>(A.cols());
    const std::vector<int>& Sidx = spec.S.indices();
    const std::vector<int> comp = penalized_complement(spec, p);

    Built out;
    QpProblem::Row row;
    std::vector<Vector> cols;

    double start_denom = 0.0;
    std::vector<std::pair<int, double>> start_terms;  // (var, aw_j)

    for (size_t k = 0; k < Sidx.size(); ++k) {
        const double aw = spec.active_weights.size() > 0
                              ? spec.active_weights(static_cast<int>(k))
                              : 1.0;
        const int var = static_cast<int>(cols.size());
        cols.push_back(static_cast<double>(z[k]) * A.col(Sidx[k]));
        out.vars.push_back({Sidx[k], VarKind::s_nonneg, static_cast<double>(z[k])});
        if (aw > 0.0) {
            row.coef.push_back({var, aw});
            start_terms.push_back({var, aw});
            start_denom += 1.0;
        }
    }
    if (start_terms.empty())
        throw InfeasibleSpec("compat: no positive active weight, constraint unreachable");

    for (size_t k = 0; k < comp.size(); ++k) {
        const double wgt = spec.weights.size() > 0 ? spec.weights(static_cast<int>(k)) : 1.0;
        if (wgt > 0.0) {
            const int vplus = static_cast<int>(cols.size());
            cols.push_back(A.col(comp[k]));
            out.vars.push_back({comp[k], VarKind::plus});
            row.coef.push_back({vplus, -wgt});
            const int vminus = static_cast<int>(cols.size());
            cols.push_back(-A.col(comp[k]));
            out.vars.push_back({comp[k], VarKind::minus});
            row.coef.push_back({vminus, -wgt});
        } else {
            cols.push_back(A.col(comp[k]));
            out.vars.push_back({comp[k], VarKind::free_var});
        }
    }
    for (int j : spec.free) {
        cols.push_back(A.col(j));
        out.vars.push_back({j, VarKind::free_var});
    }

    const int m = static_cast<int>(cols.size());
    out.qp.G.resize(A.rows(), m);
    for (int i = 0; i < m; ++i) out.qp.G.col(i) = cols[static_cast<size_t>(i)];
    out.qp.nonneg.assign(static_cast<size_t>(m), false);
    for (int i = 0; i < m; ++i)
        out.qp.nonneg[static_cast<size_t>(i)] =
            out.vars[static_cast<size_t>(i)].kind != VarKind::free_var;
    row.rhs = 1.0;
    out.qp.rows.push_back(std::move(row));

    out.x0 = Vector::Zero(m);
    for (auto [var, aw] : start_terms) out.x0(var) = 1.0 / (aw * start_denom);
    return out;
}

struct EnginePieces {
    double qp_value;
    Vector b;
    double kkt;
};

EnginePieces solve_pattern(const Matrix& A, const CompatSpec& spec,
                           const std::vector<int>& z, double tol) {
    Built built = build_sign_fixed(A, spec, z);
    QpSolution sol = solve_split_qp(built.qp, built.x0, tol);
    return {sol.value, recover_b(static_cast<int>(A.cols()), built.vars, sol.x),
            sol.kkt_residual};
}

// Lagrangian identity diagnostic: A^T A b* should equal lam * (aw z on S,
// something of modulus <= w off S, 0 on free) with lam = ||A b*||^2.
double certificate_gap(const Matrix& A, const CompatSpec& spec,
                       const Vector& b, const std::vector<int>& z) {
    const int p = static_cast<int>(A.cols());
    const Vector grad = A.transpose() * (A * b);
    const double lam = (A * b).squaredNorm();
    const double denom = std::max(grad.cwiseAbs().maxCoeff(), 1e-300);
    const double bmax = b.cwiseAbs().maxCoeff();

    const std::vector<int>& Sidx = spec.S.indices();
    const std::vector<int> comp = penalized_complement(spec, p);
    double gap = 0.0;
    for (size_t k = 0; k < Sidx.size(); ++k) {
        const double aw = spec.active_weights.size() > 0
                              ? spec.active_weights(static_cast<int>(k))
                              : 1.0;
        gap = std::max(gap, std::abs(grad(Sidx[k]) - lam * aw * z[k]));
    }
    for (size_t k = 0; k < comp.size(); ++k) {
        const double wgt = spec.weights.size() > 0 ? spec.weights(static_cast<int>(k)) : 1.0;
        const int j = comp[k];
        if (std::abs(b(j)) > 1e-10 * std::max(1.0, bmax)) {
            // active complement coordinate: gradient aligned against the sign
            gap = std::max(gap, std::abs(grad(j) + lam * wgt * (b(j) > 0 ? 1.0 : -1.0)));
        } else {
            gap = std::max(gap, std::max(0.0, std::abs(grad(j)) - lam * wgt));
        }
    }
    for (int j : spec.free) gap = std::max(gap, std::abs(grad(j)));
    return gap / denom;
}

CompatResult kappa_engine(const Matrix& A, double divisor,
                          const CompatSpec& spec, double tol) {
    const int p = static_cast<int>(A.cols());
    check_spec(spec, p);
    const int s = spec.S.size();
    if (s > 20)
        throw CapExceeded("compat: |S| = " + std::to_string(s) +
                          " exceeds the enumeration cap of 20");

    const long patterns = 1L << (s - 1);
    CompatResult best;
    best.value = std::numeric_limits<double>::infinity();

    std::vector<int> z(static_cast<size_t>(s), 1);
    for (long mask = 0; mask < patterns; ++mask) {
        z[0] = 1;  // b -> -b symmetry halves the enumeration
        for (int k = 1; k < s; ++k)
            z[static_cast<size_t>(k)] = (mask >> (k - 1)) & 1 ? -1 : 1;
        EnginePieces piece = solve_pattern(A, spec, z, tol);
        if (piece.qp_value < best.value) {
            best.value = piece.qp_value;
            best.minimizer = piece.b;
            best.signs = z;
            best.qp_kkt_residual = piece.kkt;
        }
    }
    best.subproblem_count = static_cast<int>(patterns);

    const double mult = static_cast<double>(s + spec.free.size());
    best.value = mult * best.value / divisor;
    // re-read the attaining signs off the minimizer where it is nonzero
    const double bmax = best.minimizer.cwiseAbs().maxCoeff();
    const std::vector<int>& Sidx = spec.S.indices();
    for (size_t k = 0; k < Sidx.size(); ++k) {
        const double bj = best.minimizer(Sidx[k]);
        if (std::abs(bj) > 1e-12 * std::max(1.0, bmax))
            best.signs[k] = bj > 0.0 ? 1 : -1;
        best.b_star_l1_on_S += std::abs(bj);
    }
    best.certificate_gap = certificate_gap(A, spec, best.minimizer, best.signs);
    return best;
}

}  // namespace

CompatSpec CompatSpec::uniform(ActiveSet S, double u, int p, ActiveSet free_set) {
    CompatSpec spec;
    spec.S = std::move(S);
    spec.free = std::move(free_set);
    const int csize = p - spec.S.size() - spec.free.size();
    if (csize < 0) throw InfeasibleSpec("CompatSpec::uniform: sets exceed dimension");
    if (u != 1.0) spec.weights = Vector::Constant(csize, u);
    return spec;
}

std::pair<double, Vector> solve_qp_subproblem(const QpSubproblem& sub, double tol) {
    CompatSpec spec;
    spec.S = sub.S;
    spec.weights = sub.weights;
    spec.active_weights = sub.active_weights;
    spec.free = sub.free;
    check_spec(spec, static_cast<int>(sub.design.cols()));
    if (static_cast<int>(sub.z.size()) != sub.S.size())
        throw InfeasibleSpec("solve_qp_subproblem: sign vector size mismatch");
    Built built = build_sign_fixed(sub.design, spec, sub.z);
    QpSolution sol = solve_split_qp(built.qp, built.x0, tol);
    return {sol.value,
            recover_b(static_cast<int>(sub.design.cols()), built.vars, sol.x)};
}

CompatResult kappa_hat_sq(const DesignMatrix& X, const CompatSpec& spec,
                          double tol) {
    return kappa_engine(X.X, static_cast<double>(X.n()), spec, tol);
}

CompatResult kappa_theoretical_sq(const CovarianceModel& model,
                                  const CompatSpec& spec, double tol) {
    return kappa_engine(model.chol.transpose(), 1.0, spec, tol);
}

namespace {

// phase-1 relaxation used by phi_hat_sq: ||b_S||_1 pinned via fixed signs,
// complement unconstrained.
std::pair<double, Vector> phi_phase1(const Matrix& A, const ActiveSet& S,
                                     const std::vector<int>& z, double tol) {
    const int p = static_cast<int>(A.cols());
    const std::vector<int>& Sidx = S.indices();
    QpProblem qp;
    std::vector<VarDesc> vars;
    std::vector<Vector> cols;
    QpProblem::Row row;
    for (size_t k = 0; k < Sidx.size(); ++k) {
        row.coef.push_back({static_cast<int>(cols.size()), 1.0});
        cols.push_back(static_cast<double>(z[k]) * A.col(Sidx[k]));
        vars.push_back({Sidx[k], VarKind::s_nonneg, static_cast<double>(z[k])});
    }
    for (int j : S.complement(p)) {
        cols.push_back(A.col(j));
        vars.push_back({j, VarKind::free_var});
    }
    const int m = static_cast<int>(cols.size());
    qp.G.resize(A.rows(), m);
    for (int i = 0; i < m; ++i) qp.G.col(i) = cols[static_cast<size_t>(i)];
    qp.nonneg.assign(static_cast<size_t>(m), false);
    for (int i = 0; i < m; ++i)
        qp.nonneg[static_cast<size_t>(i)] =
            vars[static_cast<size_t>(i)].kind == VarKind::s_nonneg;
    row.rhs = 1.0;
    qp.rows.push_back(std::move(row));
    Vector x0 = Vector::Zero(m);
    for (size_t k = 0; k < Sidx.size(); ++k)
        x0(static_cast<int>(k)) = 1.0 / static_cast<double>(Sidx.size());
    QpSolution sol = solve_split_qp(qp, x0, tol);
    return {sol.value, recover_b(p, vars, sol.x)};
}

// phase 2: ||b_S||_1 = 1 and the complement mass pinned to its budget. The
// two rows touch disjoint variables, which keeps the projection separable.
std::pair<double, Vector> two_row_phase(const Matrix& A, const ActiveSet& S,
                                        const std::vector<int>& z,
                                        double s_budget, double c_budget,
                                        double tol) {
    const int p = static_cast<int>(A.cols());
    const std::vector<int>& Sidx = S.indices();
    QpProblem qp;
    std::vector<VarDesc> vars;
    std::vector<Vector> cols;
    QpProblem::Row row_s, row_c;
    for (size_t k = 0; k < Sidx.size(); ++k) {
        row_s.coef.push_back({static_cast<int>(cols.size()), 1.0});
        cols.push_back(static_cast<double>(z[k]) * A.col(Sidx[k]));
        vars.push_back({Sidx[k], VarKind::s_nonneg, static_cast<double>(z[k])});
    }
    for (int j : S.complement(p)) {
        row_c.coef.push_back({static_cast<int>(cols.size()), 1.0});
        cols.push_back(A.col(j));
        vars.push_back({j, VarKind::plus});
        row_c.coef.push_back({static_cast<int>(cols.size()), 1.0});
        cols.push_back(-A.col(j));
        vars.push_back({j, VarKind::minus});
    }
    const int m = static_cast<int>(cols.size());
    qp.G.resize(A.rows(), m);
    for (int i = 0; i < m; ++i) qp.G.col(i) = cols[static_cast<size_t>(i)];
    qp.nonneg.assign(static_cast<size_t>(m), true);
    row_s.rhs = s_budget;
    row_c.rhs = c_budget;
    qp.rows.push_back(std::move(row_s));
    qp.rows.push_back(std::move(row_c));
    Vector x0 = Vector::Zero(m);
    for (size_t k = 0; k < Sidx.size(); ++k)
        x0(static_cast<int>(k)) = s_budget / static_cast<double>(Sidx.size());
    x0(static_cast<int>(Sidx.size())) = c_budget;
    QpSolution sol = solve_split_qp(qp, x0, tol);
    return {sol.value, recover_b(p, vars, sol.x)};
}

}  // namespace

double phi_hat_sq(const DesignMatrix& X, const ActiveSet& S, double u,
                  double tol) {
    if (u <= 0.0) throw InfeasibleSpec("phi_hat_sq: u must be > 0");
    if (S.empty()) throw InfeasibleSpec("phi_hat_sq: S must be nonempty");
    const int p = X.p();
    const int s = S.size();
    if (s > 20) throw CapExceeded("phi_hat_sq: |S| exceeds the cap of 20");
    const double ball = 1.0 / u;
    const bool has_complement = s < p;

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> z(static_cast<size_t>(s), 1);
    const long patterns = 1L << (s - 1);
    for (long mask = 0; mask < patterns; ++mask) {
        z[0] = 1;
        for (int k = 1; k < s; ++k)
            z[static_cast<size_t>(k)] = (mask >> (k - 1)) & 1 ? -1 : 1;
        auto [v1, b1] = phi_phase1(X.X, S, z, tol);
        double off = 0.0;
        for (int j : S.complement(p)) off += std::abs(b1(j));
        double v = v1;
        if (has_complement && off > ball * (1.0 + 1e-9))
            v = two_row_phase(X.X, S, z, 1.0, ball, tol).first;
        best = std::min(best, v);
    }
    return static_cast<double>(s) * best / static_cast<double>(X.n());
}

std::pair<double, double> ell1_bound_check(const DesignMatrix& X,
                                           const ActiveSet& S, double u,
                                           double tol) {
    if (u < 0.0 || u >= 1.0)
        throw InfeasibleSpec("ell1_bound_check: need 0 <= u < 1");
    CompatResult at_one = kappa_hat_sq(X, CompatSpec::uniform(S, 1.0, X.p()), tol);
    CompatResult at_u = kappa_hat_sq(X, CompatSpec::uniform(S, u, X.p()), tol);
    if (at_u.value <= 1e-12)
        throw DegenerateKappa("ell1_bound_check: kappa(u,S) vanishes");
    const double k1 = std::sqrt(at_one.value);
    const double ku = std::sqrt(at_u.value);
    const double lhs = at_one.b_star_l1_on_S;
    const double rhs = (k1 - u * ku) / ((1.0 - u) * ku);
    return {lhs, rhs};
}

std::pair<double, double> cone_bound_check(const DesignMatrix& X,
                                           const ActiveSet& S, double u,
                                           double v, double tol) {
    if (!(v > u && u > 0.0))
        throw InfeasibleSpec("cone_bound_check: need v > u > 0");
    const int p = X.p();
    const int s = S.size();
    if (s > 20) throw CapExceeded("cone_bound_check: |S| exceeds the cap of 20");
    CompatResult at_v = kappa_hat_sq(X, CompatSpec::uniform(S, v, p), tol);

    const double radius = 1.0 + (1.0 + u) / (v - u);
    const double c_budget = (radius - 1.0) / (1.0 + u);
    const bool has_complement = s < p;

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> z(static_cast<size_t>(s), 1);
    const long patterns = 1L << (s - 1);
    const CompatSpec spec_u = CompatSpec::uniform(S, u, p);
    for (long mask = 0; mask < patterns; ++mask) {
        z[0] = 1;
        for (int k = 1; k < s; ++k)
            z[static_cast<size_t>(k)] = (mask >> (k - 1)) & 1 ? -1 : 1;
        EnginePieces piece = solve_pattern(X.X, spec_u, z, tol);
        double val = piece.qp_value;
        if (has_complement && piece.b.cwiseAbs().sum() > radius * (1.0 + 1e-9))
            val = two_row_phase(X.X, S, z, 1.0 + u * c_budget, c_budget, tol).first;
        best = std::min(best, val);
    }
    const double restricted =
        static_cast<double>(s) * best / static_cast<double>(X.n());
    return {at_v.value, restricted};
}

std::pair<double, Vector> constrained_min_fixed_signs(
    const DesignMatrix& X, const ActiveSet& S, const std::vector<int>& z_S,
    const Vector& complement_weights, double tol) {
    const int p = X.p();
    const std::vector<int>& Sidx = S.indices();
    if (static_cast<int>(z_S.size()) != S.size())
        throw InfeasibleSpec("constrained_min_fixed_signs: sign size mismatch");
    const std::vector<int> comp = S.complement(p);
    if (static_cast<int>(comp.size()) != complement_weights.size())
        throw InfeasibleSpec("constrained_min_fixed_signs: weight size mismatch");

    QpProblem qp;
    std::vector<VarDesc> vars;
    std::vector<Vector> cols;
    QpProblem::Row row;
    int start_var = -1;
    for (size_t k = 0; k < Sidx.size(); ++k) {
        const double zk = static_cast<double>(z_S[k]);
        row.coef.push_back({static_cast<int>(cols.size()), zk});
        if (zk > 0.0 && start_var < 0) start_var = static_cast<int>(cols.size());
        cols.push_back(X.X.col(Sidx[k]));
        vars.push_back({Sidx[k], VarKind::plus});
        row.coef.push_back({static_cast<int>(cols.size()), -zk});
        if (-zk > 0.0 && start_var < 0) start_var = static_cast<int>(cols.size());
        cols.push_back(-X.X.col(Sidx[k]));
        vars.push_back({Sidx[k], VarKind::minus});
    }
    for (size_t k = 0; k < comp.size(); ++k) {
        const double w = complement_weights(static_cast<int>(k));
        if (w > 0.0) {
            row.coef.push_back({static_cast<int>(cols.size()), -w});
            cols.push_back(X.X.col(comp[k]));
            vars.push_back({comp[k], VarKind::plus});
            row.coef.push_back({static_cast<int>(cols.size()), -w});
            cols.push_back(-X.X.col(comp[k]));
            vars.push_back({comp[k], VarKind::minus});
        } else {
            cols.push_back(X.X.col(comp[k]));
            vars.push_back({comp[k], VarKind::free_var});
        }
    }
    const int m = static_cast<int>(cols.size());
    qp.G.resize(X.n(), m);
    for (int i = 0; i < m; ++i) qp.G.col(i) = cols[static_cast<size_t>(i)];
    qp.nonneg.assign(static_cast<size_t>(m), false);
    for (int i = 0; i < m; ++i)
        qp.nonneg[static_cast<size_t>(i)] =
            vars[static_cast<size_t>(i)].kind != VarKind::free_var;
    row.rhs = 1.0;
    qp.rows.push_back(std::move(row));
    Vector x0 = Vector::Zero(m);
    x0(start_var) = 1.0;
    QpSolution sol = solve_split_qp(qp, x0, tol);
    return {sol.value, recover_b(p, vars, sol.x)};
}

double brute_force_compat(const DesignMatrix& X, const CompatSpec& spec,
                          long samples, Rng& rng) {
    const int p = X.p();
    if (p > 8) throw Error("brute_force_compat: p must be <= 8");
    check_spec(spec, p);
    const std::vector<int>& Sidx = spec.S.indices();
    const std::vector<int> comp = penalized_complement(spec, p);
    const double mult = static_cast<double>(spec.S.size() + spec.free.size());
    const double n = static_cast<double>(X.n());

    auto aw = [&](size_t k) {
        return spec.active_weights.size() > 0 ? spec.active_weights(static_cast<int>(k)) : 1.0;
    };
    auto cw = [&](size_t k) {
        return spec.weights.size() > 0 ? spec.weights(static_cast<int>(k)) : 1.0;
    };
    auto margin = [&](const Vector& b) {
        double g = 0.0;
        for (size_t k = 0; k < Sidx.size(); ++k) g += aw(k) * std::abs(b(Sidx[k]));
        for (size_t k = 0; k < comp.size(); ++k) g -= cw(k) * std::abs(b(comp[k]));
        return g;
    };
    auto ratio = [&](const Vector& b) {
        const double g = margin(b);
        if (g <= 1e-9) return std::numeric_limits<double>::infinity();
        return mult * (X.X * b).squaredNorm() / (n * g * g);
    };

    Vector best_b = Vector::Zero(p);
    for (size_t k = 0; k < Sidx.size(); ++k)
        best_b(Sidx[k]) = 1.0 / (std::max(aw(k), 1e-12) * static_cast<double>(Sidx.size()));
    double best = ratio(best_b);

    Vector b(p);
    for (long it = 0; it < samples; ++it) {
        b.setZero();
        for (size_t k = 0; k < Sidx.size(); ++k)
            b(Sidx[k]) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * std::abs(rng.laplace());
        for (size_t k = 0; k < comp.size(); ++k) b(comp[k]) = 0.3 * rng.laplace();
        for (int j : spec.free) b(j) = rng.laplace();
        const double r = ratio(b);
        if (r < best) {
            best = r;
            best_b = b;
        }
    }

    // coordinatewise golden-section polish on each side of the kink at zero
    const double phi_g = 0.6180339887498949;
    Vector cur = best_b;
    double cur_val = best;
    double spread = 1.0;
    for (int pass = 0; pass < 200; ++pass) {
        for (int j = 0; j < p; ++j) {
            const double center = cur(j);
            const double delta = spread * (1.0 + std::abs(center));
            for (int side = 0; side < 2; ++side) {
                double lo = side == 0 ? center - delta : center;
                double hi = side == 0 ? center : center + delta;
                double x1 = hi - phi_g * (hi - lo);
                double x2 = lo + phi_g * (hi - lo);
                auto eval = [&](double t) {
                    const double save = cur(j);
                    cur(j) = t;
                    const double r = ratio(cur);
                    cur(j) = save;
                    return r;
                };
                double f1 = eval(x1), f2 = eval(x2);
                for (int gi = 0; gi < 40; ++gi) {
                    if (f1 < f2) {
                        hi = x2; x2 = x1; f2 = f1;
                        x1 = hi - phi_g * (hi - lo);
                        f1 = eval(x1);
                    } else {
                        lo = x1; x1 = x2; f1 = f2;
                        x2 = lo + phi_g * (hi - lo);
                        f2 = eval(x2);
                    }
                }
                const double t = f1 < f2 ? x1 : x2;
                const double ft = std::min(f1, f2);
                if (ft < cur_val) {
                    cur(j) = t;
                    cur_val = ft;
                }
            }
        }
        spread *= 0.97;
    }
    return std::min(best, cur_val);
}

}  // namespace lassobounds
