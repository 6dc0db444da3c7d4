#include "lassobounds/qp.hpp"

#include "lassobounds/core.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lassobounds {

namespace {

struct Workspace {
    const QpProblem& qp;
    Matrix Q;        // G^T G
    double lip;      // largest eigenvalue of Q
    Vector row_of;   // variable -> row index (-1 if in no row)
    Matrix E;        // dense r x m row matrix
    Vector e;        // r

    explicit Workspace(const QpProblem& problem) : qp(problem) {
        const int m = qp.m();
        Q = qp.G.transpose() * qp.G;
        Q = 0.5 * (Q + Q.transpose());
        lip = std::max(power_iteration_lambda_max(Q), 1e-30);
        const int r = static_cast<int>(qp.rows.size());
        E = Matrix::Zero(r, m);
        e = Vector::Zero(r);
        row_of = Vector::Constant(m, -1.0);
        for (int k = 0; k < r; ++k) {
            e(k) = qp.rows[static_cast<size_t>(k)].rhs;
            for (auto [i, c] : qp.rows[static_cast<size_t>(k)].coef) {
                if (row_of(i) >= 0.0)
                    throw Error("solve_split_qp: rows must have disjoint supports");
                E(k, i) = c;
                row_of(i) = k;
            }
        }
    }
};

// Projection of y onto {row . x = rhs over the block, x_i >= 0 (nonneg i)},
// with coordinates in `frozen` pinned at zero. The multiplier nu solves the
// monotone piecewise-linear equation h(nu) = 0 exactly via its breakpoints.
void project_row_block(const QpProblem& qp, const QpProblem::Row& row,
                       const std::vector<bool>& frozen, Vector& x,
                       const Vector& y) {
    struct Term {
        int i;
        double c;
        bool nonneg;
    };
    std::vector<Term> terms;
    for (auto [i, c] : row.coef) {
        if (frozen[static_cast<size_t>(i)]) {
            x(i) = 0.0;
            continue;
        }
        if (c == 0.0) continue;
        terms.push_back({i, c, qp.nonneg[static_cast<size_t>(i)]});
    }
    if (terms.empty()) {
        if (std::abs(row.rhs) > 1e-12)
            throw InfeasibleSpec("qp projection: row has no active variables");
        return;
    }
    auto h = [&](double nu) {
        double s = 0.0;
        for (const Term& t : terms) {
            double v = y(t.i) + nu * t.c;
            if (t.nonneg && v < 0.0) v = 0.0;
            s += t.c * v;
        }
        return s - row.rhs;
    };
    std::vector<double> bps;
    for (const Term& t : terms)
        if (t.nonneg) bps.push_back(-y(t.i) / t.c);
    std::sort(bps.begin(), bps.end());

    double lo = bps.empty() ? -1.0 : bps.front() - 1.0;
    double hi = bps.empty() ? 1.0 : bps.back() + 1.0;
    // expand until the root is bracketed (h is nondecreasing)
    for (int k = 0; k < 200 && h(lo) > 0.0; ++k) lo = 2.0 * lo - std::abs(lo) - 1.0;
    for (int k = 0; k < 200 && h(hi) < 0.0; ++k) hi = 2.0 * hi + std::abs(hi) + 1.0;
    if (h(lo) > 0.0 || h(hi) < 0.0)
        throw InfeasibleSpec("qp projection: row constraint unreachable");

    // narrow to the piece containing the root, then solve linearly
    for (double b : bps) {
        if (h(b) < 0.0) lo = std::max(lo, b);
        else hi = std::min(hi, b);
    }
    double nu;
    double hl = h(lo), hh = h(hi);
    if (hh <= hl + 0.0) {
        nu = lo;
    } else {
        nu = lo + (hi - lo) * (-hl) / (hh - hl);
    }
    // polish with a few bisection steps (guards against flat pieces)
    for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) < 0.0) lo = mid; else hi = mid;
    }
    if (std::abs(h(nu)) > std::abs(h(0.5 * (lo + hi)))) nu = 0.5 * (lo + hi);

    for (const Term& t : terms) {
        double v = y(t.i) + nu * t.c;
        if (t.nonneg && v < 0.0) v = 0.0;
        x(t.i) = v;
    }
}

Vector project(const Workspace& w, const Vector& y,
               const std::vector<bool>& frozen) {
    const int m = w.qp.m();
    Vector x(m);
    for (int i = 0; i < m; ++i) {
        if (frozen[static_cast<size_t>(i)]) {
            x(i) = 0.0;
        } else if (w.row_of(i) < 0.0) {
            x(i) = (w.qp.nonneg[static_cast<size_t>(i)] && y(i) < 0.0) ? 0.0 : y(i);
        } else {
            x(i) = y(i);  // provisional, overwritten by the block projection
        }
    }
    for (const auto& row : w.qp.rows)
        project_row_block(w.qp, row, frozen, x, y);
    return x;
}

// Multipliers from least squares over the coordinates treated as inactive,
// then the worst scaled KKT violation.
double kkt_violation(const Workspace& w, const Vector& x, double act_eps) {
    const int m = w.qp.m();
    const int r = static_cast<int>(w.qp.rows.size());
    const Vector g = w.Q * x;
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());

    std::vector<int> inactive;
    for (int i = 0; i < m; ++i)
        if (!w.qp.nonneg[static_cast<size_t>(i)] || x(i) > act_eps)
            inactive.push_back(i);

    Vector mu = Vector::Zero(r);
    if (r > 0 && !inactive.empty()) {
        Matrix Ei(static_cast<int>(inactive.size()), r);
        Vector gi(static_cast<int>(inactive.size()));
        for (size_t k = 0; k < inactive.size(); ++k) {
            for (int j = 0; j < r; ++j)
                Ei(static_cast<int>(k), j) = w.E(j, inactive[k]);
            gi(static_cast<int>(k)) = g(inactive[k]);
        }
        mu = Ei.colPivHouseholderQr().solve(gi);
    }

    double viol = 0.0;
    for (int k = 0; k < r; ++k)
        viol = std::max(viol, std::abs(w.E.row(k).dot(x) - w.e(k)) /
                                  std::max(1.0, std::abs(w.e(k))));
    const Vector s = g - w.E.transpose() * mu;
    for (int i = 0; i < m; ++i) {
        if (!w.qp.nonneg[static_cast<size_t>(i)]) {
            viol = std::max(viol, std::abs(s(i)) / scale);
        } else if (x(i) > act_eps) {
            viol = std::max(viol, std::abs(s(i)) / scale);
            viol = std::max(viol, -x(i) / std::max(1.0, x.cwiseAbs().maxCoeff()));
        } else {
            viol = std::max(viol, -s(i) / scale);
            viol = std::max(viol, -x(i));
        }
    }
    return viol;
}

// One equality-constrained solve on the working set (active coords pinned
// to zero). Returns the candidate point and the multipliers.
bool reduced_kkt_solve(const Workspace& w, const std::vector<bool>& active,
                       Vector& xhat, Vector& mu) {
    const int m = w.qp.m();
    const int r = static_cast<int>(w.qp.rows.size());
    std::vector<int> W;
    for (int i = 0; i < m; ++i)
        if (!active[static_cast<size_t>(i)]) W.push_back(i);
    const int mw = static_cast<int>(W.size());
    if (mw == 0) return false;

    Matrix K = Matrix::Zero(mw + r, mw + r);
    for (int a = 0; a < mw; ++a)
        for (int b = 0; b < mw; ++b) K(a, b) = w.Q(W[static_cast<size_t>(a)], W[static_cast<size_t>(b)]);
    for (int k = 0; k < r; ++k)
        for (int a = 0; a < mw; ++a) {
            K(mw + k, a) = w.E(k, W[static_cast<size_t>(a)]);
            K(a, mw + k) = w.E(k, W[static_cast<size_t>(a)]);
        }
    Vector rhs = Vector::Zero(mw + r);
    rhs.tail(r) = w.e;

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(K);
    const Vector sol = cod.solve(rhs);
    // the KKT system is always consistent here; reject only numerical junk
    if (!sol.allFinite()) return false;

    xhat = Vector::Zero(m);
    for (int a = 0; a < mw; ++a) xhat(W[static_cast<size_t>(a)]) = sol(a);
    mu = -sol.tail(r);  // sign convention: Q x = E^T mu + bound multipliers
    return true;
}

}  // namespace

QpSolution solve_split_qp(const QpProblem& qp, const Vector& x0, double tol,
                          int max_outer) {
    if (tol <= 0.0) throw Error("solve_split_qp: tol must be > 0");
    Workspace w(qp);
    const int m = qp.m();
    std::vector<bool> no_freeze(static_cast<size_t>(m), false);

    Vector x = project(w, x0, no_freeze);
    Vector best = x;
    double best_value = (qp.G * x).squaredNorm();
    double best_viol = std::numeric_limits<double>::infinity();

    const double act_eps = 1e-11;
    int iterations = 0;

    for (int outer = 0; outer < max_outer; ++outer) {
        // -- projected-gradient burst with exact line search
        for (int it = 0; it < 8; ++it) {
            ++iterations;
            const Vector grad = w.Q * x;
            Vector y = project(w, x - grad / w.lip, no_freeze);
            Vector d = y - x;
            const double dn = d.cwiseAbs().maxCoeff();
            if (dn <= 1e-16 * std::max(1.0, x.cwiseAbs().maxCoeff())) break;
            const double dQd = d.dot(w.Q * d);
            double alpha = 1.0;
            if (dQd > 0.0) alpha = std::clamp(-x.dot(w.Q * d) / dQd, 0.0, 1.0);
            x += alpha * d;
        }

        // -- active-set polish
        std::vector<bool> active(static_cast<size_t>(m), false);
        const double xs = std::max(1.0, x.cwiseAbs().maxCoeff());
        for (int i = 0; i < m; ++i)
            active[static_cast<size_t>(i)] = qp.nonneg[static_cast<size_t>(i)] && x(i) <= act_eps * xs;

        bool polished = false;
        for (int inner = 0; inner < 3 * m + 10; ++inner) {
            ++iterations;
            Vector xhat, mu;
            if (!reduced_kkt_solve(w, active, xhat, mu)) break;

            double worst = 0.0;
            for (int i = 0; i < m; ++i)
                if (qp.nonneg[static_cast<size_t>(i)] && !active[static_cast<size_t>(i)])
                    worst = std::min(worst, xhat(i));

            if (worst >= -1e-13 * std::max(1.0, xhat.cwiseAbs().maxCoeff())) {
                // candidate satisfies the bounds; check reduced costs on A
                const Vector g = w.Q * xhat;
                const Vector s = g - w.E.transpose() * mu;
                int release = -1;
                double smin = -1e-12 * std::max(1.0, g.cwiseAbs().maxCoeff());
                for (int i = 0; i < m; ++i) {
                    if (!active[static_cast<size_t>(i)]) continue;
                    if (s(i) < smin) {
                        smin = s(i);
                        release = i;
                    }
                }
                for (int i = 0; i < m; ++i)
                    if (qp.nonneg[static_cast<size_t>(i)] && xhat(i) < 0.0) xhat(i) = 0.0;
                x = xhat;
                if (release < 0) {
                    polished = true;
                    break;
                }
                active[static_cast<size_t>(release)] = false;
            } else {
                // step toward the candidate until the first bound blocks
                Vector xa = x;
                for (int i = 0; i < m; ++i)
                    if (active[static_cast<size_t>(i)]) xa(i) = 0.0;
                xa = project(w, xa, active);
                Vector d = xhat - xa;
                double theta = 1.0;
                int blocker = -1;
                for (int i = 0; i < m; ++i) {
                    if (!qp.nonneg[static_cast<size_t>(i)] || active[static_cast<size_t>(i)]) continue;
                    if (d(i) < -1e-15 && xa(i) / (-d(i)) < theta) {
                        theta = xa(i) / (-d(i));
                        blocker = i;
                    }
                }
                x = xa + theta * d;
                if (blocker < 0) break;
                x(blocker) = 0.0;
                active[static_cast<size_t>(blocker)] = true;
            }
        }

        const double viol = kkt_violation(w, x, act_eps * std::max(1.0, x.cwiseAbs().maxCoeff()));
        const double val = (qp.G * x).squaredNorm();
        if (viol < best_viol) {
            best_viol = viol;
            best_value = val;
            best = x;
        }
        if (polished && viol <= tol) {
            QpSolution sol;
            sol.x = x;
            sol.value = val;
            sol.kkt_residual = viol;
            sol.iterations = iterations;
            return sol;
        }
    }

    if (best_viol <= tol) {
        QpSolution sol;
        sol.x = best;
        sol.value = best_value;
        sol.kkt_residual = best_viol;
        sol.iterations = iterations;
        return sol;
    }
    throw NoConvergence("solve_split_qp: residual " + format_double(best_viol) +
                            " after " + std::to_string(max_outer) + " rounds",
                        max_outer, best_viol, best);
}

}  // namespace lassobounds
