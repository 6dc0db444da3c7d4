#pragma once

#include "lassobounds/types.hpp"

#include <utility>
#include <vector>

namespace lassobounds {

/// Convex QP in split variables:
///
///   minimize ||G x||_2^2
///   subject to  row_k . x = rhs_k   (at most two rows, disjoint supports)
///               x_i >= 0            (i with nonneg[i])
///
/// This is the normal form every compatibility subproblem reduces to after
/// writing l1 terms as differences of nonnegative parts. Solved by projected
/// gradient with exact line search, interleaved with active-set polish steps
/// that solve the reduced KKT system exactly; the polish is what reaches
/// 1e-10 stationarity on ill-conditioned designs.
struct QpProblem {
    struct Row {
        std::vector<std::pair<int, double>> coef;  // (variable, coefficient)
        double rhs = 0.0;
    };

    Matrix G;                  // n x m
    std::vector<bool> nonneg;  // size m
    std::vector<Row> rows;     // 0..2 rows, pairwise disjoint variable sets

    int m() const { return static_cast<int>(G.cols()); }
};

struct QpSolution {
    Vector x;
    double value = 0.0;         // ||G x||_2^2 at the solution
    double kkt_residual = 0.0;  // scaled max KKT violation
    int iterations = 0;
};

/// x0 must satisfy the rows exactly and the sign bounds.
/// Throws NoConvergence with the best iterate if the tolerance is not met.
QpSolution solve_split_qp(const QpProblem& qp, const Vector& x0,
                          double tol = 1e-10, int max_outer = 600);

}  // namespace lassobounds
