#pragma once

#include "lassobounds/core.hpp"
#include "lassobounds/types.hpp"

#include <map>

namespace lassobounds {

/// Diagonal noise scales from projecting onto the columns indexed by S:
/// v_j^2 is the squared residual of regressing X_j on X_S (j outside S),
/// u_j^2 the j-th diagonal of (X_S^T X_S)^{-1} (j in S, full rank only).
struct ProjectionDiag {
    ActiveSet S;
    std::map<int, double> v_sq;  // j not in S -> (v_j^S)^2
    std::map<int, double> u_sq;  // j in S -> u_j^2, empty unless rank_ok
    bool rank_ok = true;

    double v_inf() const {
        double m = 0.0;
        for (const auto& [j, v] : v_sq) m = std::max(m, std::sqrt(v));
        return m;
    }
};

/// Householder QR of X_S; falls back to a pseudo-inverse projector when X_S
/// is column-rank deficient (then u_sq is absent and rank_ok is false).
ProjectionDiag anti_projection_diag(const DesignMatrix& X, const ActiveSet& S);

/// ||P_S eps||_2, the norm of the projection of eps onto span(X_S).
/// Throws RankDeficient when X_S does not have full column rank.
double noise_projection_norm(const DesignMatrix& X, const ActiveSet& S,
                             const Vector& eps);

struct IrrepresentableResult {
    std::map<int, double> gamma_l1;  // j not in S -> ||gamma_{S,j}||_1
    double max_gamma_l1 = 0.0;
    bool holds = true;
};

/// gamma_{S,j} = (X_S^T X_S)^{-1} X_S^T X_j; holds iff every
/// ||gamma_{S,j}||_1 <= 1 - vbar_j (vbar indexed over the complement of S,
/// increasing order).
IrrepresentableResult irrepresentable_check(const DesignMatrix& X,
                                            const ActiveSet& S,
                                            const Vector& vbar);

}  // namespace lassobounds
