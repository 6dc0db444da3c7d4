#include "lassobounds/projections.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>

namespace lassobounds {

namespace {

Matrix submatrix_cols(const Matrix& X, const std::vector<int>& cols) {
    Matrix out(X.rows(), static_cast<int>(cols.size()));
    for (size_t k = 0; k < cols.size(); ++k) out.col(static_cast<int>(k)) = X.col(cols[k]);
    return out;
}

}  // namespace

ProjectionDiag anti_projection_diag(const DesignMatrix& X, const ActiveSet& S) {
    if (S.empty()) throw Error("anti_projection_diag: S must be nonempty");
    for (int j : S)
        if (j >= X.p()) throw Error("anti_projection_diag: index out of range");
    const Matrix XS = submatrix_cols(X.X, S.indices());
    const double rank_tol = 1e-10 * std::max(1.0, XS.cwiseAbs().maxCoeff());

    Eigen::ColPivHouseholderQR<Matrix> qr(XS);
    qr.setThreshold(rank_tol);
    const bool full_rank =
        qr.rank() == XS.cols() && XS.rows() >= XS.cols();

    ProjectionDiag out;
    out.S = S;
    out.rank_ok = full_rank;

    // thin Q for the projector onto the column space
    Matrix Q1;
    Eigen::HouseholderQR<Matrix> hqr(XS);
    if (full_rank) {
        Q1 = hqr.householderQ() * Matrix::Identity(XS.rows(), XS.cols());
    } else {
        // pseudo-inverse route: orthonormal basis from the SVD
        Eigen::JacobiSVD<Matrix> svd(XS, Eigen::ComputeThinU);
        const auto& sv = svd.singularValues();
        int r = 0;
        for (int k = 0; k < sv.size(); ++k)
            if (sv(k) > rank_tol * std::max(1.0, sv(0))) ++r;
        if (r == 0) throw RankDeficient("anti_projection_diag: X_S is zero");
        Q1 = svd.matrixU().leftCols(r);
    }
    // sanity: the projector must reproduce the column space
    const double self_err =
        (XS - Q1 * (Q1.transpose() * XS)).cwiseAbs().maxCoeff();
    if (self_err > 1e-8 * std::max(1.0, XS.cwiseAbs().maxCoeff()))
        throw RankDeficient("anti_projection_diag: projector check failed");

    for (int j : S.complement(X.p())) {
        const Vector xj = X.X.col(j);
        const Vector proj = Q1 * (Q1.transpose() * xj);
        out.v_sq[j] = (xj - proj).squaredNorm();
    }
    if (full_rank) {
        // diag (X_S^T X_S)^{-1} = squared row norms of R^{-1}
        Matrix R = hqr.matrixQR()
                       .topLeftCorner(XS.cols(), XS.cols())
                       .triangularView<Eigen::Upper>();
        Matrix Rinv = R.inverse();
        for (int k = 0; k < S.size(); ++k)
            out.u_sq[S.indices()[static_cast<size_t>(k)]] = Rinv.row(k).squaredNorm();
    }
    return out;
}

double noise_projection_norm(const DesignMatrix& X, const ActiveSet& S,
                             const Vector& eps) {
    if (eps.size() != X.n()) throw Error("noise_projection_norm: size mismatch");
    const Matrix XS = submatrix_cols(X.X, S.indices());
    Eigen::ColPivHouseholderQR<Matrix> qr(XS);
    qr.setThreshold(1e-10 * std::max(1.0, XS.cwiseAbs().maxCoeff()));
    if (qr.rank() != XS.cols() || XS.rows() < XS.cols())
        throw RankDeficient("noise_projection_norm: X_S rank deficient");
    Eigen::HouseholderQR<Matrix> hqr(XS);
    Matrix Q1 = hqr.householderQ() * Matrix::Identity(XS.rows(), XS.cols());
    return (Q1.transpose() * eps).norm();
}

IrrepresentableResult irrepresentable_check(const DesignMatrix& X,
                                            const ActiveSet& S,
                                            const Vector& vbar) {
    const Matrix XS = submatrix_cols(X.X, S.indices());
    Eigen::ColPivHouseholderQR<Matrix> qr(XS);
    qr.setThreshold(1e-10 * std::max(1.0, XS.cwiseAbs().maxCoeff()));
    if (qr.rank() != XS.cols() || XS.rows() < XS.cols())
        throw RankDeficient("irrepresentable_check: X_S rank deficient");
    const std::vector<int> comp = S.complement(X.p());
    if (vbar.size() != static_cast<int>(comp.size()))
        throw Error("irrepresentable_check: vbar must cover the complement");

    IrrepresentableResult out;
    for (size_t k = 0; k < comp.size(); ++k) {
        const Vector gamma = qr.solve(X.X.col(comp[k]));
        const double l1 = gamma.cwiseAbs().sum();
        out.gamma_l1[comp[k]] = l1;
        out.max_gamma_l1 = std::max(out.max_gamma_l1, l1);
        if (l1 > 1.0 - vbar(static_cast<int>(k))) out.holds = false;
    }
    return out;
}

}  // namespace lassobounds
