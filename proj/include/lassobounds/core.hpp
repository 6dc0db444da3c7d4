#pragma once

#include "lassobounds/rng.hpp"
#include "lassobounds/types.hpp"

#include <string>

namespace lassobounds {

/// Regression design X with n sample rows and p feature columns.
struct DesignMatrix {
    Matrix X;

    DesignMatrix() = default;
    explicit DesignMatrix(Matrix m);

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }
};

/// Population covariance with a cached lower-triangular factor.
///
/// The factor is a Cholesky factor, not the symmetric square root; every use
/// downstream is through ||chol^T v||_2^2 = v^T sigma0 v, which does not
/// depend on the choice of factor.
struct CovarianceModel {
    Matrix sigma0;
    Matrix chol;           // lower triangular, chol * chol^T = sigma0
    double lambda_max_sq;  // largest eigenvalue of sigma0
    double max_entry;      // largest absolute entry of sigma0

    static CovarianceModel from_sigma(const Matrix& sigma0);
    static CovarianceModel identity(int p);

    int p() const { return static_cast<int>(sigma0.rows()); }
};

/// Gram matrix X^T X / n, symmetrized.
Matrix gram(const DesignMatrix& X);

/// Lower-triangular L with L L^T = M + jitter * I.
///
/// Plain factorization is attempted first; on failure the jitter escalates in
/// decades from 1e-12 to 1e-8. Throws NotPsd if every level fails. The
/// returned factor has nonnegative diagonal and reproduces M + jitter*I to
/// 1e-10 per entry.
Matrix cholesky_psd(const Matrix& M, double* jitter_used = nullptr);

/// n i.i.d. rows, each chol * z with z standard normal.
DesignMatrix sample_gaussian_design(const CovarianceModel& model, int n, Rng& rng);

double power_iteration_lambda_max(const Matrix& sym, double tol = 1e-12,
                                  int max_iter = 20000);

// CSV: no header, comma separated, one row per line, %.17g reals.
Matrix read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Matrix& m);
Vector read_csv_vector(const std::string& path);
void write_csv_vector(const std::string& path, const Vector& v);

/// %.17g rendering used by every text output for exact double round-trips.
std::string format_double(double v);

}  // namespace lassobounds
