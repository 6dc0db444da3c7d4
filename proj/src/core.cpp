#include "lassobounds/core.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lassobounds {

DesignMatrix::DesignMatrix(Matrix m) : X(std::move(m)) {
    if (X.rows() < 1 || X.cols() < 1)
        throw Error("DesignMatrix: need at least one row and one column");
    if (!X.allFinite())
        throw Error("DesignMatrix: non-finite entry");
}

Matrix gram(const DesignMatrix& X) {
    Matrix g = X.X.transpose() * X.X / static_cast<double>(X.n());
    return 0.5 * (g + g.transpose());
}

namespace {

// Standard PSD Cholesky; returns false when a pivot goes negative beyond
// tolerance. Zero pivots produce a zero column (rank-deficient input).
bool try_cholesky(const Matrix& M, Matrix& L) {
    const int p = static_cast<int>(M.rows());
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    L = Matrix::Zero(p, p);
    for (int j = 0; j < p; ++j) {
        double d = M(j, j);
        for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (d < -1e-12 * scale) return false;
        if (d <= 0.0) {
            L(j, j) = 0.0;
            for (int i = j + 1; i < p; ++i) {
                double s = M(i, j);
                for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
                // pivot is zero: the column must already be represented
                if (std::abs(s) > 1e-10 * scale) return false;
            }
            continue;
        }
        const double lj = std::sqrt(d);
        L(j, j) = lj;
        for (int i = j + 1; i < p; ++i) {
            double s = M(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / lj;
        }
    }
    return true;
}

}  // namespace

Matrix cholesky_psd(const Matrix& M, double* jitter_used) {
    if (M.rows() != M.cols()) throw Error("cholesky_psd: matrix not square");
    const int p = static_cast<int>(M.rows());
    Matrix L;
    const double jitters[] = {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8};
    for (double jit : jitters) {
        Matrix Mj = M;
        if (jit > 0.0) Mj += jit * Matrix::Identity(p, p);
        if (!try_cholesky(Mj, L)) continue;
        const double err = (L * L.transpose() - Mj).cwiseAbs().maxCoeff();
        if (err <= 1e-10 * std::max(1.0, Mj.cwiseAbs().maxCoeff())) {
            if (jitter_used) *jitter_used = jit;
            return L;
        }
    }
    throw NotPsd("cholesky_psd: factorization failed at jitter 1e-8");
}

CovarianceModel CovarianceModel::from_sigma(const Matrix& sigma0) {
    if (sigma0.rows() != sigma0.cols())
        throw Error("CovarianceModel: matrix not square");
    const double asym = (sigma0 - sigma0.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, sigma0.cwiseAbs().maxCoeff()))
        throw Error("CovarianceModel: matrix not symmetric");
    CovarianceModel m;
    m.sigma0 = 0.5 * (sigma0 + sigma0.transpose());
    m.chol = cholesky_psd(m.sigma0);
    m.lambda_max_sq = power_iteration_lambda_max(m.sigma0);
    m.max_entry = m.sigma0.cwiseAbs().maxCoeff();
    return m;
}

CovarianceModel CovarianceModel::identity(int p) {
    return from_sigma(Matrix::Identity(p, p));
}

DesignMatrix sample_gaussian_design(const CovarianceModel& model, int n, Rng& rng) {
    if (n < 1) throw Error("sample_gaussian_design: n must be >= 1");
    const int p = model.p();
    Matrix X(n, p);
    Vector z(p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) z(j) = rng.normal();
        X.row(i) = (model.chol * z).transpose();
    }
    return DesignMatrix(std::move(X));
}

double power_iteration_lambda_max(const Matrix& sym, double tol, int max_iter) {
    const int p = static_cast<int>(sym.rows());
    if (p == 0) return 0.0;
    // deterministic start biased toward the dominant column
    int jmax = 0;
    sym.cwiseAbs().colwise().sum().maxCoeff(&jmax);
    Vector v = Vector::Ones(p);
    v(jmax) += 1.0;
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vector w = sym * v;
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        w /= nw;
        const double next = w.dot(sym * w);
        if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
            return next;
        }
        lambda = next;
        v = w;
    }
    return lambda;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Matrix read_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            ++col;
            try {
                size_t pos = 0;
                const double v = std::stod(cell, &pos);
                while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
                if (pos != cell.size()) throw std::invalid_argument("trailing");
                row.push_back(v);
            } catch (const std::exception&) {
                throw ConfigError(path + ":" + std::to_string(lineno) + ":" +
                                  std::to_string(col) + ": not a number: '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": ragged row (expected " +
                              std::to_string(rows.front().size()) + " columns)");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError(path + ": empty matrix");
    Matrix m(rows.size(), rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows.front().size(); ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return m;
}

void write_csv_matrix(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

Vector read_csv_vector(const std::string& path) {
    Matrix m = read_csv_matrix(path);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    throw ConfigError(path + ": expected a single-column vector");
}

void write_csv_vector(const std::string& path, const Vector& v) {
    write_csv_matrix(path, v);
}

}  // namespace lassobounds
