#include "mtfl/core/linalg.hpp"

#include <cmath>
#include <cstddef>

#include "mtfl/core/error.hpp"
#include "mtfl/core/rng.hpp"
#include "mtfl/kernels/kernels.hpp"

namespace mtfl::linalg {

Matrix matmul(const Matrix &a, const Matrix &b) {
    if (a.cols() != b.rows())
        throw SolverError("matmul: inner dimensions disagree");
    Matrix c(a.rows(), b.cols());
    kernels::gemm_nn(a.rows(), a.cols(), b.cols(), a.data(), a.cols(), b.data(), b.cols(), 0.0,
                     c.data(), c.cols());
    return c;
}

Matrix matmul_tn(const Matrix &a, const Matrix &b) {
    if (a.rows() != b.rows())
        throw SolverError("matmul_tn: inner dimensions disagree");
    Matrix c(a.cols(), b.cols());
    kernels::gemm_tn(a.cols(), a.rows(), b.cols(), a.data(), a.cols(), b.data(), b.cols(), 0.0,
                     c.data(), c.cols());
    return c;
}

double frob_sq(const Matrix &m) { return kernels::sum_sq(m.data(), m.size()); }

double l21_norm(const Matrix &m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        acc += std::sqrt(kernels::sum_sq(m.row(i).data(), m.cols()));
    return acc;
}

double sum_abs(const Matrix &m) { return kernels::sum_abs(m.data(), m.size()); }

namespace {

// In-place lower Cholesky; a must be square SPD.
void cholesky_factor(Matrix &a) {
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j) - kernels::sum_sq(a.row(j).data(), j);
        if (diag <= 0.0)
            throw SolverError("cholesky: matrix not positive definite");
        diag = std::sqrt(diag);
        a(j, j) = diag;
        for (std::size_t i = j + 1; i < n; ++i) {
            const double s = kernels::dot(a.row(i).data(), a.row(j).data(), j);
            a(i, j) = (a(i, j) - s) / diag;
        }
    }
}

void cholesky_solve_inplace(const Matrix &l, std::vector<double> &x) {
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const double s = kernels::dot(l.row(i).data(), x.data(), i);
        x[i] = (x[i] - s) / l(i, i);
    }
    for (std::size_t ii = n; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j)
            s -= l(j, i) * x[j];
        x[i] = s / l(i, i);
    }
}

} // namespace

std::vector<double> cholesky_solve(Matrix a, std::span<const double> b) {
    if (a.rows() != a.cols() || a.rows() != b.size())
        throw SolverError("cholesky_solve: shape mismatch");
    cholesky_factor(a);
    std::vector<double> x(b.begin(), b.end());
    cholesky_solve_inplace(a, x);
    return x;
}

Matrix cholesky_solve(Matrix a, const Matrix &b) {
    if (a.rows() != a.cols() || a.rows() != b.rows())
        throw SolverError("cholesky_solve: shape mismatch");
    cholesky_factor(a);
    Matrix x(b.rows(), b.cols());
    std::vector<double> col(b.rows());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            col[i] = b(i, j);
        cholesky_solve_inplace(a, col);
        x.set_col(j, col);
    }
    return x;
}

double spectral_norm_xtx(const Matrix &x, int max_iter, double rel_tol) {
    const std::size_t d = x.cols();
    if (d == 0 || x.rows() == 0)
        return 0.0;
    Rng rng(0x5eed0f12ULL);
    Matrix v(d, 1);
    for (std::size_t i = 0; i < d; ++i)
        v(i, 0) = rng.normal();
    double norm = std::sqrt(frob_sq(v));
    if (norm == 0.0)
        return 0.0;
    for (std::size_t i = 0; i < d; ++i)
        v(i, 0) /= norm;

    double eig = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Matrix xv = matmul(x, v);
        Matrix w = matmul_tn(x, xv); // X^T X v
        const double new_eig = kernels::dot(w.data(), v.data(), d);
        const double wnorm = std::sqrt(frob_sq(w));
        if (wnorm == 0.0)
            return 0.0;
        for (std::size_t i = 0; i < d; ++i)
            v(i, 0) = w(i, 0) / wnorm;
        if (it > 0 && std::fabs(new_eig - eig) <= rel_tol * std::fabs(new_eig)) {
            eig = new_eig;
            break;
        }
        eig = new_eig;
    }
    return std::fabs(eig);
}

} // namespace mtfl::linalg
