#pragma once

#include <span>
#include <vector>

namespace fracwest {

/// Row-major dense matrix.
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

std::vector<double> mat_vec(const Matrix& m, std::span<const double> x);
std::vector<double> mat_tvec(const Matrix& m, std::span<const double> x); // m' x

/// Solves the SPD system in place via Cholesky. Throws if a pivot is not
/// positive.
std::vector<double> cholesky_solve(Matrix m, std::vector<double> rhs);

struct SvdResult {
    std::vector<double> singular_values; // nonincreasing
    Matrix u;                            // rows x k, left vectors in columns
    Matrix v;                            // cols x k, right vectors in columns
};

/// One-sided Jacobi SVD (deterministic cyclic sweeps). Intended for tall
/// matrices with at most a few hundred columns.
SvdResult jacobi_svd(const Matrix& m);

} // namespace fracwest
