#include "fracwest/linalg.hpp"

#include "fracwest/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fracwest {

std::vector<double> mat_vec(const Matrix& m, std::span<const double> x) {
    if (static_cast<int>(x.size()) != m.cols) throw std::invalid_argument("mat_vec: size mismatch");
    std::vector<double> y(m.rows);
    for (int i = 0; i < m.rows; ++i)
        y[i] = kernels::dot(m.a.data() + static_cast<std::size_t>(i) * m.cols, x.data(), m.cols);
    return y;
}

std::vector<double> mat_tvec(const Matrix& m, std::span<const double> x) {
    if (static_cast<int>(x.size()) != m.rows) throw std::invalid_argument("mat_tvec: size mismatch");
    std::vector<double> y(m.cols, 0.0);
    for (int i = 0; i < m.rows; ++i)
        kernels::axpy(x[i], m.a.data() + static_cast<std::size_t>(i) * m.cols, y.data(), m.cols);
    return y;
}

std::vector<double> cholesky_solve(Matrix m, std::vector<double> rhs) {
    const int n = m.rows;
    if (m.cols != n || static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("cholesky_solve: shape mismatch");
    // Lower factor stored in place.
    for (int j = 0; j < n; ++j) {
        double d = m(j, j);
        for (int k = 0; k < j; ++k) d -= m(j, k) * m(j, k);
        if (!(d > 0.0)) throw std::runtime_error("cholesky_solve: matrix not positive definite");
        const double ljj = std::sqrt(d);
        m(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (int k = 0; k < j; ++k) s -= m(i, k) * m(j, k);
            m(i, j) = s / ljj;
        }
    }
    for (int i = 0; i < n; ++i) {
        double s = rhs[i];
        for (int k = 0; k < i; ++k) s -= m(i, k) * rhs[k];
        rhs[i] = s / m(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = rhs[i];
        for (int k = i + 1; k < n; ++k) s -= m(k, i) * rhs[k];
        rhs[i] = s / m(i, i);
    }
    return rhs;
}

SvdResult jacobi_svd(const Matrix& m) {
    const int rows = m.rows, cols = m.cols;
    // Work on columns of a copy; V accumulates the rotations.
    Matrix w = m;
    Matrix v(cols, cols);
    for (int j = 0; j < cols; ++j) v(j, j) = 1.0;

    auto col_dot = [&](const Matrix& x, int p, int q) {
        double s = 0.0;
        for (int i = 0; i < x.rows; ++i) s += x(i, p) * x(i, q);
        return s;
    };
    // With t the small root of t^2 + 2 tau t - 1 = 0 this convention zeroes
    // the (p,q) column inner product.
    auto rotate_cols = [](Matrix& x, int p, int q, double c, double s) {
        for (int i = 0; i < x.rows; ++i) {
            const double xp = x(i, p), xq = x(i, q);
            x(i, p) = c * xp - s * xq;
            x(i, q) = s * xp + c * xq;
        }
    };

    const int max_sweeps = 60;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < cols - 1; ++p) {
            for (int q = p + 1; q < cols; ++q) {
                const double apq = col_dot(w, p, q);
                const double app = col_dot(w, p, p);
                const double aqq = col_dot(w, q, q);
                // Threshold against the larger column: a rotation between
                // columns of very different size leaves a roundoff residual
                // of order eps * |p| * |q|, which never clears a threshold
                // relative to the geometric mean.
                if (std::abs(apq) <= 1e-15 * std::max(app, aqq)) continue;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                rotate_cols(w, p, q, c, s);
                rotate_cols(v, p, q, c, s);
                rotated = true;
            }
        }
        if (!rotated) break;
    }
    if (sweep == max_sweeps)
        throw std::runtime_error("jacobi_svd: sweep limit exceeded without convergence");

    std::vector<double> sigma(cols);
    for (int j = 0; j < cols; ++j) sigma[j] = std::sqrt(std::max(col_dot(w, j, j), 0.0));

    std::vector<int> order(cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return sigma[a] > sigma[b]; });

    SvdResult r;
    r.singular_values.resize(cols);
    r.u = Matrix(rows, cols);
    r.v = Matrix(cols, cols);
    for (int j = 0; j < cols; ++j) {
        const int src = order[j];
        const double sv = sigma[src];
        r.singular_values[j] = sv;
        for (int i = 0; i < cols; ++i) r.v(i, j) = v(i, src);
        if (sv > 0.0)
            for (int i = 0; i < rows; ++i) r.u(i, j) = w(i, src) / sv;
    }
    return r;
}

} // namespace fracwest
