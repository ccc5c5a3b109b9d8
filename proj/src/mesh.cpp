#include "fracwest/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace fracwest {

Mesh1D Mesh1D::uniform(int n_cells) {
    if (n_cells <= 0 || n_cells % 10 != 0)
        throw std::invalid_argument("Mesh1D: n_cells must be a positive multiple of 10");
    Mesh1D m;
    m.n_cells = n_cells;
    m.h = 1.0 / n_cells;
    m.nodes.resize(n_cells + 1);
    for (int i = 0; i <= n_cells; ++i) m.nodes[i] = i * m.h;
    m.nodes.back() = 1.0;
    return m;
}

int Mesh1D::node_index(double x) const {
    const double idx = x / h;
    const int i = static_cast<int>(std::lround(idx));
    if (i < 0 || i > n_cells || std::abs(idx - i) > 1e-9)
        throw std::invalid_argument("Mesh1D: coordinate is not a grid node");
    return i;
}

BandMatrix assemble_stiffness(const Mesh1D& mesh) {
    const int n = mesh.n_free();
    const double inv_h = 1.0 / mesh.h;
    BandMatrix a(n);
    // Element (k, k+1) contributes inv_h * [[1,-1],[-1,1]]; node 0 row/col dropped.
    for (int i = 0; i < n; ++i) a.diag[i] = 2.0 * inv_h;
    a.diag[n - 1] = inv_h; // half support at the Neumann node
    for (int i = 0; i + 1 < n; ++i) {
        a.sub[i] = -inv_h;
        a.sup[i] = -inv_h;
    }
    return a;
}

BandMatrix assemble_weighted_mass(const Mesh1D& mesh, const CoeffField& w) {
    if (static_cast<int>(w.size()) != mesh.n_nodes())
        throw std::invalid_argument("assemble_weighted_mass: field size mismatch");
    for (double v : w)
        if (!std::isfinite(v))
            throw std::invalid_argument("assemble_weighted_mass: non-finite coefficient");

    const int n = mesh.n_free();
    const double h = mesh.h;
    BandMatrix m(n);
    // Exact integrals of products of linears on element (k, k+1) with
    // w = w_k (1-s) + w_{k+1} s:
    //   int w N0 N0 = h (w_k/4  + w_{k+1}/12)
    //   int w N0 N1 = h (w_k/12 + w_{k+1}/12)
    //   int w N1 N1 = h (w_k/12 + w_{k+1}/4)
    for (int k = 0; k < mesh.n_cells; ++k) {
        const double wl = w[k], wr = w[k + 1];
        const double m00 = h * (wl / 4.0 + wr / 12.0);
        const double m01 = h * (wl + wr) / 12.0;
        const double m11 = h * (wl / 12.0 + wr / 4.0);
        const int il = k - 1, ir = k; // free-node indices of nodes k, k+1
        if (il >= 0) {
            m.diag[il] += m00;
            m.sub[il] += m01;
            m.sup[il] += m01;
        }
        m.diag[ir] += m11;
    }
    return m;
}

std::vector<double> solve_tridiagonal(const BandMatrix& m, std::span<const double> rhs) {
    const int n = m.size();
    if (static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("solve_tridiagonal: size mismatch");

    double max_diag = 0.0;
    for (double d : m.diag) max_diag = std::max(max_diag, std::abs(d));
    const double pivot_floor = 1e-14 * max_diag;

    std::vector<double> c(n - 1), x(rhs.begin(), rhs.end());
    double piv = m.diag[0];
    if (std::abs(piv) <= pivot_floor)
        throw std::runtime_error("solve_tridiagonal: singular pivot at row 0");
    if (n > 1) c[0] = m.sup[0] / piv;
    x[0] /= piv;
    for (int i = 1; i < n; ++i) {
        piv = m.diag[i] - m.sub[i - 1] * c[i - 1];
        if (std::abs(piv) <= pivot_floor)
            throw std::runtime_error("solve_tridiagonal: singular pivot at row " + std::to_string(i));
        if (i < n - 1) c[i] = m.sup[i] / piv;
        x[i] = (x[i] - m.sub[i - 1] * x[i - 1]) / piv;
    }
    for (int i = n - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
    return x;
}

std::vector<double> band_mul(const BandMatrix& m, std::span<const double> x) {
    const int n = m.size();
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("band_mul: size mismatch");
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        double s = m.diag[i] * x[i];
        if (i > 0) s += m.sub[i - 1] * x[i - 1];
        if (i + 1 < n) s += m.sup[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

std::vector<double> assemble_load(const Mesh1D& mesh, std::span<const double> g) {
    if (static_cast<int>(g.size()) != mesh.n_nodes())
        throw std::invalid_argument("assemble_load: size mismatch");
    const double h = mesh.h;
    std::vector<double> f(mesh.n_free(), 0.0);
    // int g N0 = h (g_k/3 + g_{k+1}/6), int g N1 = h (g_k/6 + g_{k+1}/3).
    for (int k = 0; k < mesh.n_cells; ++k) {
        const double gl = g[k], gr = g[k + 1];
        if (k >= 1) f[k - 1] += h * (gl / 3.0 + gr / 6.0);
        f[k] += h * (gl / 6.0 + gr / 3.0);
    }
    return f;
}

} // namespace fracwest
