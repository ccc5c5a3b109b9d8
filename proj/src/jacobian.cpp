#include "fracwest/jacobian.hpp"

#include "fracwest/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace fracwest {

StateHistory solve_linearized(const StateHistory& background, const CoeffField& dkappa,
                              const CoeffField& dslow, const ModelParams& params, const Mesh1D& mesh,
                              const TimeGrid& grid) {
    if (background.n_nodes != mesh.n_nodes() || background.n_steps != grid.n_steps)
        throw std::invalid_argument("solve_linearized: background grid mismatch");
    if (static_cast<int>(dkappa.size()) != mesh.n_nodes() ||
        static_cast<int>(dslow.size()) != mesh.n_nodes())
        throw std::invalid_argument("solve_linearized: perturbation size mismatch");

    const int nn = mesh.n_nodes();
    const int nf = mesh.n_free();
    CoeffField frozen(nn, 1.0); // linearization point slowness = 1, kappa = 0
    // Integrated right-hand side G = -(dslow u0 - dkappa u0^2)_t. Assembled
    // as the exact parameter derivative of the discrete step: the weighted
    // mass built from dslow - 2 dkappa u0bar (u0bar the same extrapolated
    // coefficient state the forward stepper freezes at) applied to the
    // backward difference quotient of the background.
    CoeffField pert(nn);
    std::vector<double> du0(nf);
    auto g_load = [&](int m, std::vector<double>& out) {
        const int n = m - 1;
        for (int i = 0; i < nn; ++i) {
            const double ubar = (n == 0) ? background.at(0, i)
                                         : 1.5 * background.at(n, i) - 0.5 * background.at(n - 1, i);
            pert[i] = dslow[i] - 2.0 * dkappa[i] * ubar;
        }
        const BandMatrix mp = assemble_weighted_mass(mesh, pert);
        for (int i = 0; i < nf; ++i)
            du0[i] = (background.at(m, i + 1) - background.at(n, i + 1)) / grid.dt;
        const auto mv = band_mul(mp, du0);
        for (int i = 0; i < nf; ++i) out[i] = -mv[i];
    };
    return run_linear_integrated(frozen, params.b_damp, params.alpha, g_load, mesh, grid);
}

JacobianMatrix assemble(const StateHistory& background, const ModelParams& params, const Mesh1D& mesh,
                        const TimeGrid& grid, std::span<const double> locations) {
    const int nf = mesh.n_free();
    const int nt = grid.n_steps + 1;
    const int n_loc = static_cast<int>(locations.size());

    JacobianMatrix jm;
    jm.locations.assign(locations.begin(), locations.end());
    jm.n_steps = grid.n_steps;
    jm.n_free = nf;
    jm.k = Matrix(n_loc * nt, 2 * nf);
    jm.row_weights.resize(static_cast<std::size_t>(n_loc) * nt);
    for (int l = 0; l < n_loc; ++l)
        for (int n = 0; n < nt; ++n)
            jm.row_weights[static_cast<std::size_t>(l) * nt + n] =
                (n == 0 || n == nt - 1) ? 0.5 * grid.dt : grid.dt;

    // Each column is an independent linearized solve; order is fixed.
    for (int j = 0; j < 2 * nf; ++j) {
        CoeffField dkappa(mesh.n_nodes(), 0.0), dslow(mesh.n_nodes(), 0.0);
        if (j < nf)
            dkappa[j + 1] = 1.0; // free node j+1
        else
            dslow[j - nf + 1] = 1.0;
        const StateHistory du = solve_linearized(background, dkappa, dslow, params, mesh, grid);
        const Trace tr = observe(du, mesh, locations);
        for (int l = 0; l < n_loc; ++l)
            for (int n = 0; n < nt; ++n)
                jm.k(l * nt + n, j) = tr.at(l, n);
    }
    return jm;
}

std::vector<double> apply(const JacobianMatrix& kmat, std::span<const double> p) {
    return mat_vec(kmat.k, p);
}

std::vector<double> adjoint_apply(const JacobianMatrix& kmat, std::span<const double> residual) {
    if (residual.size() != kmat.row_weights.size())
        throw std::invalid_argument("adjoint_apply: residual size mismatch");
    std::vector<double> weighted(residual.size());
    for (std::size_t i = 0; i < residual.size(); ++i) weighted[i] = kmat.row_weights[i] * residual[i];
    return mat_tvec(kmat.k, weighted);
}

SvdResult svd(const JacobianMatrix& kmat) {
    Matrix kw = kmat.k;
    for (int i = 0; i < kw.rows; ++i) {
        const double s = std::sqrt(kmat.row_weights[i]);
        for (int j = 0; j < kw.cols; ++j) kw(i, j) *= s;
    }
    return jacobi_svd(kw);
}

Matrix normal_matrix(const JacobianMatrix& kmat) {
    const int nc = kmat.k.cols;
    Matrix g(nc, nc);
    for (int i = 0; i < kmat.k.rows; ++i) {
        const double w = kmat.row_weights[i];
        const double* row = kmat.k.a.data() + static_cast<std::size_t>(i) * nc;
        for (int p = 0; p < nc; ++p) {
            const double wp = w * row[p];
            if (wp == 0.0) continue;
            kernels::axpy(wp, row, g.a.data() + static_cast<std::size_t>(p) * nc, nc);
        }
    }
    return g;
}

} // namespace fracwest
