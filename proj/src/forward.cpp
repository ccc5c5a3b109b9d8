#include "fracwest/forward.hpp"

#include "fracwest/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace fracwest {

namespace {

void validate_field(const CoeffField& f, const Mesh1D& mesh, const char* name) {
    if (static_cast<int>(f.size()) != mesh.n_nodes())
        throw std::invalid_argument(std::string(name) + ": size does not match mesh");
    for (double v : f)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + ": non-finite entry");
}

// Shared stepping core. coeff_at fills the nodal u_t coefficient for the step
// to t_{n+1} (given the extrapolated state) and rhs_at fills the assembled
// free-node load of the time-integrated right-hand side averaged over the
// step to t_{n+1} (the Crank-Nicolson midpoint value).
StateHistory run_integrated(const std::function<void(int, std::span<const double>, std::span<const double>,
                                                     std::vector<double>&)>& coeff_at,
                            const std::function<void(int, std::vector<double>&)>& rhs_at,
                            double coeff_floor, double b_damp, double alpha, const Mesh1D& mesh,
                            const TimeGrid& grid) {
    const int nn = mesh.n_nodes();
    const int nf = mesh.n_free();
    const int ns = grid.n_steps;
    const double dt = grid.dt;

    const BandMatrix stiff = assemble_stiffness(mesh);
    const FracWeights w_frac = FracWeights::build(grid, 1.0 - alpha);
    const FracWeights w_one = FracWeights::build(grid, 1.0);

    StateHistory hist;
    hist.n_steps = ns;
    hist.n_nodes = nn;
    hist.u.assign(static_cast<std::size_t>(ns + 1) * nn, 0.0);

    // Free-node history, rows contiguous for the convolution axpy sweep.
    std::vector<double> ufree(static_cast<std::size_t>(ns + 1) * nf, 0.0);
    auto free_row = [&](int n) { return ufree.data() + static_cast<std::size_t>(n) * nf; };

    std::vector<double> coeff(nn), hist_frac(nf), hist_one(nf), rhs(nf);
    // Full convolutions (implicit weight folded in) at the previous time level;
    // averaging them with the new level gives the Crank-Nicolson midpoint.
    std::vector<double> conv_frac_prev(nf, 0.0), conv_one_prev(nf, 0.0);
    BandMatrix lhs(nf);

    for (int n = 0; n < ns; ++n) {
        const int m = n + 1;
        coeff_at(n, hist.row(n), hist.row(std::max(n - 1, 0)), coeff);
        double cmin = coeff[0];
        for (double v : coeff) cmin = std::min(cmin, v);
        hist.min_coeff = std::min(hist.min_coeff, cmin);
        if (cmin < coeff_floor)
            throw SolverError("forward run degenerate: u_t coefficient " + std::to_string(cmin) +
                                  " below floor " + std::to_string(coeff_floor),
                              m);

        const BandMatrix mw = assemble_weighted_mass(mesh, coeff);
        const double c_imp =
            0.5 * (b_damp * w_frac.implicit_weight(m) + w_one.implicit_weight(m));
        for (int i = 0; i < nf; ++i) lhs.diag[i] = mw.diag[i] / dt + c_imp * stiff.diag[i];
        for (int i = 0; i + 1 < nf; ++i) {
            lhs.sub[i] = mw.sub[i] / dt + c_imp * stiff.sub[i];
            lhs.sup[i] = mw.sup[i] / dt + c_imp * stiff.sup[i];
        }

        // Explicit convolution history at t_m (samples 0..n).
        std::fill(hist_frac.begin(), hist_frac.end(), 0.0);
        std::fill(hist_one.begin(), hist_one.end(), 0.0);
        const auto row_f = w_frac.row(m);
        const auto row_o = w_one.row(m);
        for (int k = 1; k <= n; ++k) { // row 0 is identically zero state
            kernels::axpy(b_damp * row_f[k], free_row(k), hist_frac.data(), nf);
            kernels::axpy(row_o[k], free_row(k), hist_one.data(), nf);
        }
        // Midpoint average of the explicit part with the full previous-level
        // value; the explicit part is kept as the base of the t_m value.
        for (int i = 0; i < nf; ++i) {
            const double ef = hist_frac[i];
            const double eo = hist_one[i];
            hist_frac[i] = 0.5 * (ef + conv_frac_prev[i]);
            hist_one[i] = 0.5 * (eo + conv_one_prev[i]);
            conv_frac_prev[i] = ef;
            conv_one_prev[i] = eo;
        }

        rhs_at(m, rhs);
        const auto au_frac = band_mul(stiff, hist_frac);
        const auto au_one = band_mul(stiff, hist_one);
        const auto mu = band_mul(mw, std::span<const double>(free_row(n), static_cast<std::size_t>(nf)));
        for (int i = 0; i < nf; ++i) rhs[i] += mu[i] / dt - au_frac[i] - au_one[i];

        std::vector<double> next;
        try {
            next = solve_tridiagonal(lhs, rhs);
        } catch (const std::runtime_error& e) {
            throw SolverError(e.what(), m);
        }
        std::copy(next.begin(), next.end(), free_row(m));
        double* full = hist.u.data() + static_cast<std::size_t>(m) * nn;
        full[0] = 0.0;
        std::copy(next.begin(), next.end(), full + 1);

        // Complete the full convolutions at t_m: explicit part (stashed above)
        // plus the implicit contribution of the just-computed state.
        kernels::axpy(b_damp * w_frac.implicit_weight(m), free_row(m), conv_frac_prev.data(), nf);
        kernels::axpy(w_one.implicit_weight(m), free_row(m), conv_one_prev.data(), nf);
    }
    return hist;
}

} // namespace

Excitation Excitation::from_function(const Mesh1D& mesh, const TimeGrid& grid,
                                     const std::function<double(double, double)>& f) {
    Excitation e;
    e.n_nodes = mesh.n_nodes();
    e.n_steps = grid.n_steps;
    e.samples.resize(static_cast<std::size_t>(grid.n_steps + 1) * e.n_nodes);
    for (int n = 0; n <= grid.n_steps; ++n)
        for (int i = 0; i < e.n_nodes; ++i)
            e.samples[static_cast<std::size_t>(n) * e.n_nodes + i] = f(mesh.nodes[i], grid.t(n));
    return e;
}

StateHistory run_forward(const ModelParams& params, const Excitation& src, const Mesh1D& mesh,
                         const TimeGrid& grid) {
    validate_field(params.kappa, mesh, "kappa");
    validate_field(params.slowness, mesh, "slowness");
    if (!(params.alpha > 0.0 && params.alpha < 1.0))
        throw std::invalid_argument("run_forward: alpha must lie in (0,1)");
    if (params.b_damp < 0.0) throw std::invalid_argument("run_forward: b_damp must be >= 0");
    if (src.n_nodes != mesh.n_nodes() || src.n_steps != grid.n_steps)
        throw std::invalid_argument("run_forward: excitation grid mismatch");

    const double s_min = *std::min_element(params.slowness.begin(), params.slowness.end());
    if (!(s_min > 0.0)) throw std::invalid_argument("run_forward: slowness must be positive");

    const int nn = mesh.n_nodes();

    // Running trapezoid of the source, per node: (I^1 r)(t_m), averaged over
    // the step for the Crank-Nicolson midpoint.
    std::vector<double> src_int(nn, 0.0), g_mid(nn);
    int src_level = 0;
    auto rhs_at = [&](int m, std::vector<double>& out) {
        while (src_level < m) {
            for (int i = 0; i < nn; ++i) {
                const double prev = src_int[i];
                src_int[i] += 0.5 * grid.dt * (src.at(src_level, i) + src.at(src_level + 1, i));
                g_mid[i] = 0.5 * (prev + src_int[i]);
            }
            ++src_level;
        }
        out = assemble_load(mesh, g_mid);
    };

    auto coeff_at = [&](int n, std::span<const double> un, std::span<const double> unm1,
                        std::vector<double>& out) {
        for (int i = 0; i < nn; ++i) {
            const double ub = (n == 0) ? un[i] : 1.5 * un[i] - 0.5 * unm1[i];
            out[i] = params.slowness[i] - 2.0 * params.kappa[i] * ub;
        }
    };

    return run_integrated(coeff_at, rhs_at, 0.1 * s_min, params.b_damp, params.alpha, mesh, grid);
}

StateHistory run_linear_integrated(const CoeffField& coeff, double b_damp, double alpha,
                                   const std::function<void(int, std::vector<double>&)>& g_nodal,
                                   const Mesh1D& mesh, const TimeGrid& grid) {
    validate_field(coeff, mesh, "coeff");
    const double c_min = *std::min_element(coeff.begin(), coeff.end());
    if (!(c_min > 0.0)) throw std::invalid_argument("run_linear_integrated: coefficient must be positive");
    auto coeff_at = [&](int, std::span<const double>, std::span<const double>, std::vector<double>& out) {
        out = coeff;
    };
    return run_integrated(coeff_at, g_nodal, 0.0, b_damp, alpha, mesh, grid);
}

Trace observe(const StateHistory& history, const Mesh1D& mesh, std::span<const double> locations) {
    Trace tr;
    tr.locations.assign(locations.begin(), locations.end());
    tr.n_steps = history.n_steps;
    tr.samples.resize(locations.size() * static_cast<std::size_t>(history.n_steps + 1));
    for (std::size_t l = 0; l < locations.size(); ++l) {
        const int idx = mesh.node_index(locations[l]);
        for (int n = 0; n <= history.n_steps; ++n)
            tr.samples[l * (history.n_steps + 1) + n] = history.at(n, idx);
    }
    return tr;
}

double energy_e0(const StateHistory& history, const ModelParams& params, const Mesh1D& mesh,
                 const TimeGrid& grid, int n) {
    if (n < 1 || n > history.n_steps - 1)
        throw std::invalid_argument("energy_e0: need 1 <= n <= n_steps-1 for central differences");
    const int nf = mesh.n_free();
    std::vector<double> ut(nf), u(nf);
    for (int i = 0; i < nf; ++i) {
        ut[i] = (history.at(n + 1, i + 1) - history.at(n - 1, i + 1)) / (2.0 * grid.dt);
        u[i] = history.at(n, i + 1);
    }
    const BandMatrix ms = assemble_weighted_mass(mesh, params.slowness);
    const BandMatrix a = assemble_stiffness(mesh);
    const auto m_ut = band_mul(ms, ut);
    const auto a_u = band_mul(a, u);
    double e = 0.0;
    for (int i = 0; i < nf; ++i) e += ut[i] * m_ut[i] + u[i] * a_u[i];
    return 0.5 * e;
}

double trace_norm(const Trace& tr, const TimeGrid& grid) {
    double s = 0.0;
    const int nt = tr.n_samples();
    for (std::size_t l = 0; l < tr.locations.size(); ++l)
        for (int n = 0; n < nt; ++n) {
            const double w = (n == 0 || n == nt - 1) ? 0.5 * grid.dt : grid.dt;
            const double v = tr.samples[l * nt + n];
            s += w * v * v;
        }
    return std::sqrt(s);
}

} // namespace fracwest
