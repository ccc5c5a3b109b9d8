#include "fracwest/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracwest::spectral {

std::vector<EigenPair> eigenpairs_dn(int count, const Mesh1D& mesh) {
    if (count < 1) throw std::invalid_argument("eigenpairs_dn: count must be >= 1");
    std::vector<EigenPair> out;
    out.reserve(count);
    for (int j = 1; j <= count; ++j) {
        EigenPair e;
        e.index = j;
        const double mu = (j - 0.5) * std::numbers::pi;
        e.lambda = mu * mu;
        e.phi.resize(mesh.n_nodes());
        for (int i = 0; i < mesh.n_nodes(); ++i)
            e.phi[i] = std::numbers::sqrt2 * std::sin(mu * mesh.nodes[i]);
        out.push_back(std::move(e));
    }
    return out;
}

std::complex<double> omega(std::complex<double> z, double lambda, double b, double c,
                           double beta_tilde) {
    return z * z + b * std::pow(lambda, beta_tilde) * z + c * c * lambda;
}

PolePair poles_and_residue(double lambda, double b, double c, double beta_tilde) {
    if (!(lambda > 0.0) || b < 0.0 || !(c > 0.0))
        throw std::invalid_argument("poles_and_residue: need lambda>0, b>=0, c>0");
    const double half_b = 0.5 * b * std::pow(lambda, beta_tilde);
    const std::complex<double> disc(half_b * half_b - c * c * lambda, 0.0);
    const std::complex<double> root = std::sqrt(disc);
    PolePair p;
    p.p_plus = -half_b + root;
    p.p_minus = -half_b - root;
    p.residue_plus = 0.5 / root;
    return p;
}

bool check_pole_separation(const std::vector<double>& lambdas, double b, double c,
                           double beta_tilde) {
    std::vector<PolePair> ps;
    ps.reserve(lambdas.size());
    for (double lam : lambdas) {
        const PolePair p = poles_and_residue(lam, b, c, beta_tilde);
        if (!std::isfinite(p.residue_plus.real()) || !std::isfinite(p.residue_plus.imag()) ||
            std::abs(p.residue_plus) < 1e-12)
            return false;
        ps.push_back(p);
    }
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (std::size_t j = i + 1; j < ps.size(); ++j)
            if (std::abs(ps[i].p_plus - ps[j].p_plus) <= 1e-10) return false;
    return true;
}

Excitation separable_excitation(const std::vector<double>& phi, const std::vector<double>& psi,
                                const std::vector<double>& psi_tt, const std::vector<double>& psi_frac,
                                const ModelParams& params, const Mesh1D& mesh, const TimeGrid& grid) {
    const int nn = mesh.n_nodes();
    const int nt = grid.n_steps + 1;
    if (static_cast<int>(phi.size()) != nn)
        throw std::invalid_argument("separable_excitation: phi size mismatch");
    if (static_cast<int>(psi.size()) != nt || static_cast<int>(psi_tt.size()) != nt)
        throw std::invalid_argument("separable_excitation: psi size mismatch");
    if (std::abs(phi[0]) > 1e-12)
        throw std::invalid_argument("separable_excitation: phi violates the Dirichlet condition");
    double max_tt = 0.0;
    for (double v : psi_tt) max_tt = std::max(max_tt, std::abs(v));
    if (std::abs(psi[0]) > 1e-14 ||
        std::abs(psi[1] - psi[0]) > 10.0 * grid.dt * grid.dt * (1.0 + max_tt))
        throw std::invalid_argument("separable_excitation: psi must satisfy psi(0)=psi'(0)=0");

    // A phi nodally via the consistent-mass solve M z = A phi (free nodes),
    // i.e. the discrete version of -phi''.
    const BandMatrix a = assemble_stiffness(mesh);
    const BandMatrix m = assemble_weighted_mass(mesh, CoeffField(nn, 1.0));
    std::vector<double> phi_free(phi.begin() + 1, phi.end());
    const auto aphi_free = solve_tridiagonal(m, band_mul(a, phi_free));
    std::vector<double> aphi(nn, 0.0);
    // Endpoint x=0: second-order one-sided estimate of -phi''.
    aphi[0] = -(2.0 * phi[0] - 5.0 * phi[1] + 4.0 * phi[2] - phi[3]) / (mesh.h * mesh.h);
    for (int i = 1; i < nn; ++i) aphi[i] = aphi_free[i - 1];

    // d_t^alpha psi: analytic samples when supplied, else I^{1-alpha} psi'
    // with psi' = I^1 psi''.
    std::vector<double> dfrac;
    if (!psi_frac.empty()) {
        if (static_cast<int>(psi_frac.size()) != nt)
            throw std::invalid_argument("separable_excitation: psi_frac size mismatch");
        dfrac = psi_frac;
    } else {
        std::vector<double> psi_t(nt, 0.0);
        for (int n = 1; n < nt; ++n)
            psi_t[n] = psi_t[n - 1] + 0.5 * grid.dt * (psi_tt[n - 1] + psi_tt[n]);
        const FracWeights w = FracWeights::build(grid, 1.0 - params.alpha);
        dfrac.resize(nt);
        for (int n = 0; n < nt; ++n) dfrac[n] = apply_full(w, psi_t, n);
    }

    Excitation e;
    e.n_nodes = nn;
    e.n_steps = grid.n_steps;
    e.samples.resize(static_cast<std::size_t>(nt) * nn);
    for (int n = 0; n < nt; ++n)
        for (int i = 0; i < nn; ++i)
            e.samples[static_cast<std::size_t>(n) * nn + i] =
                phi[i] * psi_tt[n] + aphi[i] * psi[n] + params.b_damp * aphi[i] * dfrac[n];
    return e;
}

std::complex<double> laplace_trapezoid(std::span<const double> samples, const TimeGrid& grid,
                                       std::complex<double> z) {
    std::complex<double> s = 0.0;
    const int nt = static_cast<int>(samples.size());
    for (int n = 0; n < nt; ++n) {
        const double w = (n == 0 || n == nt - 1) ? 0.5 * grid.dt : grid.dt;
        s += w * std::exp(-z * grid.t(n)) * samples[n];
    }
    return s;
}

namespace {

std::vector<double> second_difference(const std::vector<double>& f, double dt) {
    const int n = static_cast<int>(f.size());
    std::vector<double> d(n);
    for (int i = 1; i + 1 < n; ++i) d[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) / (dt * dt);
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (dt * dt);
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (dt * dt);
    return d;
}

} // namespace

std::vector<std::pair<std::complex<double>, double>> determinant_condition(
    const std::vector<double>& psi1, const std::vector<double>& psi2,
    const std::vector<std::complex<double>>& poles, const TimeGrid& grid) {
    const int nt = grid.n_steps + 1;
    if (static_cast<int>(psi1.size()) != nt || static_cast<int>(psi2.size()) != nt)
        throw std::invalid_argument("determinant_condition: sample size mismatch");
    for (const auto* psi : {&psi1, &psi2})
        if (std::abs(psi->back()) > 1e-8)
            throw std::runtime_error("determinant_condition: signal not decayed at the horizon; "
                                     "truncated Laplace transform unsafe");
    for (const auto& p : poles)
        if (p.real() > 0.0)
            throw std::invalid_argument("determinant_condition: pole with positive real part");

    auto sq = [&](const std::vector<double>& f) {
        std::vector<double> g(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) g[i] = f[i] * f[i];
        return g;
    };
    const auto d1 = second_difference(psi1, grid.dt);
    const auto d2 = second_difference(psi2, grid.dt);
    const auto q1 = second_difference(sq(psi1), grid.dt);
    const auto q2 = second_difference(sq(psi2), grid.dt);

    std::vector<std::pair<std::complex<double>, double>> out;
    out.reserve(poles.size());
    for (const auto& p : poles) {
        const auto a11 = laplace_trapezoid(d1, grid, p);
        const auto a12 = laplace_trapezoid(q1, grid, p);
        const auto a21 = laplace_trapezoid(d2, grid, p);
        const auto a22 = laplace_trapezoid(q2, grid, p);
        out.emplace_back(p, std::abs(a11 * a22 - a12 * a21));
    }
    return out;
}

} // namespace fracwest::spectral
