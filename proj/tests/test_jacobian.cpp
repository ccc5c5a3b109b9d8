#include <doctest.h>

#include "fracwest/jacobian.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace fracwest;

namespace {

const double kPi = std::acos(-1.0);

double src_fn(double x, double t) {
    const double env = t < 0.25 ? 0.5 * (1.0 - std::cos(kPi * t / 0.25)) : 1.0;
    return -216.0 * std::exp(-std::pow((x - 0.05) / 0.03, 2)) * std::sin(4.0 * kPi * t) * env;
}

struct Setup {
    Mesh1D mesh;
    TimeGrid grid;
    ModelParams params;
    StateHistory background;
    std::vector<double> locs{0.1, 1.0};

    explicit Setup(int n_cells, int n_steps, double t_final = 2.0)
        : mesh(Mesh1D::uniform(n_cells)), grid{n_steps, t_final / n_steps} {
        params.alpha = 0.5;
        params.b_damp = 0.2;
        params.kappa.assign(mesh.n_nodes(), 0.0);
        params.slowness.assign(mesh.n_nodes(), 1.0);
        const auto src = Excitation::from_function(mesh, grid, src_fn);
        background = run_forward(params, src, mesh, grid);
    }
};

double ip_y(const JacobianMatrix& km, const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += km.row_weights[i] * a[i] * b[i];
    return s;
}

} // namespace

TEST_CASE("zero perturbation gives the zero linearized state") {
    const Setup s(20, 100, 1.0);
    const CoeffField z(s.mesh.n_nodes(), 0.0);
    const auto du = solve_linearized(s.background, z, z, s.params, s.mesh, s.grid);
    for (double v : du.u) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("solve_linearized is linear in the perturbation") {
    const Setup s(20, 100, 1.0);
    const int nn = s.mesh.n_nodes();
    CoeffField dk1(nn, 0.0), ds1(nn, 0.0), dk2(nn, 0.0), ds2(nn, 0.0);
    for (int i = 1; i < nn; ++i) {
        const double x = s.mesh.nodes[i];
        dk1[i] = std::sin(kPi * x);
        ds1[i] = x * x;
        dk2[i] = std::cos(2.0 * x);
        ds2[i] = std::exp(-x);
    }
    const auto a = solve_linearized(s.background, dk1, ds1, s.params, s.mesh, s.grid);
    const auto b = solve_linearized(s.background, dk2, ds2, s.params, s.mesh, s.grid);
    CoeffField dkc(nn), dsc(nn);
    for (int i = 0; i < nn; ++i) {
        dkc[i] = 2.0 * dk1[i] - 0.5 * dk2[i];
        dsc[i] = 2.0 * ds1[i] - 0.5 * ds2[i];
    }
    const auto c = solve_linearized(s.background, dkc, dsc, s.params, s.mesh, s.grid);
    double scale = 0.0;
    for (double v : c.u) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < c.u.size(); ++k)
        CHECK(std::abs(c.u[k] - (2.0 * a.u[k] - 0.5 * b.u[k])) < 1e-12 * (1.0 + scale));
}

TEST_CASE("directional derivative: Taylor remainder drops one order per epsilon decade") {
    const Setup s(50, 500);
    const int nn = s.mesh.n_nodes();
    CoeffField dk(nn, 0.0), ds(nn, 0.0);
    for (int i = 1; i < nn; ++i) {
        const double x = s.mesh.nodes[i];
        dk[i] = std::exp(-std::pow((x - 0.6) / 0.1, 2));
        ds[i] = 0.5 * std::exp(-std::pow((x - 0.4) / 0.15, 2));
    }
    const auto du = solve_linearized(s.background, dk, ds, s.params, s.mesh, s.grid);
    const auto tr_k = observe(du, s.mesh, s.locs);
    const auto tr_0 = observe(s.background, s.mesh, s.locs);
    const auto src = Excitation::from_function(s.mesh, s.grid, src_fn);

    std::vector<double> ratios;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        ModelParams p = s.params;
        for (int i = 0; i < nn; ++i) {
            p.kappa[i] = eps * dk[i];
            p.slowness[i] = 1.0 + eps * ds[i];
        }
        const auto tre = observe(run_forward(p, src, s.mesh, s.grid), s.mesh, s.locs);
        Trace rem = tre;
        for (std::size_t k = 0; k < rem.samples.size(); ++k)
            rem.samples[k] = tre.samples[k] - tr_0.samples[k] - eps * tr_k.samples[k];
        ratios.push_back(trace_norm(rem, s.grid) / (eps * trace_norm(tr_k, s.grid)));
    }
    CHECK(ratios[0] / ratios[1] > 5.0);
    CHECK(ratios[0] / ratios[1] < 20.0);
    CHECK(ratios[1] / ratios[2] > 5.0);
    CHECK(ratios[1] / ratios[2] < 20.0);
}

TEST_CASE("assembled matrix agrees with the linearized operator") {
    const Setup s(20, 100, 1.0);
    const auto km = assemble(s.background, s.params, s.mesh, s.grid, s.locs);
    CHECK(km.n_free == 20);
    CHECK(km.k.cols == 40);
    CHECK(km.k.rows == 2 * 101);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> p(2 * km.n_free);
    for (auto& v : p) v = d(rng);

    CoeffField dk(s.mesh.n_nodes(), 0.0), ds(s.mesh.n_nodes(), 0.0);
    for (int j = 0; j < km.n_free; ++j) {
        dk[j + 1] = p[j];
        ds[j + 1] = p[km.n_free + j];
    }
    const auto du = solve_linearized(s.background, dk, ds, s.params, s.mesh, s.grid);
    const auto tr = observe(du, s.mesh, s.locs);
    const auto kp = fracwest::apply(km, p);
    double scale = 0.0;
    for (double v : tr.samples) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < kp.size(); ++i)
        CHECK(std::abs(kp[i] - tr.samples[i]) < 1e-10 * (1.0 + scale));
}

TEST_CASE("adjoint identity <Kp, y>_Y = <p, K*y>_X on 20 random pairs") {
    const Setup s(20, 100, 1.0);
    const auto km = assemble(s.background, s.params, s.mesh, s.grid, s.locs);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> p(km.k.cols), y(km.k.rows);
        for (auto& v : p) v = d(rng);
        for (auto& v : y) v = d(rng);
        const auto kp = fracwest::apply(km, p);
        const auto kty = adjoint_apply(km, y);
        const double lhs = ip_y(km, kp, y);
        double rhs = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) rhs += p[i] * kty[i];
        CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
    }
    CHECK_THROWS_AS(adjoint_apply(km, std::vector<double>(3, 1.0)), std::invalid_argument);
}

TEST_CASE("single nonzero residual sample pulls out a weighted matrix row") {
    const Setup s(20, 50, 0.5);
    const auto km = assemble(s.background, s.params, s.mesh, s.grid, s.locs);
    std::vector<double> y(km.k.rows, 0.0);
    const int hit = 37;
    y[hit] = 2.0;
    const auto kty = adjoint_apply(km, y);
    for (int j = 0; j < km.k.cols; ++j)
        CHECK(kty[j] == doctest::Approx(2.0 * km.row_weights[hit] * km.k(hit, j)).epsilon(1e-14));
}

TEST_CASE("zero background means zero Jacobian") {
    const Mesh1D mesh = Mesh1D::uniform(10);
    const TimeGrid grid{50, 0.02};
    ModelParams p;
    p.kappa.assign(mesh.n_nodes(), 0.0);
    p.slowness.assign(mesh.n_nodes(), 1.0);
    StateHistory bg;
    bg.n_steps = grid.n_steps;
    bg.n_nodes = mesh.n_nodes();
    bg.u.assign(static_cast<std::size_t>(grid.n_steps + 1) * mesh.n_nodes(), 0.0);
    const std::vector<double> locs{0.1, 1.0};
    const auto km = assemble(bg, p, mesh, grid, locs);
    for (double v : km.k.a) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("assembly is deterministic") {
    const Setup s(10, 50, 0.5);
    const auto a = assemble(s.background, s.params, s.mesh, s.grid, s.locs);
    const auto b = assemble(s.background, s.params, s.mesh, s.grid, s.locs);
    CHECK(a.k.a == b.k.a);
    CHECK(a.row_weights == b.row_weights);
}

TEST_CASE("svd: diagonal example and weighted reconstruction") {
    Matrix d(3, 3);
    d(0, 0) = 2.0;
    d(1, 1) = 3.0;
    d(2, 2) = 1.0;
    const auto r = jacobi_svd(d);
    REQUIRE(r.singular_values.size() == 3);
    CHECK(r.singular_values[0] == doctest::Approx(3.0));
    CHECK(r.singular_values[1] == doctest::Approx(2.0));
    CHECK(r.singular_values[2] == doctest::Approx(1.0));

    const Setup s(10, 50, 0.5);
    const auto km = assemble(s.background, s.params, s.mesh, s.grid, s.locs);
    const auto sv = svd(km);
    // Reconstruction against the row-weighted matrix the SVD factors.
    Matrix kw = km.k;
    double fro = 0.0;
    for (int i = 0; i < kw.rows; ++i)
        for (int j = 0; j < kw.cols; ++j) {
            kw(i, j) *= std::sqrt(km.row_weights[i]);
            fro += kw(i, j) * kw(i, j);
        }
    fro = std::sqrt(fro);
    double err = 0.0;
    for (int i = 0; i < kw.rows; ++i)
        for (int j = 0; j < kw.cols; ++j) {
            double uv = 0.0;
            for (std::size_t r2 = 0; r2 < sv.singular_values.size(); ++r2)
                uv += sv.u(i, static_cast<int>(r2)) * sv.singular_values[r2] *
                      sv.v(j, static_cast<int>(r2));
            err += (uv - kw(i, j)) * (uv - kw(i, j));
        }
    CHECK(std::sqrt(err) <= 1e-8 * fro);
}
