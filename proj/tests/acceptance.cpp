// Acceptance gate: one PASS/FAIL line per criterion, exit 1 if any fail.
// Criteria are checked literally; a known-unattainable check is reported as a
// FAIL with its measured numbers rather than weakened.

#include "fracwest/experiment.hpp"
#include "fracwest/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace fracwest;

namespace {

const double kPi = std::numbers::pi;

int failures = 0;

void report(int id, bool pass, const std::string& text, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", id, text.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ModelParams linear_params(const Mesh1D& mesh, double alpha, double b) {
    ModelParams p;
    p.alpha = alpha;
    p.b_damp = b;
    p.kappa.assign(mesh.n_nodes(), 0.0);
    p.slowness.assign(mesh.n_nodes(), 1.0);
    return p;
}

double abel_monomial(double beta, int m, double t) {
    return std::tgamma(m + 1.0) / std::tgamma(m + 1.0 + beta) * std::pow(t, m + beta);
}

// 1. Fractional quadrature exactness and order.
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const TimeGrid g{100, 0.01};
    const auto w = FracWeights::build(g, 0.5);
    std::vector<double> ones(g.n_steps + 1, 1.0), lin(g.n_steps + 1);
    for (int n = 0; n <= g.n_steps; ++n) lin[n] = g.t(n);
    const double i_one = apply_full(w, ones, g.n_steps);
    const double i_lin = apply_full(w, lin, g.n_steps);
    const double e1 = std::abs(i_one - 2.0 / std::sqrt(kPi));
    const double e2 = std::abs(i_lin - 4.0 / (3.0 * std::sqrt(kPi)));

    std::vector<double> errs;
    for (int ns : {100, 200, 400}) {
        const TimeGrid gg{ns, 1.0 / ns};
        const auto ww = FracWeights::build(gg, 0.5);
        std::vector<double> sq(ns + 1);
        for (int n = 0; n <= ns; ++n) sq[n] = gg.t(n) * gg.t(n);
        double emax = 0.0;
        for (int n = 1; n <= ns; ++n)
            emax = std::max(emax, std::abs(apply_full(ww, sq, n) - abel_monomial(0.5, 2, gg.t(n))));
        errs.push_back(emax);
    }
    const double p1 = std::log2(errs[0] / errs[1]);
    const double p2 = std::log2(errs[1] / errs[2]);
    const double secs = elapsed_s(t0);
    const bool pass = e1 < 1e-12 && e2 < 1e-12 && p1 >= 1.9 && p2 >= 1.9 && secs < 1.0;
    report(1, pass, "fractional quadrature exact on 1, t; order >= 1.9 on t^2",
           fmt("errs %.1e/%.1e, orders %.2f", e1, e2, std::min(p1, p2)) +
               fmt(", %.2f s", secs));
}

// 2. Manufactured solution temporal order.
void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    const double alpha = 0.5, b = 0.2;
    const double lam = (kPi / 2.0) * (kPi / 2.0);
    const double g3ma = std::tgamma(3.0 - alpha);
    std::vector<double> errs;
    for (int ns : {40, 80, 160}) {
        const Mesh1D mesh = Mesh1D::uniform(ns);
        const TimeGrid grid{ns, 1.0 / ns};
        const ModelParams p = linear_params(mesh, alpha, b);
        const auto src = Excitation::from_function(mesh, grid, [&](double x, double t) {
            const double phi = std::sin(kPi * x / 2.0);
            return phi * (2.0 + lam * t * t + b * lam * (2.0 / g3ma) * std::pow(t, 2.0 - alpha));
        });
        const auto hist = run_forward(p, src, mesh, grid);
        double err = 0.0;
        for (int i = 0; i < mesh.n_nodes(); ++i)
            err = std::max(err, std::abs(hist.at(ns, i) - std::sin(kPi * mesh.nodes[i] / 2.0)));
        errs.push_back(err);
    }
    const double p01 = std::log2(errs[0] / errs[1]);
    const double p12 = std::log2(errs[1] / errs[2]);
    const double secs = elapsed_s(t0);
    const bool pass = p01 >= 1.5 && p12 >= 1.5 && secs < 30.0;
    report(2, pass, "manufactured solution temporal order p >= 1.5",
           fmt("orders %.2f, %.2f", p01, p12) + fmt(", %.1f s", secs));
}

// 3. Energy diagnostics. The damped sub-check is stated as per-step
// monotonicity of E0 to 1e-6 relative; the fractional memory term returns
// energy in small converged ripples, so that part fails and is reported with
// the measured worst increase.
void criterion_3() {
    const Mesh1D mesh = Mesh1D::uniform(50);
    const TimeGrid grid{800, 0.0025};
    const auto src = Excitation::from_function(mesh, grid, [](double x, double t) {
        if (t >= 0.5) return 0.0;
        const double s = std::sin(kPi * t / 0.5);
        return 40.0 * std::exp(-std::pow((x - 0.05) / 0.05, 2)) * s * s;
    });
    const int n_on = static_cast<int>(0.5 / grid.dt);

    const ModelParams pu = linear_params(mesh, 0.5, 0.0);
    const auto hu = run_forward(pu, src, mesh, grid);
    double e_min = 1e300, e_max = 0.0;
    for (int n = n_on + 10; n < grid.n_steps; ++n) {
        const double e = energy_e0(hu, pu, mesh, grid, n);
        e_min = std::min(e_min, e);
        e_max = std::max(e_max, e);
    }
    const double drift = (e_max - e_min) / e_max;

    const ModelParams pd = linear_params(mesh, 0.5, 0.2);
    const auto hd = run_forward(pd, src, mesh, grid);
    double prev = energy_e0(hd, pd, mesh, grid, n_on + 10);
    double worst_rel_increase = -1e300;
    for (int n = n_on + 11; n < grid.n_steps; ++n) {
        const double e = energy_e0(hd, pd, mesh, grid, n);
        worst_rel_increase = std::max(worst_rel_increase, (e - prev) / prev);
        prev = e;
    }
    const bool undamped_ok = drift < 0.01;
    const bool damped_ok = worst_rel_increase <= 1e-6;
    report(3, undamped_ok && damped_ok,
           "energy: undamped drift < 1%; damped E0 per-step nonincreasing to 1e-6",
           fmt("drift %.2e; worst damped per-step relative increase %.2e", drift,
               worst_rel_increase) +
               (damped_ok ? ""
                          : " (fractional memory returns energy in resolution-independent "
                            "ripples; E0 is not the Lyapunov functional of the fractional "
                            "system, so per-step monotonicity is unattainable)"));
}

// 4. Taylor remainder decay and adjoint identity.
void criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    const Mesh1D mesh = Mesh1D::uniform(50);
    const TimeGrid grid{500, 2.0 / 500};
    const ModelParams params = linear_params(mesh, 0.5, 0.2);
    const auto src = Excitation::from_function(mesh, grid, [](double x, double t) {
        const double env = t < 0.25 ? 0.5 * (1.0 - std::cos(kPi * t / 0.25)) : 1.0;
        return -216.0 * std::exp(-std::pow((x - 0.05) / 0.03, 2)) * std::sin(4.0 * kPi * t) * env;
    });
    const auto background = run_forward(params, src, mesh, grid);
    const std::vector<double> locs{0.1, 1.0};

    const int nn = mesh.n_nodes();
    CoeffField dk(nn, 0.0), ds(nn, 0.0);
    for (int i = 1; i < nn; ++i) {
        const double x = mesh.nodes[i];
        dk[i] = std::exp(-std::pow((x - 0.6) / 0.1, 2));
        ds[i] = 0.5 * std::exp(-std::pow((x - 0.4) / 0.15, 2));
    }
    const auto du = solve_linearized(background, dk, ds, params, mesh, grid);
    const auto tr_k = observe(du, mesh, locs);
    const auto tr_0 = observe(background, mesh, locs);
    std::vector<double> ratios;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        ModelParams p = params;
        for (int i = 0; i < nn; ++i) {
            p.kappa[i] = eps * dk[i];
            p.slowness[i] = 1.0 + eps * ds[i];
        }
        const auto tre = observe(run_forward(p, src, mesh, grid), mesh, locs);
        Trace rem = tre;
        for (std::size_t k = 0; k < rem.samples.size(); ++k)
            rem.samples[k] = tre.samples[k] - tr_0.samples[k] - eps * tr_k.samples[k];
        ratios.push_back(trace_norm(rem, grid) / (eps * trace_norm(tr_k, grid)));
    }
    const double r01 = ratios[0] / ratios[1], r12 = ratios[1] / ratios[2];
    const bool taylor_ok = r01 > 5.0 && r01 < 20.0 && r12 > 5.0 && r12 < 20.0;

    const auto km = assemble(background, params, mesh, grid, locs);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    bool adjoint_ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> p(km.k.cols), y(km.k.rows);
        for (auto& v : p) v = d(rng);
        for (auto& v : y) v = d(rng);
        const auto kp = fracwest::apply(km, p);
        const auto kty = adjoint_apply(km, y);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < kp.size(); ++i) lhs += km.row_weights[i] * kp[i] * y[i];
        for (std::size_t i = 0; i < p.size(); ++i) rhs += p[i] * kty[i];
        const double dev = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
        worst = std::max(worst, dev);
        if (dev >= 1e-10) adjoint_ok = false;
    }
    const double secs = elapsed_s(t0);
    report(4, taylor_ok && adjoint_ok && secs < 120.0,
           "Taylor remainder ~10x per decade; adjoint identity to 1e-10",
           fmt("decade ratios %.1f, %.1f", r01, r12) + fmt("; worst adjoint dev %.1e", worst) +
               fmt(", %.0f s", secs));
}

// 5. Singular-value decay of the frozen Jacobian at experiment defaults.
void criterion_5() {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig cfg;
    const auto sv = dump_singular_values(cfg, "acceptance_out/sv");
    const int m = 30;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int k = 0; k < m; ++k) {
        const double x = k + 1, y = std::log(sv[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double cov = sxy - sx * sy / m, vx = sxx - sx * sx / m, vy = syy - sy * sy / m;
    const double r2 = cov * cov / (vx * vy);
    const double ratio10 = sv[9] / sv[0];
    const double secs = elapsed_s(t0);
    report(5, r2 >= 0.9 && ratio10 <= 1e-2 && secs < 300.0,
           "singular values decay exponentially (R^2 >= 0.9, sigma10/sigma1 <= 1e-2)",
           fmt("R^2 %.3f, sigma10/sigma1 %.2e", r2, ratio10) + fmt(", %.0f s", secs));
}

struct CaseResult {
    double err_kappa_win = 0.0;  // [0.3, 1]
    double err_kappa_left = 0.0; // [0, 0.3]
    double err_kappa_right = 0.0;// [0.6, 1]
    double err_slowness = 0.0;   // [0, 1]
};

CaseResult run_case(const std::string& test_case, double noise_rel, const std::string& out) {
    ExperimentConfig cfg;
    cfg.test_case = test_case;
    cfg.noise_rel = noise_rel;
    const auto r = reconstruct(cfg, out);
    const Mesh1D mesh = cfg.mesh();
    CoeffField kap, slo;
    unstack(r.state.x, mesh, kap, slo);
    CaseResult c;
    c.err_kappa_win = field_error(kap, r.kappa_true, mesh, 0.3, 1.0);
    c.err_kappa_left = field_error(kap, r.kappa_true, mesh, 0.0, 0.3);
    c.err_kappa_right = field_error(kap, r.kappa_true, mesh, 0.6, 1.0);
    c.err_slowness = field_error(slo, r.slowness_true, mesh, 0.0, 1.0);
    return c;
}

// 6-8. Reconstruction quality and orderings at experiment defaults.
void criteria_6_to_8() {
    const auto t0 = std::chrono::steady_clock::now();
    const CaseResult a_low = run_case("A", 0.001, "acceptance_out/a_low");
    const CaseResult a_high = run_case("A", 0.01, "acceptance_out/a_high");
    const double secs_a = elapsed_s(t0);
    const bool c6 = a_low.err_kappa_win <= 0.25 && a_low.err_slowness <= 0.10 &&
                    a_high.err_kappa_win > a_low.err_kappa_win && secs_a < 600.0;
    report(6, c6, "case A: 0.1% noise errors within bounds, 1% noise strictly worse",
           fmt("kappa[0.3,1] %.3f (1%%: %.3f)", a_low.err_kappa_win, a_high.err_kappa_win) +
               fmt(", slowness %.3f", a_low.err_slowness) + fmt(", %.0f s", secs_a));

    const CaseResult b = run_case("B", 0.001, "acceptance_out/b");
    report(7, b.err_kappa_win >= a_low.err_kappa_win,
           "case B kappa error >= case A at equal noise (cancellation)",
           fmt("B %.3f vs A %.3f", b.err_kappa_win, a_low.err_kappa_win));

    const CaseResult c = run_case("C", 0.001, "acceptance_out/c");
    report(8, c.err_kappa_left > c.err_kappa_right,
           "case C kappa error larger near the left endpoint",
           fmt("[0,0.3] %.3f vs [0.6,1] %.3f", c.err_kappa_left, c.err_kappa_right));
}

// 9. Spectral checks.
void criterion_9() {
    namespace sp = fracwest::spectral;
    const auto t0 = std::chrono::steady_clock::now();

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> lam_d(0.5, 10.0), b_d(0.0, 2.0), c_d(0.5, 1.5);
    bool roots_ok = true, residue_ok = true;
    double worst_root = 0.0;
    for (int k = 0; k < 50; ++k) {
        const double lam = lam_d(rng), b = b_d(rng), c = c_d(rng);
        const auto p = sp::poles_and_residue(lam, b, c, 0.0);
        const double w1 = std::abs(sp::omega(p.p_plus, lam, b, c, 0.0));
        const double w2 = std::abs(sp::omega(p.p_minus, lam, b, c, 0.0));
        worst_root = std::max({worst_root, w1, w2});
        if (w1 >= 1e-12 || w2 >= 1e-12) roots_ok = false;
        const std::complex<double> disc(0.25 * b * b - c * c * lam, 0.0);
        if (std::abs(p.residue_plus - 0.5 / std::sqrt(disc)) >= 1e-12) residue_ok = false;
    }

    std::vector<double> lams;
    for (int j = 1; j <= 10; ++j) lams.push_back(std::pow((j - 0.5) * kPi, 2));
    const bool sep_ok = sp::check_pole_separation(lams, 0.2, 1.0, 0.0);

    const Mesh1D mesh = Mesh1D::uniform(100);
    const TimeGrid grid{400, 2.0 / 400};
    ModelParams params = linear_params(mesh, 0.5, 0.2);
    const auto eig = sp::eigenpairs_dn(1, mesh)[0];
    std::vector<double> psi(grid.n_steps + 1), psitt(grid.n_steps + 1);
    for (int n = 0; n <= grid.n_steps; ++n) {
        const double t = grid.t(n);
        psi[n] = t * t * std::exp(-t);
        psitt[n] = (2.0 - 4.0 * t + t * t) * std::exp(-t);
    }
    const auto r = sp::separable_excitation(eig.phi, psi, psitt, {}, params, mesh, grid);
    const auto u = run_forward(params, r, mesh, grid);
    double num = 0.0, den = 0.0;
    for (int n = 0; n <= grid.n_steps; ++n)
        for (int i = 0; i < mesh.n_nodes(); ++i) {
            const double exact = eig.phi[i] * psi[n];
            num += std::pow(u.at(n, i) - exact, 2);
            den += exact * exact;
        }
    const double roundtrip = std::sqrt(num / den);
    const double secs = elapsed_s(t0);
    report(9, roots_ok && residue_ok && sep_ok && roundtrip <= 0.01 && secs < 30.0,
           "spectral: pole roots/residues, separation, separable roundtrip <= 1%",
           fmt("worst |omega(p)| %.1e, roundtrip %.2e", worst_root, roundtrip) +
               (sep_ok ? "" : ", separation VIOLATED") + fmt(", %.1f s", secs));
}

// 10. Byte-identical artifacts across identical runs.
void criterion_10() {
    ExperimentConfig cfg;
    cfg.n_cells = 20;
    cfg.n_steps = 100;
    cfg.noise_rel = 0.01;
    cfg.newton.max_iters = 3;
    reconstruct(cfg, "acceptance_out/det1");
    reconstruct(cfg, "acceptance_out/det2");
    bool same = true;
    std::string diff;
    for (const char* name :
         {"recon_kappa.csv", "recon_slowness.csv", "newton_history.csv", "meta.json"}) {
        auto slurp = [](const std::string& p) {
            std::ifstream f(p, std::ios::binary);
            return std::string{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
        };
        const auto a = slurp(std::string("acceptance_out/det1/") + name);
        if (a.empty() || a != slurp(std::string("acceptance_out/det2/") + name)) {
            same = false;
            diff = name;
        }
    }
    report(10, same, "identical config+seed give byte-identical CSV artifacts",
           same ? "4 artifacts compared" : ("differs: " + diff));
}

} // namespace

int main() {
    std::filesystem::create_directories("acceptance_out");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criteria_6_to_8();
    criterion_9();
    criterion_10();
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
