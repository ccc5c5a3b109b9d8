#include "fracwest/newton.hpp"

#include <cmath>
#include <stdexcept>

namespace fracwest {

Matrix build_penalty(const Mesh1D& mesh, double weight) {
    if (weight < 0.0) throw std::invalid_argument("build_penalty: weight must be >= 0");
    const int nf = mesh.n_free();
    const int rows_per_block = std::max(nf - 2, 0);
    Matrix p(2 * rows_per_block, 2 * nf);
    if (weight == 0.0) return p;
    const double s = weight / (mesh.h * mesh.h);
    for (int blk = 0; blk < 2; ++blk)
        for (int i = 0; i < rows_per_block; ++i) {
            const int r = blk * rows_per_block + i;
            const int c = blk * nf + i;
            p(r, c) = s;
            p(r, c + 1) = -2.0 * s;
            p(r, c + 2) = s;
        }
    return p;
}

namespace {

Matrix gram_of(const Matrix& p) {
    Matrix g(p.cols, p.cols);
    for (int i = 0; i < p.rows; ++i)
        for (int a = 0; a < p.cols; ++a) {
            const double v = p(i, a);
            if (v == 0.0) continue;
            for (int b = 0; b < p.cols; ++b) g(a, b) += v * p(i, b);
        }
    return g;
}

} // namespace

std::vector<double> newton_step(std::span<const double> x, const JacobianMatrix& kmat,
                                const Matrix& gram, const Matrix& ptp,
                                std::span<const double> residual, double alpha_n,
                                std::span<const double> x0) {
    const int n = gram.rows;
    if (static_cast<int>(x.size()) != n || static_cast<int>(x0.size()) != n)
        throw std::invalid_argument("newton_step: iterate size mismatch");

    Matrix sys = gram;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sys(i, j) += ptp(i, j);
    for (int i = 0; i < n; ++i) sys(i, i) += alpha_n;

    std::vector<double> rhs = adjoint_apply(kmat, residual);
    const auto px = mat_vec(ptp, x);
    for (int i = 0; i < n; ++i) rhs[i] += -px[i] + alpha_n * (x0[i] - x[i]);

    std::vector<double> dx;
    try {
        dx = cholesky_solve(std::move(sys), std::move(rhs));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string("newton_step: normal system not SPD (") + e.what() + ")");
    }

    std::vector<double> next(x.begin(), x.end());
    for (int i = 0; i < n; ++i) next[i] += dx[i];
    for (int i = 0; i < kmat.n_free; ++i) next[i] = std::max(next[i], 0.0); // kappa >= 0
    return next;
}

void unstack(std::span<const double> x, const Mesh1D& mesh, CoeffField& kappa, CoeffField& slowness) {
    const int nf = mesh.n_free();
    if (static_cast<int>(x.size()) != 2 * nf) throw std::invalid_argument("unstack: size mismatch");
    kappa.assign(mesh.n_nodes(), 0.0);
    slowness.assign(mesh.n_nodes(), 1.0);
    for (int i = 0; i < nf; ++i) {
        kappa[i + 1] = x[i];
        slowness[i + 1] = x[nf + i];
    }
}

std::vector<double> stack_fields(const CoeffField& kappa, const CoeffField& slowness,
                                 const Mesh1D& mesh) {
    const int nf = mesh.n_free();
    std::vector<double> x(2 * nf);
    for (int i = 0; i < nf; ++i) {
        x[i] = kappa[i + 1];
        x[nf + i] = slowness[i + 1];
    }
    return x;
}

namespace {

double block_error(std::span<const double> x, std::span<const double> truth, int offset, int nf) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < nf; ++i) {
        const double d = x[offset + i] - truth[offset + i];
        num += d * d;
        den += truth[offset + i] * truth[offset + i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

} // namespace

NewtonState run_newton(const NewtonConfig& cfg, const NewtonProblem& prob) {
    if (!prob.mesh || !prob.grid || !prob.source || !prob.kmat || !prob.h_obs)
        throw std::invalid_argument("run_newton: incomplete problem bundle");
    const Mesh1D& mesh = *prob.mesh;
    const TimeGrid& grid = *prob.grid;
    const JacobianMatrix& kmat = *prob.kmat;
    const int nf = mesh.n_free();
    const int dim = 2 * nf;

    std::vector<double> x0 = cfg.x0;
    if (x0.empty()) {
        x0.assign(dim, 0.0);
        for (int i = 0; i < nf; ++i) x0[nf + i] = 1.0; // kappa = 0, slowness = 1
    }
    if (static_cast<int>(x0.size()) != dim) throw std::invalid_argument("run_newton: x0 size mismatch");

    const Matrix gram = normal_matrix(kmat);
    const Matrix ptp = gram_of(build_penalty(mesh, cfg.penalty_weight));

    auto residual_of = [&](std::span<const double> x) {
        ModelParams params = prob.params_template;
        unstack(x, mesh, params.kappa, params.slowness);
        const StateHistory u = run_forward(params, *prob.source, mesh, grid);
        const Trace f = observe(u, mesh, prob.h_obs->locations);
        std::vector<double> r(f.samples.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = prob.h_obs->samples[i] - f.samples[i];
        double norm2 = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) norm2 += kmat.row_weights[i] * r[i] * r[i];
        return std::pair{std::move(r), std::sqrt(norm2)};
    };

    NewtonState st;
    st.x = x0;
    auto record = [&](double res_norm) {
        st.iterates.push_back(st.x);
        st.residual_history.push_back(res_norm);
        if (prob.ground_truth) {
            st.err_kappa_history.push_back(block_error(st.x, *prob.ground_truth, 0, nf));
            st.err_slowness_history.push_back(block_error(st.x, *prob.ground_truth, nf, nf));
        }
    };

    auto [r, res_norm] = residual_of(st.x);
    record(res_norm);

    for (int n = 0; n < cfg.max_iters; ++n) {
        if (cfg.noise_level_delta > 0.0 && res_norm <= cfg.tau_discrepancy * cfg.noise_level_delta) {
            st.stopped_by_discrepancy = true;
            break;
        }
        const double alpha_n = cfg.alpha0 * std::pow(cfg.theta, n);
        st.alpha_history.push_back(alpha_n);
        st.x = newton_step(st.x, kmat, gram, ptp, r, alpha_n, x0);
        for (double v : st.x)
            if (!std::isfinite(v))
                throw std::runtime_error("run_newton: non-finite iterate at n=" + std::to_string(n + 1));
        ++st.iterations;
        std::tie(r, res_norm) = residual_of(st.x);
        record(res_norm);
    }
    if (!st.stopped_by_discrepancy && cfg.noise_level_delta > 0.0 &&
        res_norm <= cfg.tau_discrepancy * cfg.noise_level_delta)
        st.stopped_by_discrepancy = true;
    return st;
}

} // namespace fracwest
