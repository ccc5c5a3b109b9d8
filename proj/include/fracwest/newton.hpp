#pragma once

#include "fracwest/jacobian.hpp"

#include <optional>
#include <vector>

// Regularized frozen Newton iteration
//   x_{n+1} = x_n + (K*K + P*P + a_n I)^{-1} (K*(h - F(x_n)) - P*P x_n + a_n (x_0 - x_n))
// with geometric schedule a_n = a_0 theta^n, an optional second-difference
// smoothing penalty P per coefficient block, nonnegativity clamping of the
// kappa block, and discrepancy-principle stopping.

namespace fracwest {

struct NewtonConfig {
    double alpha0 = 1.0;
    double theta = 0.5;
    int max_iters = 20;
    double penalty_weight = 1e-3;
    double tau_discrepancy = 1.5;
    double noise_level_delta = 0.0; // absolute, in the trace norm
    std::vector<double> x0;         // stacked (kappa, slowness) free-node start; empty = (0, 1)
};

struct NewtonProblem {
    const Mesh1D* mesh = nullptr;
    const TimeGrid* grid = nullptr;
    ModelParams params_template; // alpha / b_damp used for every forward run
    const Excitation* source = nullptr;
    const JacobianMatrix* kmat = nullptr;
    const Trace* h_obs = nullptr;
    std::optional<std::vector<double>> ground_truth; // stacked, for error histories
};

struct NewtonState {
    std::vector<double> x;                      // final stacked iterate
    std::vector<std::vector<double>> iterates;  // x_0 .. x_final
    std::vector<double> residual_history;       // ||h - F(x_n)||_Y per iterate
    std::vector<double> alpha_history;
    std::vector<double> err_kappa_history;      // only with ground truth
    std::vector<double> err_slowness_history;
    bool stopped_by_discrepancy = false;
    int iterations = 0;
};

/// Second-difference penalty, block diagonal over the kappa and slowness
/// blocks, scaled by weight/h^2. Zero matrix for weight = 0.
Matrix build_penalty(const Mesh1D& mesh, double weight);

/// One regularized step from x (stacked). gram = K'WK, ptp = P'P.
std::vector<double> newton_step(std::span<const double> x, const JacobianMatrix& kmat,
                                const Matrix& gram, const Matrix& ptp,
                                std::span<const double> residual, double alpha_n,
                                std::span<const double> x0);

NewtonState run_newton(const NewtonConfig& cfg, const NewtonProblem& prob);

/// Unpacks a stacked free-node vector into full nodal fields (node 0 takes
/// the starting values kappa=0, slowness=1... i.e. the boundary node is held
/// at the initial guess, where the solution is not observable).
void unstack(std::span<const double> x, const Mesh1D& mesh, CoeffField& kappa, CoeffField& slowness);

std::vector<double> stack_fields(const CoeffField& kappa, const CoeffField& slowness,
                                 const Mesh1D& mesh);

} // namespace fracwest
