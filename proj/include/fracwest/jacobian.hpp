#pragma once

#include "fracwest/forward.hpp"
#include "fracwest/linalg.hpp"

#include <span>
#include <vector>

// Frozen linearization K = F'(kappa=0, slowness=1): columns are the
// observation traces of linearized solutions for unit hat perturbations,
// all kappa columns first, then all slowness columns, node-ascending over
// the free nodes 1..n_cells. The data-space inner product is the trapezoid
// dt-weighted L2(0,T) norm summed over observation points.

namespace fracwest {

struct JacobianMatrix {
    Matrix k;                        // (n_loc*(n_steps+1)) x (2*n_free)
    std::vector<double> row_weights; // quadrature weight per row
    std::vector<double> locations;
    int n_steps = 0;
    int n_free = 0;
};

/// Solution of the linearized integrated system at the frozen point, driven
/// by the background u0 (the run at kappa=0, slowness=1):
///   du_t - b A I^{1-alpha} du - A I^1 du = -(dslow u0 - dkappa u0^2)_t.
StateHistory solve_linearized(const StateHistory& background, const CoeffField& dkappa,
                              const CoeffField& dslow, const ModelParams& params, const Mesh1D& mesh,
                              const TimeGrid& grid);

JacobianMatrix assemble(const StateHistory& background, const ModelParams& params, const Mesh1D& mesh,
                        const TimeGrid& grid, std::span<const double> locations);

/// K p for a stacked (dkappa, dslow) free-node vector.
std::vector<double> apply(const JacobianMatrix& kmat, std::span<const double> p);

/// Hilbert-space adjoint K* y = K' W y (W the row weights).
std::vector<double> adjoint_apply(const JacobianMatrix& kmat, std::span<const double> residual);

/// SVD of the row-weighted matrix W^{1/2} K, i.e. of K as an operator into
/// the weighted data space.
SvdResult svd(const JacobianMatrix& kmat);

/// K' W K, the Gram matrix used by the Newton normal equations.
Matrix normal_matrix(const JacobianMatrix& kmat);

} // namespace fracwest
