#pragma once

#include <span>
#include <vector>

// Uniform 1D grid on (0,1) with chapeau (hat) basis. Boundary conditions are
// Dirichlet at x=0 (node eliminated) and natural Neumann at x=1, so the free
// unknowns are nodes 1..n_cells.

namespace fracwest {

struct Mesh1D {
    int n_cells;
    double h;
    std::vector<double> nodes; // x_i = i*h, i = 0..n_cells

    /// n_cells must be a positive multiple of 10 so that x = 0.1 is a node.
    static Mesh1D uniform(int n_cells);

    int n_nodes() const { return n_cells + 1; }
    int n_free() const { return n_cells; }

    /// Node index of a coordinate that must coincide with a grid node.
    int node_index(double x) const;
};

/// Nodal coefficient vector (one value per node, including node 0).
using CoeffField = std::vector<double>;

/// Symmetric tridiagonal matrix over the free nodes.
struct BandMatrix {
    std::vector<double> sub;  // size n-1
    std::vector<double> diag; // size n
    std::vector<double> sup;  // size n-1

    explicit BandMatrix(int n) : sub(n - 1, 0.0), diag(n, 0.0), sup(n - 1, 0.0) {}
    int size() const { return static_cast<int>(diag.size()); }
};

/// A[i][j] = int phi_i' phi_j' dx over free nodes; the (eliminated) Dirichlet
/// coupling is dropped and the last row carries the natural condition.
BandMatrix assemble_stiffness(const Mesh1D& mesh);

/// M_w[i][j] = int w(x) phi_i phi_j dx with w interpolated linearly between
/// nodes; reduces to the standard mass matrix for w == 1.
BandMatrix assemble_weighted_mass(const Mesh1D& mesh, const CoeffField& w);

/// Thomas algorithm. Throws on a near-singular pivot.
std::vector<double> solve_tridiagonal(const BandMatrix& m, std::span<const double> rhs);

/// y = m * x.
std::vector<double> band_mul(const BandMatrix& m, std::span<const double> x);

/// Load vector f_i = int g(x) phi_i dx over free nodes, where g is given
/// nodally (all nodes, including node 0) and interpolated linearly.
std::vector<double> assemble_load(const Mesh1D& mesh, std::span<const double> g);

} // namespace fracwest
