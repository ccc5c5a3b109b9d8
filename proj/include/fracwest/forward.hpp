#pragma once

#include "fracwest/fracquad.hpp"
#include "fracwest/mesh.hpp"

#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

// Time stepping of the once-integrated quasilinear system
//   (slowness - 2 kappa u) u_t - b A I^{1-alpha} u - A I^1 u = I^1 r
// (A = discrete -Laplacian) with a semi-implicit Crank-Nicolson-type scheme:
// the u_t coefficient is frozen at the extrapolated state, both integral
// terms treat u^{n+1} implicitly through their last convolution weight.

namespace fracwest {

struct ModelParams {
    double alpha = 0.5;   // fractional order in (0,1)
    double b_damp = 0.2;  // damping coefficient b~ >= 0
    CoeffField kappa;     // nonlinearity coefficient, nodal
    CoeffField slowness;  // squared slowness, nodal, must stay positive
};

/// Nodal source samples r(x_i, t_n), dense over the space-time grid.
struct Excitation {
    int n_nodes = 0;
    int n_steps = 0;
    std::vector<double> samples; // (n_steps+1) x n_nodes row-major

    double at(int n, int i) const { return samples[static_cast<std::size_t>(n) * n_nodes + i]; }

    static Excitation from_function(const Mesh1D& mesh, const TimeGrid& grid,
                                    const std::function<double(double, double)>& f); // f(x,t)
};

struct StateHistory {
    int n_steps = 0;
    int n_nodes = 0;
    std::vector<double> u; // (n_steps+1) x n_nodes row-major, node 0 included
    double min_coeff = std::numeric_limits<double>::infinity(); // min (ς - 2κū) seen

    double at(int n, int i) const { return u[static_cast<std::size_t>(n) * n_nodes + i]; }
    std::span<const double> row(int n) const {
        return {u.data() + static_cast<std::size_t>(n) * n_nodes, static_cast<std::size_t>(n_nodes)};
    }
};

struct Trace {
    std::vector<double> locations;
    int n_steps = 0;
    std::vector<double> samples; // per-location contiguous: [loc * (n_steps+1) + n]

    int n_samples() const { return n_steps + 1; }
    double at(int loc, int n) const { return samples[static_cast<std::size_t>(loc) * (n_steps + 1) + n]; }
};

/// Thrown when a run loses parabolicity or a linear solve fails; carries the
/// failing step index.
struct SolverError : std::runtime_error {
    int step;
    SolverError(const std::string& what, int step_) : std::runtime_error(what), step(step_) {}
};

/// Full nonlinear forward run with zero initial data.
StateHistory run_forward(const ModelParams& params, const Excitation& src, const Mesh1D& mesh,
                         const TimeGrid& grid);

/// Linear constant-in-time-coefficient run of the integrated system where the
/// (already time-integrated) right-hand side is supplied per step as an
/// assembled free-node load: g(m, out) fills out (size n_free) with the load
/// averaged over the step ending at t_m (the Crank-Nicolson midpoint). Used
/// by the frozen linearization.
StateHistory run_linear_integrated(const CoeffField& coeff, double b_damp, double alpha,
                                   const std::function<void(int, std::vector<double>&)>& g_nodal,
                                   const Mesh1D& mesh, const TimeGrid& grid);

/// Exact nodal extraction of the solution at the given node coordinates.
Trace observe(const StateHistory& history, const Mesh1D& mesh, std::span<const double> locations);

/// Low-order energy 0.5 (u_t' M_slowness u_t + u' A u) at step n, u_t by
/// central differences (requires 1 <= n <= n_steps-1).
double energy_e0(const StateHistory& history, const ModelParams& params, const Mesh1D& mesh,
                 const TimeGrid& grid, int n);

/// Discrete L2(0,T) trace norm: trapezoid in time, summed over locations.
double trace_norm(const Trace& tr, const TimeGrid& grid);

} // namespace fracwest
