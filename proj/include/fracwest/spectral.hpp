#pragma once

#include "fracwest/forward.hpp"

#include <complex>
#include <functional>
#include <vector>

// Executable checks of the spectral machinery: Dirichlet-Neumann eigenpairs
// on (0,1), poles/residues of the modal relaxation function
// 1/omega_lambda(z), omega_lambda(z) = z^2 + b lambda^bt z + c^2 lambda,
// space-time separable excitations, and the two-excitation determinant
// condition via truncated numeric Laplace transforms.

namespace fracwest::spectral {

struct EigenPair {
    int index = 0;     // j >= 1
    double lambda = 0; // ((j - 1/2) pi)^2
    std::vector<double> phi; // nodal samples of sqrt(2) sin((j-1/2) pi x)
};

struct PolePair {
    std::complex<double> p_plus;
    std::complex<double> p_minus;
    std::complex<double> residue_plus; // residue of 1/omega at p_plus
};

std::vector<EigenPair> eigenpairs_dn(int count, const Mesh1D& mesh);

/// Closed-form roots of omega_lambda and the residue 1/(2 sqrt(disc)).
PolePair poles_and_residue(double lambda, double b, double c, double beta_tilde);

std::complex<double> omega(std::complex<double> z, double lambda, double b, double c,
                           double beta_tilde);

/// True iff all p_plus are pairwise separated by more than 1e-10 and every
/// |residue| exceeds 1e-12.
bool check_pole_separation(const std::vector<double>& lambdas, double b, double c, double beta_tilde);

/// Nodal assembly of the separable excitation
///   r = (1/c~^2) phi psi'' + (A phi) psi + b (A phi) d_t^alpha psi,
/// with A phi recovered by the discrete stiffness action (consistent-mass
/// solve). psi_frac supplies analytic samples of d_t^alpha psi when known;
/// pass empty to fall back on the fracquad discretization of I^{1-alpha} psi'
/// (psi' obtained by trapezoid integration of psi'').
Excitation separable_excitation(const std::vector<double>& phi, const std::vector<double>& psi,
                                const std::vector<double>& psi_tt, const std::vector<double>& psi_frac,
                                const ModelParams& params, const Mesh1D& mesh, const TimeGrid& grid);

/// Trapezoid Laplace transform int_0^T e^{-zt} f(t) dt.
std::complex<double> laplace_trapezoid(std::span<const double> samples, const TimeGrid& grid,
                                       std::complex<double> z);

/// |det [[L(psi1'')(p), L((psi1^2)'')(p)], [L(psi2'')(p), L((psi2^2)'')(p)]]|
/// for each pole. Second time derivatives by central differences. Throws if
/// either signal has not decayed below 1e-8 at the horizon.
std::vector<std::pair<std::complex<double>, double>> determinant_condition(
    const std::vector<double>& psi1, const std::vector<double>& psi2,
    const std::vector<std::complex<double>>& poles, const TimeGrid& grid);

} // namespace fracwest::spectral
