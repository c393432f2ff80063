#ifndef NBODYLAB_EQUILIBRIA_HPP
#define NBODYLAB_EQUILIBRIA_HPP

#include <cstdint>
#include <vector>

#include "nbodylab/system.hpp"

namespace nbodylab::equilibria {

/// A residual-certified critical point of omega^2 I/2 - U, centered.
struct CentralConfig {
    std::vector<Vec3> positions;
    double omega = 0.0;
    double residual = 0.0; // sup-norm of grad(omega^2 I/2 - U) at positions
};

struct SolveOptions {
    double tol = 1e-12;         // Newton target for the residual sup-norm
    double success_tol = 1e-10; // below this the result counts as converged
    int max_iterations = 200;
};

/// Damped Newton for grad(omega^2 I/2 - U) = 0. The Jacobian is the symmetric
/// Hessian; its rotational kernel directions are truncated spectrally, which
/// plays the role of the usual gauge fixing. Throws NoConvergence or
/// SingularJacobian.
CentralConfig central_config_solve(const AlphaSystem& sys, double omega,
                                   std::vector<Vec3> initial_guess,
                                   const SolveOptions& opts = {});

/// Lifts a planar central configuration to its rigidly rotating solution:
/// velocities omega J q. The resulting state has V = 0, K_omega = 0 and
/// |A| = omega I. Throws NonPlanarConfiguration unless all z vanish.
PhaseState relative_equilibrium_state(const AlphaSystem& sys, const CentralConfig& cc);

struct ExcitedEnergyResult {
    double e_star = 0.0;
    double u_star = 0.0;   // -U at the minimizer
    CentralConfig minimizer;
    double multiplier = 0.0; // KKT estimate, should be -1/(2+alpha)
    bool degenerate_alpha = false; // alpha <= 2: e_star is a typed constant
    bool minimizer_planar = false;
    bool minimizer_collinear = false;
    int starts_attempted = 0;
    int starts_converged = 0;
};

/// E*(omega) = (alpha/2 - 1) inf{-U : K_omega = 0}, computed by solving the
/// central-configuration equation from structured and random starts and
/// selecting the smallest E_omega. For alpha = 2 returns the constant 0 and
/// for alpha < 2 the -infinity sentinel, both flagged, without optimizing.
ExcitedEnergyResult excited_energy(const AlphaSystem& sys, double omega, int restarts = 32,
                                   std::uint64_t seed = 20260801u);

struct EqualMass3BodyForms {
    double x_lin;      // collinear spacing [alpha (1 + 2^-(alpha+1)) / omega^2]^(1/(alpha+2))
    double e_linear;   // energy of the collinear relative equilibrium
    double r_tri;      // equilateral side (alpha M / omega^2)^(1/(alpha+2)), M = 3
    double e_triangle; // energy of the triangular relative equilibrium
    double a_star;     // angular momentum of the collinear relative equilibrium
};

/// Closed forms for unit equal masses; alpha > 2. The triangle has the lower
/// energy of the two families, so e_triangle is the excited energy E*(omega).
EqualMass3BodyForms equal_mass_3body_closed_forms(double alpha, double omega);

/// Collinear central configuration for the given left-to-right ordering of
/// body indices, solved on the gap variables with positivity-preserving
/// damping. Returns centered positions on the x-axis.
std::vector<Vec3> moulton_collinear(const AlphaSystem& sys, double omega,
                                    const std::vector<int>& ordering);

struct PlanarityKernel {
    int kernel_dim = 0;
    std::vector<std::vector<double>> basis; // kernel eigenvectors, unit norm
    double ones_alignment = 0.0;            // |<v, ones/sqrt(N)>| of the best kernel vector
};

/// The matrix C with off-diagonal -1/r_ij^(alpha+2) and row sums zero, whose
/// kernel Span{(1,...,1)} forces relative equilibria to be planar.
PlanarityKernel planarity_kernel(double alpha, const std::vector<Vec3>& positions);

struct MonotonicityRow {
    double omega;
    double e_star;
};

/// E*(omega) along an ascending omega grid.
std::vector<MonotonicityRow> estar_monotonicity_probe(const AlphaSystem& sys,
                                                      const std::vector<double>& omegas,
                                                      int restarts = 32);

/// If -U(x) <= c then I(x) >= (m^2/M)(m^2/c)^(2/alpha); returns that bound.
double inertia_lower_bound(const AlphaSystem& sys, double c);

struct ReExclusionReport {
    double omega1_energy_bound;   // ((1 + 2^-(alpha+1))/(3/2))^(1/alpha) * omega
    double omega1_momentum_bound; // 2^((alpha+2)/(alpha-2)) ((1 + 2^-(alpha+1))/(3/2))^(2/(alpha-2)) * omega
    bool incompatible;            // momentum bound exceeds energy bound
};

/// Equal-mass three-body check that {E < E*(omega), |A| >= A*(omega)} excludes
/// every relative equilibrium: the energy side demands omega_1 below one bound
/// while the momentum side demands omega_1 at or above a larger one.
ReExclusionReport re_exclusion_check(double alpha, double omega);

/// Shape diagnostics via the eigenvalues of the mass-weighted Gram matrix.
bool configuration_planar(const AlphaSystem& sys, const std::vector<Vec3>& positions,
                          double rel_tol = 1e-8);
bool configuration_collinear(const AlphaSystem& sys, const std::vector<Vec3>& positions,
                             double rel_tol = 1e-8);

} // namespace nbodylab::equilibria

#endif
