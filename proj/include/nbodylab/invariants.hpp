#ifndef NBODYLAB_INVARIANTS_HPP
#define NBODYLAB_INVARIANTS_HPP

#include <vector>

#include "nbodylab/system.hpp"
#include "nbodylab/vec3.hpp"

namespace nbodylab {

/// Conserved and monitored scalars evaluated at one phase-space point.
/// inertia_accel carries the Lagrange-Jacobi value 4(E + (alpha/2 - 1)U),
/// computed from the same E and U stored here, and virial is
/// E + (alpha/2 - 1)U itself.
struct InvariantRecord {
    double energy = 0.0;
    Vec3 angular_momentum{};
    Vec3 linear_momentum{};
    double inertia = 0.0;
    double inertia_rate = 0.0;
    double inertia_accel = 0.0;
    double potential = 0.0;
    double virial = 0.0;
};

/// U(x) = -sum_{i<j} m_i m_j / r_ij^alpha. Always negative off collisions.
double potential(const AlphaSystem& sys, const std::vector<Vec3>& positions);

/// ddot x_i = -grad_i U / m_i. Mass-weighted sum vanishes (action/reaction).
std::vector<Vec3> accelerations(const AlphaSystem& sys, const std::vector<Vec3>& positions);

/// Gradient of U with respect to all coordinates (3N values as Vec3 per body).
std::vector<Vec3> potential_gradient(const AlphaSystem& sys, const std::vector<Vec3>& positions);

InvariantRecord invariants(const AlphaSystem& sys, const PhaseState& state);

/// Translate and boost so that sum m_i x_i = 0 and sum m_i v_i = 0.
PhaseState to_com_frame(const AlphaSystem& sys, const PhaseState& state);

/// Rotate positions and velocities by one P in SO(3) so the angular momentum
/// becomes (0, 0, |A|). Throws ZeroAngularMomentum when |A| vanishes.
PhaseState align_angular_momentum(const AlphaSystem& sys, const PhaseState& state);

/// E - (|A|^2/(2I) + U) >= 0 by Sundman's inequality; returns the gap.
double sundman_gap(const AlphaSystem& sys, const PhaseState& state);

} // namespace nbodylab

#endif
