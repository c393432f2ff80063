#ifndef NBODYLAB_GENERATORS_HPP
#define NBODYLAB_GENERATORS_HPP

#include "nbodylab/rng.hpp"
#include "nbodylab/system.hpp"

namespace nbodylab::generators {

/// Centered Gaussian positions (pairs kept apart) and Gaussian velocities.
PhaseState random_state(const AlphaSystem& sys, Rng& rng, double pos_scale = 1.0,
                        double vel_scale = 1.0);

/// Spread-out configuration with outward radial velocities plus a tangential
/// component; long-lived for alpha > 2 (stays in the K >= 0 regime).
PhaseState expanding_state(const AlphaSystem& sys, Rng& rng, double pos_scale = 4.0,
                           double expansion_rate = 0.5);

/// Radially shrunk circular state: positions lambda q, velocities
/// (omega/lambda) J q for a planar central configuration q. For lambda < 1
/// the state lies in K1Minus with E < E*(omega) and Idot = 0.
PhaseState shrunk_circular_state(const AlphaSystem& sys, const std::vector<Vec3>& cc_positions,
                                 double omega, double lambda);

/// A state with K_omega >= 0 and |A| >= omega I: planar configuration scaled
/// onto or above the K null scale, rigid rotation boosted by beta >= 1, plus
/// optional velocity noise that preserves both inequalities.
PhaseState k1_candidate_state(const AlphaSystem& sys, Rng& rng, double omega);

/// Reduced two-body sample mapped to the full system: bodies m1, m2 with
/// separation r, radial rate rdot and angular momentum c of the relative motion.
PhaseState twobody_state(const AlphaSystem& sys, double r, double rdot, double c);

} // namespace nbodylab::generators

#endif
