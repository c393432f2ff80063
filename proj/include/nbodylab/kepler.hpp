#ifndef NBODYLAB_KEPLER_HPP
#define NBODYLAB_KEPLER_HPP

#include <string>

namespace nbodylab::kepler {

/// Reduced two-body problem with unit total mass: xddot = -grad U,
/// U(r) = -1/r^alpha, angular momentum c = r^2 thetadot.
struct Params {
    double alpha;
    double c;
};

/// V_c(r) = c^2/(2 r^2) - 1/r^alpha.
double effective_potential(const Params& p, double r);
double effective_potential_deriv(const Params& p, double r);

struct CriticalPoint {
    double r0;     // critical radius (c^2/alpha)^(1/(2-alpha))
    double v_star; // critical value alpha^(2/(2-alpha)) (1/2 - 1/alpha) c^(2 alpha/(alpha-2))
};

/// Throws ZeroAngularMomentum for c = 0 and AlphaOutOfRange at alpha = 2,
/// where the effective potential has no critical point.
CriticalPoint critical_point(const Params& p);

/// c(omega) = alpha^(2/(2+alpha)) omega^((alpha-2)/(alpha+2)); inverse of
/// omega(c) = alpha^(2/(2-alpha)) c^((alpha+2)/(alpha-2)).
double omega_to_c(double alpha, double omega);
double c_to_omega(double alpha, double c);

/// Threshold function of the reduced problem: omega^2 r^2 - alpha / r^alpha.
double k_omega_reduced(double alpha, double omega, double r);

enum class Outcome { Circular, BoundedOscillation, Escape, Collision, Undecided };

const char* to_string(Outcome o);

/// Classifies a reduced state (r, rdot) with energy E against the effective
/// potential portrait. E must satisfy E = rdot^2/2 + V_c(r) to 1e-9 or
/// InconsistentEnergy is thrown. States within 1e-9 of the critical energy
/// that are not the circular orbit itself come back Undecided: the separatrix
/// cannot be resolved numerically.
Outcome classify_state(const Params& p, double r, double rdot, double energy);

struct TwoBodyThresholds {
    double e_star; // m1 m2 V*_{c(omega)}
    double a_star; // m1 m2 c(omega)
};

/// Requires m1 + m2 = 1 (within 1e-12) and alpha > 2.
TwoBodyThresholds twobody_thresholds(double m1, double m2, double alpha, double omega);

} // namespace nbodylab::kepler

#endif
