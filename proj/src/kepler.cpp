#include "nbodylab/kepler.hpp"

#include <cmath>

#include "nbodylab/errors.hpp"

namespace nbodylab::kepler {

double effective_potential(const Params& p, double r) {
    if (!(r > 0.0)) throw PreconditionViolated("effective potential needs r > 0");
    return p.c * p.c / (2.0 * r * r) - std::pow(r, -p.alpha);
}

double effective_potential_deriv(const Params& p, double r) {
    return -p.c * p.c / (r * r * r) + p.alpha * std::pow(r, -p.alpha - 1.0);
}

CriticalPoint critical_point(const Params& p) {
    if (p.c == 0.0) throw ZeroAngularMomentum("critical point undefined for c = 0");
    if (p.alpha == 2.0)
        throw AlphaOutOfRange("alpha = 2 effective potential has no critical point");
    CriticalPoint cp;
    cp.r0 = std::pow(p.c * p.c / p.alpha, 1.0 / (2.0 - p.alpha));
    cp.v_star = std::pow(p.alpha, 2.0 / (2.0 - p.alpha)) * (0.5 - 1.0 / p.alpha) *
                std::pow(p.c, 2.0 * p.alpha / (p.alpha - 2.0));
    return cp;
}

double omega_to_c(double alpha, double omega) {
    if (alpha == 2.0) throw AlphaOutOfRange("omega/c map undefined at alpha = 2");
    if (!(omega > 0.0)) throw PreconditionViolated("omega must be positive");
    return std::pow(alpha, 2.0 / (2.0 + alpha)) * std::pow(omega, (alpha - 2.0) / (alpha + 2.0));
}

double c_to_omega(double alpha, double c) {
    if (alpha == 2.0) throw AlphaOutOfRange("omega/c map undefined at alpha = 2");
    if (!(c > 0.0)) throw PreconditionViolated("c must be positive");
    return std::pow(alpha, 2.0 / (2.0 - alpha)) * std::pow(c, (alpha + 2.0) / (alpha - 2.0));
}

double k_omega_reduced(double alpha, double omega, double r) {
    return omega * omega * r * r - alpha * std::pow(r, -alpha);
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Circular: return "Circular";
        case Outcome::BoundedOscillation: return "BoundedOscillation";
        case Outcome::Escape: return "Escape";
        case Outcome::Collision: return "Collision";
        case Outcome::Undecided: return "Undecided";
    }
    return "Undecided";
}

Outcome classify_state(const Params& p, double r, double rdot, double energy) {
    const double recomputed = 0.5 * rdot * rdot + effective_potential(p, r);
    if (std::abs(recomputed - energy) > 1e-9 * (1.0 + std::abs(energy)))
        throw InconsistentEnergy("energy does not match rdot^2/2 + V_c(r)");

    const CriticalPoint cp = critical_point(p);
    const double band = 1e-9 * (1.0 + std::abs(cp.v_star));

    if (p.alpha < 2.0) {
        // Single well: circular at the bottom, oscillation below zero, escape above.
        if (std::abs(energy - cp.v_star) < band) return Outcome::Circular;
        if (energy < 0.0) return Outcome::BoundedOscillation;
        return Outcome::Escape;
    }

    // alpha > 2: single barrier of height V* at r0.
    if (std::abs(energy - cp.v_star) < band) {
        if (std::abs(r - cp.r0) < 1e-9 * (1.0 + cp.r0) && std::abs(rdot) < band)
            return Outcome::Circular;
        return Outcome::Undecided; // stable/unstable manifolds of the circular orbit
    }
    if (energy < cp.v_star) {
        return r < cp.r0 ? Outcome::Collision : Outcome::Escape;
    }
    // Above the barrier there is no turning point; the radial velocity keeps
    // its sign and decides the fate.
    return rdot < 0.0 ? Outcome::Collision : Outcome::Escape;
}

TwoBodyThresholds twobody_thresholds(double m1, double m2, double alpha, double omega) {
    if (!(alpha > 2.0)) throw AlphaOutOfRange("two-body thresholds need alpha > 2");
    if (std::abs(m1 + m2 - 1.0) > 1e-12)
        throw MassNormalization("two-body thresholds use the m1 + m2 = 1 normalization");
    const double c = omega_to_c(alpha, omega);
    const CriticalPoint cp = critical_point({alpha, c});
    return {m1 * m2 * cp.v_star, m1 * m2 * c};
}

} // namespace nbodylab::kepler
