#ifndef NBODYLAB_THRESHOLD_HPP
#define NBODYLAB_THRESHOLD_HPP

#include <string>
#include <vector>

#include "nbodylab/invariants.hpp"
#include "nbodylab/system.hpp"

namespace nbodylab {

/// K_omega(x) = omega^2 I(x) + alpha U(x). Its sign separates collapse-prone
/// (negative) from expansion-prone (nonnegative) configurations.
double k_omega(const AlphaSystem& sys, double omega, const std::vector<Vec3>& positions);

/// E_omega(x) = (omega^2/2) I(x) + U(x); on {K_omega = 0} this equals
/// -(alpha/2 - 1) U(x).
double e_omega(const AlphaSystem& sys, double omega, const std::vector<Vec3>& positions);

/// For K_omega(x) < 0, the unique lambda* > 1 with K_omega(lambda* x) = 0.
/// Bracketed bisection; throws PreconditionViolated when K_omega(x) >= 0.
double scale_to_null_up(const AlphaSystem& sys, double omega, const std::vector<Vec3>& positions);

/// For K_omega(x) > 0, the unique lambda* in (0,1) with K_omega(lambda* x) = 0.
double scale_to_null_down(const AlphaSystem& sys, double omega, const std::vector<Vec3>& positions);

/// Terms of the rotating-frame identity
///   E = -(omega^2/2) sum m_i (x_i1^2 + x_i2^2) + U + omega A_3
///       + (1/2) sum m_i |xdot_i - omega J x_i|^2.
/// residual is E minus the four terms; it vanishes identically up to roundoff.
struct RotatingEnergyDecomposition {
    double centrifugal_term = 0.0;
    double potential = 0.0;
    double omega_a3 = 0.0;
    double rotating_kinetic = 0.0;
    double residual = 0.0;
};

RotatingEnergyDecomposition rotating_energy_decomposition(const AlphaSystem& sys, double omega,
                                                          const PhaseState& state);

/// Partition of the sub-excited-energy phase space. K1Plus is provably empty;
/// it exists as a label so the classifier can surface a violation.
enum class SetLabel { K1Plus, K1Minus, K2Plus, K2Minus, OutOfK };

const char* to_string(SetLabel label);
SetLabel set_label_from_string(const std::string& name);

/// Label from the sign data (E - E*, |A| - omega I, K_omega). K_omega >= 0
/// counts as "+". States with E >= E* or |A| = 0 fall outside the partition.
SetLabel classify_state(const AlphaSystem& sys, double omega, const PhaseState& state,
                        double e_star);

/// Same classification from an already-computed record (used in hot loops).
SetLabel classify_record(double alpha, double omega, const InvariantRecord& rec, double e_star,
                         double a_scale);

/// The fixed-angular-momentum analogue inf{ c^2/(2I) + U : c^2/I + alpha U = 0 }
/// degenerates for alpha > 2 and N >= 3: spreading the bodies drives it to the
/// rest-at-infinity value. It is exposed only as this documented constant; the
/// usable threshold is the fixed-frequency excited energy.
constexpr double fixed_angular_momentum_excited_energy() { return 0.0; }

} // namespace nbodylab

#endif
