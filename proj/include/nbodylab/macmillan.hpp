#ifndef NBODYLAB_MACMILLAN_HPP
#define NBODYLAB_MACMILLAN_HPP

#include <array>
#include <vector>

#include "nbodylab/errors.hpp"

namespace nbodylab::macmillan {

/// Two primaries of mass 1/2 on the unit circle plus a third body of mass
/// epsilon on the axis. The circular frequency is pinned by the geometry:
/// omega = sqrt(alpha / 2^(alpha+2)).
struct MacParams {
    double alpha;
    double epsilon;

    MacParams(double alpha_, double epsilon_) : alpha(alpha_), epsilon(epsilon_) {
        if (!(alpha > 2.0)) throw AlphaOutOfRange("MacMillan setup needs alpha > 2");
        if (epsilon < 0.0) throw PreconditionViolated("epsilon must be nonnegative");
    }

    double omega() const;
};

/// Axis oscillator of the massless problem: zddot + alpha z / (1+z^2)^((alpha+2)/2) = 0.
void mac_rhs(double alpha, double z, double v, double& zdot, double& vdot);

/// H(z, v) = v^2/2 - (1+z^2)^(-alpha/2); bounded below by -1.
double mac_hamiltonian(double alpha, double z, double v);

/// Symmetric-reduction coordinates: primaries at +-(x1, y1, z1) with
/// z1 = -epsilon z3, third body at (0, 0, z3).
struct ReducedState {
    double x1, y1, z3;
    double vx1, vy1, vz3;
};

/// Right-hand side of the reduced equations. Throws PrimaryCollision when the
/// primaries' half-separation falls under the floor.
std::array<double, 6> eps_mac_rhs(const MacParams& p, const ReducedState& s);

double primary_separation(const ReducedState& s);           // r12 = 2 sqrt(x1^2+y1^2)
double third_body_distance(const MacParams& p, const ReducedState& s); // r13

/// Conserved energy of the reduced problem.
double eps_energy(const MacParams& p, const ReducedState& s);

/// K_omega(x; epsilon); reduces to the massless threshold at epsilon = 0.
double eps_k_omega(const MacParams& p, const ReducedState& s);

/// E*(omega; epsilon) = (alpha/2 - 1)(epsilon + 2^-(alpha+2))^(2/(alpha+2)) 2^-alpha.
double eps_excited_energy(const MacParams& p);

/// Closed forms of the two reference planar problems at c = 4 omega: the
/// third body pinned at the origin (0-reference) and sent to infinity
/// (infinity-reference).
struct ReferenceProfile {
    double r0_ref;      // 2 (1 + 2^(alpha+1) epsilon)^(1/(alpha-2))
    double r_inf;       // 2
    double v0_4omega;   // 4 (alpha/2-1) 2^-(alpha+2) (1 + 2^(alpha+1) epsilon)^(-2/(alpha-2))
    double v_inf_4omega; // 4 E*(omega; 0)
};

ReferenceProfile reference_profile(const MacParams& p);

/// Membership in S = {E < v0_4omega/4, |A| = omega} plus the side of the
/// r0 boundary and a schematic region against the two threshold curves.
struct SRegionReport {
    bool in_s;
    int s_sign;  // +1: r12 > r0_ref, -1: r12 < r0_ref, 0: on the boundary band
    char region; // 'A'..'E', or 0 when not in S
};

SRegionReport s_region(const MacParams& p, const ReducedState& s);

struct TransitionConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-13;
    double t_max = 60.0;
    double r12_initial = 0.0; // 0: midway between r_inf and r0_ref
    double sample_dt = 0.02;
};

struct TransitionSample {
    double t;
    ReducedState state;
    double k;
    double energy;
};

struct TransitionResult {
    std::vector<double> transition_times; // deadbanded sign changes of K
    int count = 0;
    std::vector<TransitionSample> samples;
    double max_abs_k = 0.0;
    double energy_drift = 0.0;
    double mean_abs_z3_k_positive = 0.0;
    double mean_abs_z3_k_negative = 0.0;
    bool pattern_ok = false;  // K > 0 correlates with |z3| large
    bool truncated = false;   // run ended early (primary collision or escape)
    double t_end = 0.0;
    double r12_used = 0.0;    // initial separation, possibly secant-refined
};

/// Integrates the reduced system from the oscillating-third-body initial
/// condition (z3(0) = amplitude, z3dot = 0, primaries near the circular
/// radius with x1 ydot1 - y1 xdot1 = omega) and counts sign changes of
/// K_omega(x; epsilon). Sign changes use a small deadband so that the
/// epsilon = 0 control, where K vanishes identically, counts zero.
TransitionResult transition_experiment(const MacParams& p, double z3_amplitude,
                                       const TransitionConfig& config = {});

} // namespace nbodylab::macmillan

#endif
