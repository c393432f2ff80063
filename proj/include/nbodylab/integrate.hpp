#ifndef NBODYLAB_INTEGRATE_HPP
#define NBODYLAB_INTEGRATE_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nbodylab/invariants.hpp"
#include "nbodylab/system.hpp"
#include "nbodylab/threshold.hpp"

namespace nbodylab {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_init = 0.0; // 0: automatic
    double h_min = 1e-14;
    double h_max = 1.0;
    double collision_radius_factor = 1e-6; // times sqrt(I0 / M)
    double t_max = 50.0;
    double escape_window = 0.2;            // trailing fraction of the horizon
    double escape_radius_factor = 100.0;   // sqrt(I/I0) marking the Escape event
    double sample_interval = 0.0;          // 0: record every accepted step

    void validate() const;
};

enum class EventKind { Collision, KSignChange, AOmegaICrossing, Escape, HorizonReached };

const char* to_string(EventKind k);

struct TrajectoryEvent {
    double t;
    EventKind kind;
};

struct TrajectorySample {
    double t;
    PhaseState state;
    InvariantRecord invariants;
    double k_omega;
    SetLabel label;
};

enum class OutcomeKind { Collision, GlobalConsistent, Undecided };

const char* to_string(OutcomeKind k);

struct TrajectoryOutcome {
    OutcomeKind kind = OutcomeKind::Undecided;
    double t_collision = std::numeric_limits<double>::quiet_NaN();
    std::string reason;
};

struct TrajectoryRecord {
    std::vector<TrajectorySample> samples;
    std::vector<TrajectoryEvent> events;
    TrajectoryOutcome outcome;
    bool low_accuracy = false;
    double energy_drift = 0.0;
    double angular_momentum_drift = 0.0;
    double linear_momentum_drift = 0.0;
    long steps_accepted = 0;
    long steps_rejected = 0;
};

/// Adaptive integration of the N-body equations with event detection.
/// Events (collision, K_omega sign changes, |A| - omega I crossings, escape)
/// are located on the dense output by bisection to 1e-10 in time. Labels in
/// the samples require an excited energy; with e_star = NaN they read OutOfK.
TrajectoryRecord integrate(const AlphaSystem& sys, const PhaseState& state0, double omega,
                           const IntegratorConfig& config,
                           double e_star = std::numeric_limits<double>::quiet_NaN());

struct LabelInterval {
    double t_begin;
    double t_end;
    SetLabel label;
};

struct ClassifyResult {
    TrajectoryOutcome outcome;
    std::vector<LabelInterval> set_history;
    int transition_count = 0;   // label changes along the run
    int k_sign_changes = 0;     // KSignChange events
    bool theory_applicable = false; // E(state0) < e_star
    bool low_accuracy = false;
    TrajectoryRecord record;
};

/// Runs integrate and reduces the label sequence. Once the trajectory is seen
/// entering K1Minus from K2Minus (or starting there with Idot <= 0), any later
/// departure from K1Minus throws AutomatonViolation.
ClassifyResult classify_trajectory(const AlphaSystem& sys, double omega, const PhaseState& state0,
                                   double e_star, const IntegratorConfig& config);

struct VonZeipelProbe {
    double i_at_end;
    double i_sup_tail;
    double i_sup_run;
    bool bounded;
};

/// For a Collision record, reports the moment of inertia near the collision
/// time. alpha > 2 singularities are collisions of bounded configurations, so
/// I must stay finite and settle; bounded flags that behavior.
VonZeipelProbe von_zeipel_probe(const TrajectoryRecord& record);

} // namespace nbodylab

#endif
