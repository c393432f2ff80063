#include "nbodylab/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "nbodylab/ode.hpp"

namespace nbodylab {

void IntegratorConfig::validate() const {
    if (!(h_min < h_max)) throw PreconditionViolated("integrator needs h_min < h_max");
    if (!(rel_tol > 0.0) || rel_tol > 1e-2 || !(abs_tol > 0.0) || abs_tol > 1e-2)
        throw PreconditionViolated("integrator tolerances must lie in (0, 1e-2]");
    if (!(t_max > 0.0)) throw PreconditionViolated("t_max must be positive");
    if (!(collision_radius_factor > 0.0))
        throw PreconditionViolated("collision_radius_factor must be positive");
    if (!(escape_window > 0.0) || escape_window > 1.0)
        throw PreconditionViolated("escape_window must lie in (0, 1]");
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Collision: return "Collision";
        case EventKind::KSignChange: return "KSignChange";
        case EventKind::AOmegaICrossing: return "AOmegaICrossing";
        case EventKind::Escape: return "Escape";
        case EventKind::HorizonReached: return "HorizonReached";
    }
    return "HorizonReached";
}

const char* to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::Collision: return "Collision";
        case OutcomeKind::GlobalConsistent: return "GlobalConsistent";
        case OutcomeKind::Undecided: return "Undecided";
    }
    return "Undecided";
}

namespace {

void pack(const PhaseState& s, std::vector<double>& y) {
    const std::size_t n = s.size();
    y.resize(6 * n);
    for (std::size_t i = 0; i < n; ++i) {
        y[3 * i + 0] = s.positions[i].x;
        y[3 * i + 1] = s.positions[i].y;
        y[3 * i + 2] = s.positions[i].z;
        y[3 * (n + i) + 0] = s.velocities[i].x;
        y[3 * (n + i) + 1] = s.velocities[i].y;
        y[3 * (n + i) + 2] = s.velocities[i].z;
    }
}

PhaseState unpack(const std::vector<double>& y, std::size_t n, double t) {
    PhaseState s;
    s.time = t;
    s.positions.resize(n);
    s.velocities.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.positions[i] = {y[3 * i], y[3 * i + 1], y[3 * i + 2]};
        s.velocities[i] = {y[3 * (n + i)], y[3 * (n + i) + 1], y[3 * (n + i) + 2]};
    }
    return s;
}

double dmin_of(const std::vector<double>& y, std::size_t n) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = y[3 * i] - y[3 * j];
            const double dy = y[3 * i + 1] - y[3 * j + 1];
            const double dz = y[3 * i + 2] - y[3 * j + 2];
            best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
        }
    return best;
}

struct Monitors {
    double k;       // K_omega
    double a_gap;   // |A(0)| - omega I (A is conserved; the t = 0 value is exact)
    double dmin;
    double inertia;
    double pot_abs;
};

Monitors monitors_of(const AlphaSystem& sys, double omega, double a0_mag,
                     const std::vector<double>& y) {
    const PhaseState s = unpack(y, sys.size(), 0.0);
    const double u = potential(sys, s.positions);
    double inertia = 0.0;
    for (std::size_t i = 0; i < sys.size(); ++i)
        inertia += sys.mass(i) * norm2(s.positions[i]);
    return {omega * omega * inertia + sys.alpha() * u, a0_mag - omega * inertia,
            min_pair_distance(s.positions), inertia, std::abs(u)};
}

// Sign tracking with a relative deadband: an exact relative equilibrium has
// K identically zero and must not shed rounding-noise events.
struct ArmedSign {
    int sign = 0;
};

} // namespace

TrajectoryRecord integrate(const AlphaSystem& sys, const PhaseState& state0, double omega,
                           const IntegratorConfig& config, double e_star) {
    config.validate();
    require_valid_configuration(sys, state0.positions);
    const std::size_t n = sys.size();

    TrajectoryRecord rec;
    const InvariantRecord inv0 = invariants(sys, state0);
    const double r_coll = config.collision_radius_factor * std::sqrt(inv0.inertia / sys.total_mass());
    const double i_escape = inv0.inertia * config.escape_radius_factor * config.escape_radius_factor;

    Dopri5::Options opts;
    opts.rel_tol = config.rel_tol;
    opts.abs_tol = config.abs_tol;
    opts.h_init = config.h_init;
    opts.h_min = config.h_min;
    opts.h_max = config.h_max;

    Dopri5 stepper(6 * n, [&sys, n](double, const std::vector<double>& y, std::vector<double>& dydt) {
        const PhaseState s = unpack(y, n, 0.0);
        const std::vector<Vec3> acc = accelerations(sys, s.positions);
        dydt.resize(6 * n);
        for (std::size_t i = 0; i < n; ++i) {
            dydt[3 * i + 0] = s.velocities[i].x;
            dydt[3 * i + 1] = s.velocities[i].y;
            dydt[3 * i + 2] = s.velocities[i].z;
            dydt[3 * (n + i) + 0] = acc[i].x;
            dydt[3 * (n + i) + 1] = acc[i].y;
            dydt[3 * (n + i) + 2] = acc[i].z;
        }
    }, opts);

    std::vector<double> y0;
    pack(state0, y0);
    stepper.init(state0.time, std::move(y0));
    const double t_end = state0.time + config.t_max;

    double a_scale0 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        a_scale0 += sys.mass(i) * norm(state0.positions[i]) * norm(state0.velocities[i]);

    // Labels classify against the conserved energy and angular-momentum
    // magnitude evaluated at t0. Recomputing E next to a collision cancels
    // catastrophically (|U| ~ d^-alpha against an equally huge kinetic term),
    // which is a drift diagnostic, not a classification input.
    const double a0_mag = norm(inv0.angular_momentum);
    auto push_sample = [&](double t, const std::vector<double>& y) {
        PhaseState s = unpack(y, n, t);
        const InvariantRecord iv = invariants(sys, s);
        const double k = omega * omega * iv.inertia + sys.alpha() * iv.potential;
        InvariantRecord conserved = iv;
        conserved.energy = inv0.energy;
        conserved.angular_momentum = {0.0, 0.0, a0_mag};
        const SetLabel label = classify_record(sys.alpha(), omega, conserved, e_star, a_scale0);
        rec.samples.push_back({t, std::move(s), iv, k, label});
        rec.energy_drift = std::max(rec.energy_drift, std::abs(iv.energy - inv0.energy));
        rec.angular_momentum_drift = std::max(
            rec.angular_momentum_drift, norm(iv.angular_momentum - inv0.angular_momentum));
        rec.linear_momentum_drift =
            std::max(rec.linear_momentum_drift, norm(iv.linear_momentum - inv0.linear_momentum));
    };

    push_sample(state0.time, stepper.y());
    Monitors prev = monitors_of(sys, omega, a0_mag, stepper.y());
    ArmedSign k_armed, a_armed;
    {
        const double k_band0 = 1e-9 * (omega * omega * prev.inertia + sys.alpha() * prev.pot_abs);
        const double a_band0 = 1e-9 * (a0_mag + omega * prev.inertia);
        if (std::abs(prev.k) > k_band0) k_armed.sign = prev.k > 0.0 ? 1 : -1;
        if (std::abs(prev.a_gap) > a_band0) a_armed.sign = prev.a_gap > 0.0 ? 1 : -1;
    }
    bool escape_fired = false;
    double next_sample_t =
        config.sample_interval > 0.0 ? state0.time + config.sample_interval : state0.time;
    bool collided = false;
    double t_collision = std::numeric_limits<double>::quiet_NaN();
    const double tol_t = 1e-10;

    std::vector<double> ywork;
    while (stepper.t() < t_end) {
        const Dopri5::StepStatus st = stepper.step(t_end);
        if (st == Dopri5::StepStatus::MaxStepsReached)
            throw NoConvergence("integrator exceeded the step budget");
        if (st == Dopri5::StepStatus::MinStepReached) {
            // Either we are inside the collision neighbourhood, or the
            // closest pair is in a terminal plunge whose remaining fall time
            // is below the time representation itself (for large alpha that
            // happens at separations well above the collision radius). Only
            // a collapse away from both is a reportable integrator failure.
            const PhaseState here = unpack(stepper.y(), n, stepper.t());
            double d = std::numeric_limits<double>::infinity();
            std::size_t pi = 0, pj = 1;
            for (std::size_t i = 0; i + 1 < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double dij = norm(here.positions[i] - here.positions[j]);
                    if (dij < d) {
                        d = dij;
                        pi = i;
                        pj = j;
                    }
                }
            const bool approaching = dot(here.positions[pi] - here.positions[pj],
                                         here.velocities[pi] - here.velocities[pj]) < 0.0;
            const double fall_time =
                std::sqrt(2.0 * std::pow(d, sys.alpha() + 2.0) /
                          (sys.alpha() * (sys.mass(pi) + sys.mass(pj))));
            const double t_ulp = 1e4 * 2.3e-16 * (std::abs(stepper.t()) + 1.0);
            if (d < 1e3 * r_coll || (approaching && fall_time < t_ulp)) {
                collided = true;
                t_collision = stepper.t();
                push_sample(stepper.t(), stepper.y());
                break;
            }
            throw StepUnderflow("step size collapsed away from any near-collision pair",
                                stepper.t());
        }

        const double t1 = stepper.t();
        const Monitors cur = monitors_of(sys, omega, a0_mag, stepper.y());

        // Deadbanded sign-change detection on a dense sub-segment, probed at
        // the midpoint and the endpoint so the common double crossing within
        // one step still resolves into two events.
        auto process = [&](auto&& value_of, ArmedSign& armed, double band, double v_lo,
                           double t_lo, double v_probe, double t_probe, EventKind kind) {
            if (std::abs(v_probe) <= band) return;
            const int s = v_probe > 0.0 ? 1 : -1;
            if (armed.sign == 0) {
                armed.sign = s;
                return;
            }
            if (s == armed.sign) return;
            double te = t_lo;
            if ((v_lo < 0.0) != (v_probe < 0.0)) {
                auto g = [&](double, const std::vector<double>& y) { return value_of(y); };
                te = bisect_event(stepper, g, t_lo, t_probe, v_lo, tol_t);
            }
            rec.events.push_back({te, kind});
            stepper.dense(te, ywork);
            push_sample(te, ywork);
            armed.sign = s;
        };
        auto k_of = [&](const std::vector<double>& y) {
            return monitors_of(sys, omega, a0_mag, y).k;
        };
        auto a_of = [&](const std::vector<double>& y) {
            return monitors_of(sys, omega, a0_mag, y).a_gap;
        };
        const double k_band = 1e-9 * (omega * omega * cur.inertia + sys.alpha() * cur.pot_abs);
        const double a_band = 1e-9 * (a0_mag + omega * cur.inertia);
        auto scan_events = [&](double t_lo, const Monitors& lo, double t_hi, const Monitors& hi) {
            const double tmid = 0.5 * (t_lo + t_hi);
            stepper.dense(tmid, ywork);
            const Monitors mid = monitors_of(sys, omega, a0_mag, ywork);
            process(k_of, k_armed, k_band, lo.k, t_lo, mid.k, tmid, EventKind::KSignChange);
            process(a_of, a_armed, a_band, lo.a_gap, t_lo, mid.a_gap, tmid,
                    EventKind::AOmegaICrossing);
            process(k_of, k_armed, k_band, mid.k, tmid, hi.k, t_hi, EventKind::KSignChange);
            process(a_of, a_armed, a_band, mid.a_gap, tmid, hi.a_gap, t_hi,
                    EventKind::AOmegaICrossing);
        };

        // Collision truncates the record; crossings up to the collision time
        // are still scanned.
        if (cur.dmin < r_coll && prev.dmin >= r_coll) {
            auto g = [&](double t, const std::vector<double>& y) {
                (void)t;
                return dmin_of(y, n) - r_coll;
            };
            const double tc =
                bisect_event(stepper, g, stepper.t_prev(), t1, prev.dmin - r_coll, tol_t);
            stepper.dense(tc, ywork);
            const Monitors at_tc = monitors_of(sys, omega, a0_mag, ywork);
            scan_events(stepper.t_prev(), prev, tc, at_tc);
            stepper.dense(tc, ywork);
            rec.events.push_back({tc, EventKind::Collision});
            collided = true;
            t_collision = tc;
            push_sample(tc, ywork);
            break;
        }
        if (cur.dmin < r_coll) { // started the step already inside
            collided = true;
            t_collision = stepper.t_prev();
            rec.events.push_back({t_collision, EventKind::Collision});
            break;
        }

        scan_events(stepper.t_prev(), prev, t1, cur);

        if (!escape_fired && cur.inertia > i_escape) {
            escape_fired = true;
            rec.events.push_back({t1, EventKind::Escape});
        }

        if (config.sample_interval <= 0.0) {
            push_sample(t1, stepper.y());
        } else {
            while (next_sample_t <= t1 + 1e-15) {
                if (next_sample_t > stepper.t_prev() - 1e-15) {
                    stepper.dense(std::min(next_sample_t, t1), ywork);
                    push_sample(std::min(next_sample_t, t1), ywork);
                }
                next_sample_t += config.sample_interval;
            }
        }
        prev = cur;
    }

    if (collided) {
        rec.outcome.kind = OutcomeKind::Collision;
        rec.outcome.t_collision = t_collision;
        rec.outcome.reason = "minimum pairwise distance crossed the collision radius";
        if (rec.events.empty() || rec.events.back().kind != EventKind::Collision)
            rec.events.push_back({t_collision, EventKind::Collision});
    } else {
        if (rec.samples.empty() || rec.samples.back().t < t_end - 1e-12) {
            push_sample(stepper.t(), stepper.y());
        }
        rec.events.push_back({stepper.t(), EventKind::HorizonReached});
        rec.outcome.kind = OutcomeKind::Undecided;
        rec.outcome.reason = "horizon reached";
    }

    std::stable_sort(rec.events.begin(), rec.events.end(),
                     [](const TrajectoryEvent& a, const TrajectoryEvent& b) { return a.t < b.t; });
    std::stable_sort(rec.samples.begin(), rec.samples.end(),
                     [](const TrajectorySample& a, const TrajectorySample& b) { return a.t < b.t; });
    rec.samples.erase(std::unique(rec.samples.begin(), rec.samples.end(),
                                  [](const TrajectorySample& a, const TrajectorySample& b) {
                                      return a.t == b.t;
                                  }),
                      rec.samples.end());

    rec.low_accuracy = rec.energy_drift > 1e-8 * (1.0 + std::abs(inv0.energy));
    rec.steps_accepted = stepper.accepted();
    rec.steps_rejected = stepper.rejected();
    return rec;
}

ClassifyResult classify_trajectory(const AlphaSystem& sys, double omega, const PhaseState& state0,
                                   double e_star, const IntegratorConfig& config) {
    ClassifyResult out;
    out.record = integrate(sys, state0, omega, config, e_star);
    const TrajectoryRecord& rec = out.record;
    out.low_accuracy = rec.low_accuracy;

    const double e0 = rec.samples.front().invariants.energy;
    out.theory_applicable = std::isfinite(e_star) && e0 < e_star;

    for (const TrajectorySample& s : rec.samples) {
        if (!out.set_history.empty() && out.set_history.back().label == s.label) {
            out.set_history.back().t_end = s.t;
        } else {
            out.set_history.push_back({s.t, s.t, s.label});
        }
    }
    out.transition_count = static_cast<int>(out.set_history.size()) - 1;
    for (const TrajectoryEvent& e : rec.events)
        if (e.kind == EventKind::KSignChange) ++out.k_sign_changes;

    // K1Minus, once entered from K2Minus (or held from the start with
    // Idot <= 0), is never left: I is concave there and already below
    // |A|/omega, so it cannot climb back.
    bool locked = false;
    for (std::size_t i = 0; i < out.set_history.size(); ++i) {
        const SetLabel label = out.set_history[i].label;
        if (locked && label != SetLabel::K1Minus)
            throw AutomatonViolation("trajectory left K1Minus after locking into it");
        if (label == SetLabel::K1Minus) {
            if (i > 0 && out.set_history[i - 1].label == SetLabel::K2Minus) locked = true;
            if (i == 0 && rec.samples.front().invariants.inertia_rate <= 0.0) locked = true;
        }
    }

    if (rec.outcome.kind == OutcomeKind::Collision) {
        out.outcome = rec.outcome;
        return out;
    }

    if (!out.theory_applicable) {
        out.outcome.kind = OutcomeKind::Undecided;
        out.outcome.reason = "energy is not below the excited energy; theorems do not apply";
        return out;
    }

    // GlobalConsistent: the trailing escape window stays in K2Plus with
    // K_omega bounded away from zero and a nondecreasing minimum distance.
    const double t_end = rec.samples.back().t;
    const double window_start = t_end - config.escape_window * config.t_max;
    bool tail_ok = false;
    double last_dmin = -1.0;
    for (const TrajectorySample& s : rec.samples) {
        if (s.t < window_start) continue;
        const double k_scale = omega * omega * s.invariants.inertia +
                               sys.alpha() * std::abs(s.invariants.potential);
        const double dmin = min_pair_distance(s.state.positions);
        const bool in_kplus = s.label == SetLabel::K2Plus && s.k_omega > 1e-6 * k_scale;
        const bool expanding = last_dmin < 0.0 || dmin >= last_dmin * (1.0 - 1e-9);
        if (!in_kplus || !expanding) {
            tail_ok = false;
            break;
        }
        tail_ok = true;
        last_dmin = dmin;
    }
    if (tail_ok) {
        out.outcome.kind = OutcomeKind::GlobalConsistent;
        out.outcome.reason =
            "trailing window stayed in K2Plus with K_omega bounded away from zero and "
            "nondecreasing minimum pairwise distance";
    } else {
        out.outcome.kind = OutcomeKind::Undecided;
        out.outcome.reason = "no theorem hypothesis was observed to hold on the tail";
    }
    return out;
}

VonZeipelProbe von_zeipel_probe(const TrajectoryRecord& record) {
    if (record.outcome.kind != OutcomeKind::Collision)
        throw PreconditionViolated("von_zeipel_probe needs a Collision record");
    VonZeipelProbe out{0.0, 0.0, 0.0, false};
    const double t0 = record.samples.front().t;
    const double t1 = record.samples.back().t;
    const double tail_start = t1 - 0.1 * (t1 - t0);
    double i_mid_tail = record.samples.back().invariants.inertia;
    for (const TrajectorySample& s : record.samples) {
        out.i_sup_run = std::max(out.i_sup_run, s.invariants.inertia);
        if (s.t >= tail_start) {
            out.i_sup_tail = std::max(out.i_sup_tail, s.invariants.inertia);
            if (s.t <= 0.5 * (tail_start + t1)) i_mid_tail = s.invariants.inertia;
        }
    }
    out.i_at_end = record.samples.back().invariants.inertia;
    // Bounded collision: I stays finite and settles toward its limit instead
    // of ramping up the way a non-collision singularity would force it to.
    out.bounded = std::isfinite(out.i_sup_run) &&
                  std::abs(out.i_at_end - i_mid_tail) <= 0.25 * (1.0 + out.i_sup_run);
    return out;
}

} // namespace nbodylab
