#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nbodylab/equilibria.hpp"
#include "nbodylab/generators.hpp"
#include "nbodylab/integrate.hpp"
#include "nbodylab/kepler.hpp"
#include "nbodylab/ode.hpp"
#include "nbodylab/threshold.hpp"
#include "support/oracles.hpp"

using namespace nbodylab;

namespace {

IntegratorConfig tight(double t_max) {
    IntegratorConfig ic;
    ic.rel_tol = 1e-11;
    ic.abs_tol = 1e-13;
    ic.t_max = t_max;
    return ic;
}

} // namespace

TEST_CASE("stepper and dense output against the exact harmonic oscillator") {
    Dopri5::Options opts;
    opts.rel_tol = 1e-11;
    opts.abs_tol = 1e-13;
    Dopri5 stepper(2, [](double, const std::vector<double>& y, std::vector<double>& d) {
        d = {y[1], -y[0]};
    }, opts);
    stepper.init(0.0, {1.0, 0.0});
    std::vector<double> yq;
    double worst_dense = 0.0;
    while (stepper.t() < 10.0) {
        REQUIRE(stepper.step(10.0) == Dopri5::StepStatus::Ok);
        // probe interior of every accepted step
        for (double f : {0.25, 0.5, 0.75}) {
            const double tq = stepper.t_prev() + f * (stepper.t() - stepper.t_prev());
            stepper.dense(tq, yq);
            worst_dense = std::max(worst_dense, std::abs(yq[0] - std::cos(tq)));
        }
    }
    CHECK(std::abs(stepper.y()[0] - std::cos(10.0)) < 1e-9);
    CHECK(std::abs(stepper.y()[1] + std::sin(10.0)) < 1e-9);
    CHECK(worst_dense < 1e-8);
}

TEST_CASE("circular two-body relative equilibrium closes after one period") {
    const AlphaSystem sys({0.5, 0.5}, 4.0);
    const double omega = 2.0;
    const equilibria::CentralConfig cc =
        equilibria::central_config_solve(sys, omega, {{0.6, 0, 0}, {-0.6, 0, 0}});
    const PhaseState st = equilibria::relative_equilibrium_state(sys, cc);
    IntegratorConfig ic = tight(2.0 * 3.14159265358979323846 / omega);
    ic.rel_tol = 1e-12;
    ic.h_max = 0.02;
    const TrajectoryRecord rec = integrate(sys, st, omega, ic);
    REQUIRE(rec.outcome.kind != OutcomeKind::Collision);
    int k_changes = 0;
    for (const TrajectoryEvent& e : rec.events)
        if (e.kind == EventKind::KSignChange) ++k_changes;
    CHECK(k_changes == 0);
    const PhaseState& last = rec.samples.back().state;
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(norm(last.positions[i] - st.positions[i]) < 1e-8);
        CHECK(norm(last.velocities[i] - st.velocities[i]) < 1e-8);
    }
}

TEST_CASE("equilateral triangle at rest collapses homothetically") {
    const AlphaSystem sys({1.0, 1.0, 1.0}, 4.0);
    PhaseState st;
    st.positions = oracles::equilateral(2.0);
    st.velocities.assign(3, Vec3{});
    const TrajectoryRecord rec = integrate(sys, st, 1.0, tight(50.0));
    REQUIRE(rec.outcome.kind == OutcomeKind::Collision);
    CHECK(std::isfinite(rec.outcome.t_collision));

    SUBCASE("von Zeipel probe sees bounded, shrinking inertia") {
        const VonZeipelProbe probe = von_zeipel_probe(rec);
        CHECK(probe.bounded);
        CHECK(probe.i_at_end < 1e-3 * probe.i_sup_run);
    }
    SUBCASE("halving the collision radius factor moves the time by < 1e-3") {
        IntegratorConfig ic = tight(50.0);
        ic.collision_radius_factor = 0.5e-6;
        const TrajectoryRecord rec2 = integrate(sys, st, 1.0, ic);
        REQUIRE(rec2.outcome.kind == OutcomeKind::Collision);
        CHECK(std::abs(rec2.outcome.t_collision - rec.outcome.t_collision) < 1e-3);
    }
}

TEST_CASE("von Zeipel probe on a two-body sub-threshold collision") {
    // K- state below the two-body excited energy: Iddot < -4 delta, so
    // I stays under the concave parabola I0 + Idot0 t + Idot0^2/(8 delta).
    const double alpha = 4.0, omega = 2.0;
    const AlphaSystem sys({0.5, 0.5}, alpha);
    const kepler::TwoBodyThresholds th = kepler::twobody_thresholds(0.5, 0.5, alpha, omega);
    const PhaseState st = generators::twobody_state(sys, 0.7, 0.35, 2.0);
    const InvariantRecord rec0 = invariants(sys, st);
    REQUIRE(rec0.energy < th.e_star);
    const TrajectoryRecord rec = integrate(sys, st, omega, tight(50.0), th.e_star);
    REQUIRE(rec.outcome.kind == OutcomeKind::Collision);
    const VonZeipelProbe probe = von_zeipel_probe(rec);
    CHECK(probe.bounded);
    const double delta = th.e_star - rec0.energy;
    const double parabola_max =
        rec0.inertia + std::max(0.0, rec0.inertia_rate) * rec0.inertia_rate / (8.0 * delta);
    CHECK(probe.i_sup_run <= parabola_max * (1.0 + 1e-9));
}

TEST_CASE("von Zeipel probe demands a collision record") {
    const AlphaSystem sys({1.0, 1.0}, 4.0);
    Rng rng(5);
    const PhaseState st = generators::expanding_state(sys, rng);
    const TrajectoryRecord rec = integrate(sys, st, 1.0, tight(2.0));
    CHECK(rec.outcome.kind != OutcomeKind::Collision);
    CHECK_THROWS_AS(von_zeipel_probe(rec), PreconditionViolated);
}

TEST_CASE("negative-energy states collide before the Lagrange-Jacobi parabola root") {
    Rng rng(23);
    const AlphaSystem sys({1.0, 1.0, 1.0}, 4.0);
    int tested = 0;
    while (tested < 8) {
        PhaseState st = generators::random_state(sys, rng, 1.0, 0.3);
        const InvariantRecord rec0 = invariants(sys, st);
        if (rec0.energy >= -0.05) continue;
        ++tested;
        const TrajectoryRecord rec = integrate(sys, st, 1.0, tight(100.0));
        REQUIRE(rec.outcome.kind == OutcomeKind::Collision);
        // Iddot <= 4E: I(t) <= I0 + Idot0 t + 2 E t^2, positive root bounds the time
        const double e = rec0.energy, i0 = rec0.inertia, idot0 = rec0.inertia_rate;
        const double t_star =
            (idot0 + std::sqrt(idot0 * idot0 - 8.0 * e * i0)) / (-4.0 * e);
        CHECK(rec.outcome.t_collision <= t_star + 1e-6);
    }
}

TEST_CASE("conservation and drift accounting") {
    Rng rng(31);
    for (double alpha : {3.0, 4.0}) {
        const AlphaSystem sys({1.0, 0.8, 1.2}, alpha);
        const PhaseState st = generators::expanding_state(sys, rng);
        const TrajectoryRecord rec = integrate(sys, st, 1.0, tight(50.0));
        REQUIRE(rec.outcome.kind != OutcomeKind::Collision);
        const InvariantRecord rec0 = invariants(sys, st);
        CHECK(rec.energy_drift < 1e-8 * (1.0 + std::abs(rec0.energy)));
        CHECK(rec.angular_momentum_drift < 1e-8 * (1.0 + norm(rec0.angular_momentum)));
        CHECK(rec.linear_momentum_drift < 1e-8 * (1.0 + norm(rec0.linear_momentum)));
        CHECK_FALSE(rec.low_accuracy);
    }
}

TEST_CASE("Lagrange-Jacobi via central differences with h-refinement") {
    // Early phase of the homothetic collapse: smooth but with a fourth
    // derivative of I that is far above the interpolation noise floor.
    const AlphaSystem sys({1.0, 1.0, 1.0}, 4.0);
    PhaseState st;
    st.positions = oracles::equilateral(2.0);
    st.velocities.assign(3, Vec3{});

    // Central difference at a fixed center so both step sizes see the same
    // fourth derivative of I.
    const double t_center = 0.8;
    auto error_at_step = [&](double h) {
        IntegratorConfig cfg;
        cfg.rel_tol = 1e-12;
        cfg.abs_tol = 1e-14;
        cfg.h_max = 0.02;
        cfg.t_max = 1.2;
        cfg.sample_interval = h;
        const TrajectoryRecord rec = integrate(sys, st, 1.0, cfg);
        auto inertia_at = [&](double t) {
            for (const TrajectorySample& s : rec.samples)
                if (std::abs(s.t - t) < 1e-9) return s.invariants.inertia;
            FAIL("missing sample at t = " << t);
            return 0.0;
        };
        double accel_center = 0.0;
        for (const TrajectorySample& s : rec.samples)
            if (std::abs(s.t - t_center) < 1e-9) accel_center = s.invariants.inertia_accel;
        const double second =
            (inertia_at(t_center + h) - 2.0 * inertia_at(t_center) + inertia_at(t_center - h)) /
            (h * h);
        return std::abs(second - accel_center);
    };
    const double coarse = error_at_step(0.2);
    const double fine = error_at_step(0.1);
    REQUIRE(fine > 0.0);
    const double ratio = coarse / fine;
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("K sign change events land on the zero set") {
    // An oscillating state: triangle slightly inflated with inward velocity
    // crosses K = 0 at least once.
    const AlphaSystem sys({1.0, 1.0, 1.0}, 4.0);
    PhaseState st;
    st.positions = oracles::equilateral(2.2);
    st.velocities.assign(3, Vec3{});
    for (int i = 0; i < 3; ++i) st.velocities[i] = -0.1 * st.positions[i];
    const TrajectoryRecord rec = integrate(sys, st, 1.0, tight(20.0));
    int found = 0;
    for (const TrajectoryEvent& e : rec.events) {
        if (e.kind != EventKind::KSignChange) continue;
        ++found;
        // locate the sample recorded at the event time
        for (const TrajectorySample& s : rec.samples)
            if (s.t == e.t) {
                const double scale = 1.0 * s.invariants.inertia +
                                     sys.alpha() * std::abs(s.invariants.potential);
                CHECK(std::abs(s.k_omega) < 1e-8 * scale);
            }
    }
    CHECK(found >= 1);
}

TEST_CASE("classify_trajectory") {
    const double alpha = 4.0, omega = 1.0;
    const AlphaSystem sys({1.0, 1.0, 1.0}, alpha);
    const double e_star = equilibria::equal_mass_3body_closed_forms(alpha, omega).e_triangle;
    const equilibria::CentralConfig cc =
        equilibria::central_config_solve(sys, omega, oracles::equilateral(1.3));

    SUBCASE("K1Minus with Idot <= 0 collides and never leaves the set") {
        const PhaseState st = generators::shrunk_circular_state(sys, cc.positions, omega, 0.75);
        const ClassifyResult res = classify_trajectory(sys, omega, st, e_star, tight(50.0));
        CHECK(res.theory_applicable);
        CHECK(res.outcome.kind == OutcomeKind::Collision);
        for (const LabelInterval& iv : res.set_history) CHECK(iv.label == SetLabel::K1Minus);
    }

    SUBCASE("expanding triangle transitions to K2Plus and reads GlobalConsistent") {
        PhaseState st;
        st.positions = oracles::equilateral(1.0);
        st.velocities.assign(3, Vec3{});
        // positive energy below E*, K_omega < 0 initially, expanding
        for (int i = 0; i < 3; ++i)
            st.velocities[i] = 2.5 * st.positions[i] + 0.5 * jrot(st.positions[i]);
        const InvariantRecord rec0 = invariants(sys, st);
        REQUIRE(rec0.energy > 0.0);
        REQUIRE(rec0.energy < e_star);
        REQUIRE(k_omega(sys, omega, st.positions) < 0.0);

        const ClassifyResult res = classify_trajectory(sys, omega, st, e_star, tight(50.0));
        CHECK(res.outcome.kind == OutcomeKind::GlobalConsistent);
        CHECK(res.set_history.back().label == SetLabel::K2Plus);
        CHECK(res.k_sign_changes >= 1);
    }

    SUBCASE("E above E* only flags, never certifies") {
        Rng rng(3);
        PhaseState st = generators::expanding_state(sys, rng, 4.0, 1.5);
        const InvariantRecord rec0 = invariants(sys, st);
        REQUIRE(rec0.energy >= e_star);
        const ClassifyResult res = classify_trajectory(sys, omega, st, e_star, tight(10.0));
        CHECK_FALSE(res.theory_applicable);
        CHECK(res.outcome.kind == OutcomeKind::Undecided);
    }

    SUBCASE("label transitions obey the automaton on a mixed ensemble") {
        Rng rng(19);
        int runs = 0;
        while (runs < 25) {
            PhaseState st = generators::random_state(sys, rng, 1.3, 0.35);
            const InvariantRecord rec0 = invariants(sys, st);
            if (rec0.energy >= e_star || norm(rec0.angular_momentum) == 0.0) continue;
            ++runs;
            const ClassifyResult res = classify_trajectory(sys, omega, st, e_star, tight(30.0));
            for (std::size_t i = 0; i + 1 < res.set_history.size(); ++i) {
                const SetLabel a = res.set_history[i].label;
                const SetLabel b = res.set_history[i + 1].label;
                const bool allowed = (a == SetLabel::K2Minus && b == SetLabel::K1Minus) ||
                                     (a == SetLabel::K2Minus && b == SetLabel::K2Plus) ||
                                     (a == SetLabel::K2Plus && b == SetLabel::K2Minus) ||
                                     (a == SetLabel::K1Minus && b == SetLabel::K2Minus);
                CHECK(allowed);
            }
        }
    }
}

TEST_CASE("step underflow away from collisions is reported, not swallowed") {
    const AlphaSystem sys({1.0, 1.0}, 4.0);
    PhaseState st = oracles::two_body_on_axis(2.0);
    st.velocities = {{0, 0.4, 0}, {0, -0.4, 0}};
    IntegratorConfig ic;
    ic.rel_tol = 1e-12;
    ic.abs_tol = 1e-14;
    ic.h_min = 0.2; // force the controller below its floor on a smooth stretch
    ic.h_max = 0.5;
    ic.t_max = 10.0;
    CHECK_THROWS_AS(integrate(sys, st, 1.0, ic), StepUnderflow);
}

TEST_CASE("steep-potential plunges resolve as collisions, not step underflow") {
    // At alpha = 6 the fall time at separation d scales like d^4; it drops
    // below the time representation while d is still far above the collision
    // radius. Such runs must come back as collisions.
    const double alpha = 6.0, omega = 1.5;
    const AlphaSystem sys({0.5, 0.5}, alpha);
    const double c = kepler::omega_to_c(alpha, omega);
    const kepler::CriticalPoint cp = kepler::critical_point({alpha, c});
    const PhaseState st = generators::twobody_state(sys, 0.5 * cp.r0, 0.0, c);
    const TrajectoryRecord rec = integrate(sys, st, omega, tight(40.0));
    CHECK(rec.outcome.kind == OutcomeKind::Collision);
    CHECK(std::isfinite(rec.outcome.t_collision));
}
