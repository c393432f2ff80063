#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nbodylab/generators.hpp"
#include "nbodylab/invariants.hpp"
#include "nbodylab/rng.hpp"
#include "nbodylab/system.hpp"
#include "support/oracles.hpp"

using namespace nbodylab;

TEST_CASE("AlphaSystem validates masses, alpha and N") {
    CHECK_THROWS_AS(AlphaSystem({1.0}, 3.0), PreconditionViolated);
    CHECK_THROWS_AS(AlphaSystem({1.0, -1.0}, 3.0), PreconditionViolated);
    CHECK_THROWS_AS(AlphaSystem({1.0, 1.0}, 0.0), PreconditionViolated);
    const AlphaSystem sys({1.0, 2.0, 3.0}, 4.0);
    CHECK(sys.total_mass() == 6.0);
    CHECK(sys.min_mass() == 1.0);
}

TEST_CASE("potential at unit and doubled separation") {
    const AlphaSystem sys({1.0, 1.0}, 3.0);
    CHECK(potential(sys, oracles::two_body_on_axis(1.0).positions) == doctest::Approx(-1.0));
    CHECK(potential(sys, oracles::two_body_on_axis(2.0).positions) ==
          doctest::Approx(-1.0 / 8.0));
}

TEST_CASE("equilateral potential and degree -alpha homogeneity") {
    const AlphaSystem sys({1.0, 1.0, 1.0}, 4.0);
    const double s = 1.3;
    const std::vector<Vec3> q = oracles::equilateral(s);
    CHECK(potential(sys, q) == doctest::Approx(-3.0 / std::pow(s, 4)).epsilon(1e-12));

    std::vector<Vec3> doubled = q;
    for (Vec3& p : doubled) p *= 2.0;
    CHECK(potential(sys, doubled) ==
          doctest::Approx(potential(sys, q) / 16.0).epsilon(1e-12));
}

TEST_CASE("homogeneity of U and I under rescaling") {
    Rng rng(11);
    for (double alpha : {3.0, 4.0, 6.0}) {
        const AlphaSystem sys({1.0, 2.0, 0.5, 1.5}, alpha);
        const PhaseState st = generators::random_state(sys, rng);
        const InvariantRecord base = invariants(sys, st);
        for (double lam : {0.5, 2.0, 10.0}) {
            PhaseState scaled = st;
            for (Vec3& p : scaled.positions) p *= lam;
            const InvariantRecord rec = invariants(sys, scaled);
            CHECK(rec.potential ==
                  doctest::Approx(std::pow(lam, -alpha) * base.potential).epsilon(1e-12));
            CHECK(rec.inertia == doctest::Approx(lam * lam * base.inertia).epsilon(1e-12));
        }
    }
}

TEST_CASE("collision floor raises CollisionConfiguration") {
    const AlphaSystem sys({1.0, 1.0}, 3.0);
    std::vector<Vec3> q = {{1.0, 0.0, 0.0}, {1.0 + 1e-14, 0.0, 0.0}};
    CHECK_THROWS_AS(potential(sys, q), CollisionConfiguration);
}

TEST_CASE("accelerations are equal and opposite for a symmetric pair") {
    const AlphaSystem sys({1.0, 1.0}, 3.0);
    const std::vector<Vec3> q = oracles::two_body_on_axis(1.4).positions;
    const std::vector<Vec3> acc = accelerations(sys, q);
    CHECK(acc[0].x == doctest::Approx(-acc[1].x).epsilon(1e-14));
    CHECK(norm(acc[0] + acc[1]) < 1e-14);
    CHECK(acc[0].x < 0.0); // attraction
}

TEST_CASE("equilateral accelerations point at the centroid") {
    const AlphaSystem sys({1.0, 1.0, 1.0}, 4.0);
    const std::vector<Vec3> q = oracles::equilateral(1.0);
    const std::vector<Vec3> acc = accelerations(sys, q);
    for (int i = 0; i < 3; ++i) {
        // acceleration antiparallel to the position vector (centroid at origin)
        const double cosang = dot(acc[i], q[i]) / (norm(acc[i]) * norm(q[i]));
        CHECK(cosang == doctest::Approx(-1.0).epsilon(1e-12));
    }
}

TEST_CASE("accelerations match the finite-difference gradient of U") {
    Rng rng(42);
    const AlphaSystem sys({1.0, 2.0, 0.7}, 4.0);
    const PhaseState st = generators::random_state(sys, rng);
    const std::vector<Vec3> acc = accelerations(sys, st.positions);
    const std::vector<Vec3> fd = oracles::finite_difference_gradient(sys, st.positions);
    for (std::size_t i = 0; i < 3; ++i) {
        const Vec3 expected = -1.0 / sys.mass(i) * fd[i];
        CHECK(norm(acc[i] - expected) / norm(expected) < 1e-6);
    }
    // Newton's third law in aggregate
    Vec3 total{};
    for (std::size_t i = 0; i < 3; ++i) total += sys.mass(i) * acc[i];
    CHECK(norm(total) < 1e-12);
}

TEST_CASE("invariants of a velocity-free state") {
    const AlphaSystem sys({1.0, 1.0, 1.0}, 4.0);
    PhaseState st;
    st.positions = oracles::equilateral(2.0);
    st.velocities.assign(3, Vec3{});
    const InvariantRecord rec = invariants(sys, st);
    CHECK(rec.energy == rec.potential);
    CHECK(norm(rec.angular_momentum) == 0.0);
    CHECK(norm(rec.linear_momentum) == 0.0);
}

TEST_CASE("invariants of a circular relative equilibrium have V = 0") {
    // Two unit masses at distance d rotating rigidly: omega^2 = 2 alpha / d^(alpha+2).
    const double alpha = 4.0, d = 1.3;
    const AlphaSystem sys({1.0, 1.0}, alpha);
    const double omega = std::sqrt(2.0 * alpha / std::pow(d, alpha + 2.0));
    PhaseState st = oracles::two_body_on_axis(d);
    st.velocities[0] = {0.0, omega * d / 2.0, 0.0};
    st.velocities[1] = {0.0, -omega * d / 2.0, 0.0};
    const InvariantRecord rec = invariants(sys, st);
    CHECK(rec.virial == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(rec.inertia_accel) < 1e-12);
    // K_omega = 0 at a relative equilibrium forces omega^2 I = -alpha U
    CHECK(omega * omega * rec.inertia == doctest::Approx(-alpha * rec.potential).epsilon(1e-12));
}

TEST_CASE("moment of inertia of the unit pair") {
    const AlphaSystem sys({1.0, 1.0}, 3.0);
    PhaseState st = oracles::two_body_on_axis(2.0); // bodies at +-1
    st.velocities = {{0, 0.3, 0}, {0, -0.3, 0}};
    CHECK(invariants(sys, st).inertia == doctest::Approx(2.0));
}

TEST_CASE("record identity fields are computed from the same E and U") {
    Rng rng(3);
    const AlphaSystem sys({1.0, 2.0, 3.0}, 6.0);
    const PhaseState st = generators::random_state(sys, rng);
    const InvariantRecord rec = invariants(sys, st);
    CHECK(rec.virial == rec.energy + (sys.alpha() / 2.0 - 1.0) * rec.potential);
    CHECK(rec.inertia_accel == 4.0 * rec.virial);
}

TEST_CASE("to_com_frame is the identity on centered states") {
    Rng rng(5);
    const AlphaSystem sys({1.0, 2.0}, 3.0);
    PhaseState st = to_com_frame(sys, generators::random_state(sys, rng));
    const PhaseState again = to_com_frame(sys, st);
    for (std::size_t i = 0; i < st.size(); ++i) {
        CHECK(norm(again.positions[i] - st.positions[i]) < 1e-15);
        CHECK(norm(again.velocities[i] - st.velocities[i]) < 1e-15);
    }
}

TEST_CASE("align_angular_momentum sends A to the z-axis, preserving E and I") {
    const AlphaSystem sys({1.0, 1.0}, 3.0);
    // A along the x-axis: motion in the yz-plane.
    PhaseState st;
    st.positions = {{0.0, 1.0, 0.0}, {0.0, -1.0, 0.0}};
    st.velocities = {{0.0, 0.0, 0.7}, {0.0, 0.0, -0.7}};
    const InvariantRecord before = invariants(sys, st);
    CHECK(std::abs(before.angular_momentum.x) > 0.1);

    const PhaseState aligned = align_angular_momentum(sys, st);
    const InvariantRecord after = invariants(sys, aligned);
    CHECK(after.angular_momentum.x == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(after.angular_momentum.y == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(after.angular_momentum.z ==
          doctest::Approx(norm(before.angular_momentum)).epsilon(1e-12));
    CHECK(after.energy == doctest::Approx(before.energy).epsilon(1e-12));
    CHECK(after.inertia == doctest::Approx(before.inertia).epsilon(1e-12));
}

TEST_CASE("alignment of random four-body states preserves I") {
    Rng rng(9);
    const AlphaSystem sys({1.0, 2.0, 0.5, 1.0}, 4.0);
    for (int rep = 0; rep < 10; ++rep) {
        const PhaseState st = generators::random_state(sys, rng);
        const PhaseState aligned = align_angular_momentum(sys, st);
        CHECK(invariants(sys, aligned).inertia ==
              doctest::Approx(invariants(sys, st).inertia).epsilon(1e-12));
    }
}

TEST_CASE("alignment rejects vanishing angular momentum") {
    const AlphaSystem sys({1.0, 1.0}, 3.0);
    PhaseState st = oracles::two_body_on_axis(1.0); // at rest
    CHECK_THROWS_AS(align_angular_momentum(sys, st), ZeroAngularMomentum);
}

TEST_CASE("Sundman gap: equality for circular, kinetic for radial, nonnegative always") {
    const double alpha = 4.0, d = 1.0;
    const AlphaSystem sys({1.0, 1.0}, alpha);
    const double omega = std::sqrt(2.0 * alpha / std::pow(d, alpha + 2.0));
    PhaseState circ = oracles::two_body_on_axis(d);
    circ.velocities = {{0.0, omega * d / 2.0, 0.0}, {0.0, -omega * d / 2.0, 0.0}};
    CHECK(sundman_gap(sys, circ) == doctest::Approx(0.0).epsilon(1e-12));

    PhaseState radial = oracles::two_body_on_axis(d);
    radial.velocities = {{0.4, 0.0, 0.0}, {-0.4, 0.0, 0.0}};
    const double kinetic = 0.5 * (0.4 * 0.4) * 2.0;
    CHECK(sundman_gap(sys, radial) == doctest::Approx(kinetic).epsilon(1e-12));

    Rng rng(77);
    const AlphaSystem sys3({1.0, 2.0, 3.0}, 3.0);
    for (int rep = 0; rep < 200; ++rep)
        CHECK(sundman_gap(sys3, generators::random_state(sys3, rng)) >= -1e-12);
}
