#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nbodylab/equilibria.hpp"
#include "nbodylab/generators.hpp"
#include "nbodylab/threshold.hpp"
#include "support/oracles.hpp"

using namespace nbodylab;

TEST_CASE("K_omega and E_omega direct evaluation") {
    const AlphaSystem sys({1.0, 1.0}, 4.0);
    const std::vector<Vec3> q = oracles::two_body_on_axis(1.0).positions; // I = 1/2, U = -1
    CHECK(k_omega(sys, 1.0, q) == doctest::Approx(-3.5).epsilon(1e-14));
    CHECK(e_omega(sys, 1.0, q) == doctest::Approx(0.25 - 1.0).epsilon(1e-14));
}

TEST_CASE("on {K_omega = 0} the energy collapses to -(alpha/2 - 1) U") {
    Rng rng(21);
    const AlphaSystem sys({1.0, 2.0, 3.0}, 4.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<Vec3> q = generators::random_state(sys, rng).positions;
        const double k = k_omega(sys, 1.0, q);
        const double lam = k < 0.0 ? scale_to_null_up(sys, 1.0, q)
                                   : scale_to_null_down(sys, 1.0, q);
        for (Vec3& p : q) p *= lam;
        CHECK(e_omega(sys, 1.0, q) ==
              doctest::Approx(-(sys.alpha() / 2.0 - 1.0) * potential(sys, q)).epsilon(1e-9));
    }
}

TEST_CASE("K_omega homogeneity under rigid scaling") {
    Rng rng(2);
    const AlphaSystem sys({1.0, 1.5, 2.0}, 3.0);
    const std::vector<Vec3> q = generators::random_state(sys, rng).positions;
    PhaseState probe;
    probe.positions = q;
    probe.velocities.assign(3, Vec3{});
    const double inertia = invariants(sys, probe).inertia;
    const double u = potential(sys, q);
    for (double lam : {0.5, 2.0}) {
        std::vector<Vec3> scaled = q;
        for (Vec3& p : scaled) p *= lam;
        const double expected = lam * lam * inertia + std::pow(lam, -3.0) * 3.0 * u;
        CHECK(k_omega(sys, 1.0, scaled) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("scale_to_null_up: closed form and bisection oracle agree") {
    const AlphaSystem sys({1.0, 1.0}, 4.0);
    const std::vector<Vec3> q = oracles::two_body_on_axis(1.0).positions;
    // lambda^(alpha+2) = -alpha U / (omega^2 I) = 8, so lambda = 8^(1/6) = sqrt(2)
    const double lam = scale_to_null_up(sys, 1.0, q);
    CHECK(lam == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

    std::vector<Vec3> null = q;
    for (Vec3& p : null) p *= lam;
    CHECK(std::abs(k_omega(sys, 1.0, null)) < 1e-9);
    CHECK_THROWS_AS(scale_to_null_up(sys, 1.0, null), PreconditionViolated);
}

TEST_CASE("scale_to_null_up on random sub-null configurations") {
    Rng rng(31);
    const AlphaSystem sys({1.0, 2.0, 0.5}, 4.0);
    int tested = 0;
    while (tested < 30) {
        std::vector<Vec3> q = generators::random_state(sys, rng, 0.6).positions;
        if (k_omega(sys, 1.0, q) >= 0.0) continue;
        ++tested;
        const double lam = scale_to_null_up(sys, 1.0, q);
        CHECK(lam > 1.0);

        // Independent bisection oracle on f(lambda) = K(lambda x).
        auto f = [&](double l) {
            std::vector<Vec3> s = q;
            for (Vec3& p : s) p *= l;
            return k_omega(sys, 1.0, s);
        };
        CHECK(lam == doctest::Approx(oracles::bisect(f, 1.0, 50.0)).epsilon(1e-9));

        std::vector<Vec3> null = q;
        for (Vec3& p : null) p *= lam;
        CHECK(std::abs(k_omega(sys, 1.0, null)) < 1e-9);
        // scaling outward to the null set loses potential depth
        CHECK(-potential(sys, q) > -potential(sys, null));
    }
}

TEST_CASE("scale_to_null_down: closed form, re-feed rejection, energy drop") {
    const AlphaSystem sys({1.0, 1.0}, 4.0);
    std::vector<Vec3> q = oracles::two_body_on_axis(4.0).positions; // I = 8, U = -4^-4
    CHECK(k_omega(sys, 1.0, q) > 0.0);
    const double lam = scale_to_null_down(sys, 1.0, q);
    CHECK(lam == doctest::Approx(std::pow(4.0 * std::pow(4.0, -4.0) / 8.0, 1.0 / 6.0))
                     .epsilon(1e-10));
    std::vector<Vec3> null = q;
    for (Vec3& p : null) p *= lam;
    CHECK_THROWS_AS(scale_to_null_down(sys, 1.0, null), PreconditionViolated);

    Rng rng(8);
    const AlphaSystem sys3({1.0, 1.0, 1.0}, 4.0);
    int tested = 0;
    while (tested < 100) {
        std::vector<Vec3> big = generators::random_state(sys3, rng, 3.0).positions;
        if (k_omega(sys3, 1.0, big) <= 0.0) continue;
        ++tested;
        const double l = scale_to_null_down(sys3, 1.0, big);
        CHECK(l > 0.0);
        CHECK(l < 1.0);
        std::vector<Vec3> nulled = big;
        for (Vec3& p : nulled) p *= l;
        CHECK(e_omega(sys3, 1.0, big) > e_omega(sys3, 1.0, nulled));
    }
}

TEST_CASE("scaling lemmas against the closed-form excited level") {
    // Equal masses: U*(omega) and E*(omega) from the collinear closed form.
    const double alpha = 4.0, omega = 1.0;
    const AlphaSystem sys({1.0, 1.0, 1.0}, alpha);
    const auto forms = equilibria::equal_mass_3body_closed_forms(alpha, omega);
    const double e_star = forms.e_triangle; // the excited energy: triangle family
    const double u_star = e_star / (alpha / 2.0 - 1.0);

    Rng rng(55);
    int below = 0, above = 0;
    while (below < 40 || above < 40) {
        std::vector<Vec3> q = generators::random_state(sys, rng, 1.0 + rng.uniform() * 3.0)
                                  .positions;
        const double k = k_omega(sys, omega, q);
        if (k < 0.0 && below < 40) {
            ++below;
            const double lam = scale_to_null_up(sys, omega, q);
            std::vector<Vec3> null = q;
            for (Vec3& p : null) p *= lam;
            CHECK(-potential(sys, q) > -potential(sys, null));
            CHECK(-potential(sys, null) >= u_star * (1.0 - 1e-9));
        } else if (k > 0.0 && above < 40) {
            ++above;
            const double lam = scale_to_null_down(sys, omega, q);
            std::vector<Vec3> null = q;
            for (Vec3& p : null) p *= lam;
            CHECK(e_omega(sys, omega, q) > e_omega(sys, omega, null));
            CHECK(e_omega(sys, omega, null) >= e_star * (1.0 - 1e-9));
        }
    }
}

TEST_CASE("rotating-frame energy identity") {
    const double alpha = 4.0, d = 1.2;
    const AlphaSystem sys({1.0, 1.0}, alpha);
    const double omega = std::sqrt(2.0 * alpha / std::pow(d, alpha + 2.0));

    SUBCASE("planar relative equilibrium: no rotating kinetic term") {
        PhaseState st = oracles::two_body_on_axis(d);
        st.velocities = {{0.0, omega * d / 2.0, 0.0}, {0.0, -omega * d / 2.0, 0.0}};
        const RotatingEnergyDecomposition dec = rotating_energy_decomposition(sys, omega, st);
        CHECK(dec.rotating_kinetic == doctest::Approx(0.0).epsilon(1e-14));
        const InvariantRecord rec = invariants(sys, st);
        CHECK(rec.energy ==
              doctest::Approx(-0.5 * omega * omega * rec.inertia + rec.potential +
                              omega * rec.angular_momentum.z)
                  .epsilon(1e-12));
    }

    SUBCASE("A3 = 0 state with purely vertical motion") {
        PhaseState st = oracles::two_body_on_axis(d);
        st.velocities = {{0.0, 0.0, 0.5}, {0.0, 0.0, -0.5}};
        const RotatingEnergyDecomposition dec = rotating_energy_decomposition(sys, 1.0, st);
        CHECK(dec.omega_a3 == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(std::abs(dec.residual) < 1e-10);
    }

    SUBCASE("random states, large sample") {
        Rng rng(101);
        const AlphaSystem sys3({1.0, 2.0, 0.5}, 3.0);
        for (int rep = 0; rep < 100000; ++rep) {
            const PhaseState st = generators::random_state(sys3, rng);
            const RotatingEnergyDecomposition dec =
                rotating_energy_decomposition(sys3, 0.7, st);
            const double e = invariants(sys3, st).energy;
            CHECK(std::abs(dec.residual) < 1e-10 * (1.0 + std::abs(e)));
        }
    }
}

TEST_CASE("classify_state boundary rules") {
    const double alpha = 4.0, omega = 1.0;
    const AlphaSystem sys({1.0, 1.0, 1.0}, alpha);
    const double e_star = equilibria::equal_mass_3body_closed_forms(alpha, omega).e_triangle;

    SUBCASE("E at or above the excited energy is out of the partition") {
        Rng rng(4);
        PhaseState st = generators::random_state(sys, rng, 2.0, 2.0);
        const double e = invariants(sys, st).energy;
        CHECK(classify_state(sys, omega, st, std::min(e, 0.0)) == SetLabel::OutOfK);
    }

    SUBCASE("zero angular momentum is out of the partition") {
        PhaseState st;
        st.positions = oracles::equilateral(3.0);
        st.velocities.assign(3, Vec3{});
        CHECK(classify_state(sys, omega, st, e_star) == SetLabel::OutOfK);
    }

    SUBCASE("radially shrunk circular states sit in K1Minus") {
        const auto cc = equilibria::excited_energy(sys, omega, 16).minimizer;
        const PhaseState st = generators::shrunk_circular_state(sys, cc.positions, omega, 0.7);
        const InvariantRecord rec = invariants(sys, st);
        CHECK(rec.energy < e_star);
        CHECK(norm(rec.angular_momentum) >= omega * rec.inertia);
        CHECK(k_omega(sys, omega, st.positions) < 0.0);
        CHECK(classify_state(sys, omega, st, e_star) == SetLabel::K1Minus);
    }

    SUBCASE("permuting equal-mass bodies never changes the label") {
        Rng rng(12);
        for (int rep = 0; rep < 50; ++rep) {
            PhaseState st = generators::random_state(sys, rng);
            const SetLabel base = classify_state(sys, omega, st, e_star);
            PhaseState perm = st;
            std::swap(perm.positions[0], perm.positions[2]);
            std::swap(perm.velocities[0], perm.velocities[2]);
            CHECK(classify_state(sys, omega, perm, e_star) == base);
        }
    }
}

TEST_CASE("K1Plus is empty: fast-spinning large configurations clear E*") {
    const double alpha = 4.0, omega = 1.0;
    const AlphaSystem sys({1.0, 1.0, 1.0}, alpha);
    const double e_star = equilibria::equal_mass_3body_closed_forms(alpha, omega).e_triangle;
    Rng rng(88);
    for (int rep = 0; rep < 2000; ++rep) {
        const PhaseState st = generators::k1_candidate_state(sys, rng, omega);
        const InvariantRecord rec = invariants(sys, st);
        REQUIRE(norm(rec.angular_momentum) >= omega * rec.inertia);
        REQUIRE(omega * omega * rec.inertia + alpha * rec.potential >= 0.0);
        CHECK(rec.energy >= e_star * (1.0 - 1e-12));
        CHECK(classify_state(sys, omega, st, e_star) != SetLabel::K1Plus);
    }
}

TEST_CASE("labels are invariant under global rotations of the state") {
    const double alpha = 4.0, omega = 1.0;
    const AlphaSystem sys({1.0, 1.0, 1.0}, alpha);
    const double e_star = equilibria::equal_mass_3body_closed_forms(alpha, omega).e_triangle;
    Rng rng(33);
    auto rotate_state = [&](const PhaseState& st) {
        // Rodrigues rotation about a random axis
        Vec3 axis{rng.normal(), rng.normal(), rng.normal()};
        axis = axis / norm(axis);
        const double th = rng.uniform(0.0, 6.28318);
        const double c = std::cos(th), s = std::sin(th);
        auto rot = [&](const Vec3& v) {
            return c * v + s * cross(axis, v) + (1.0 - c) * dot(axis, v) * axis;
        };
        PhaseState out = st;
        for (std::size_t i = 0; i < st.size(); ++i) {
            out.positions[i] = rot(st.positions[i]);
            out.velocities[i] = rot(st.velocities[i]);
        }
        return out;
    };
    for (int rep = 0; rep < 200; ++rep) {
        const PhaseState st = generators::random_state(sys, rng, 1.2, 0.4);
        CHECK(classify_state(sys, omega, rotate_state(st), e_star) ==
              classify_state(sys, omega, st, e_star));
    }
}
