#include "nbodylab/generators.hpp"

#include <cmath>

#include "nbodylab/invariants.hpp"
#include "nbodylab/threshold.hpp"

namespace nbodylab::generators {

PhaseState random_state(const AlphaSystem& sys, Rng& rng, double pos_scale, double vel_scale) {
    const std::size_t n = sys.size();
    PhaseState st;
    st.positions.resize(n);
    st.velocities.resize(n);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        for (Vec3& p : st.positions)
            p = {pos_scale * rng.normal(), pos_scale * rng.normal(), pos_scale * rng.normal()};
        if (min_pair_distance(st.positions) > 0.2 * pos_scale) break;
    }
    for (Vec3& v : st.velocities)
        v = {vel_scale * rng.normal(), vel_scale * rng.normal(), vel_scale * rng.normal()};
    return to_com_frame(sys, st);
}

PhaseState expanding_state(const AlphaSystem& sys, Rng& rng, double pos_scale,
                           double expansion_rate) {
    PhaseState st = random_state(sys, rng, pos_scale, 0.0);
    // Velocity proportional to position makes every pair recede:
    // d/dt |x_i - x_j|^2 = 2 rate |x_i - x_j|^2 (the rigid-rotation part is
    // orthogonal to the separations). The rate is floored above the fastest
    // pairwise escape speed so no pair turns around and falls back.
    double rate = expansion_rate;
    for (std::size_t i = 0; i + 1 < st.size(); ++i)
        for (std::size_t j = i + 1; j < st.size(); ++j) {
            const double d = norm(st.positions[i] - st.positions[j]);
            const double v_escape =
                std::sqrt(2.0 * (sys.mass(i) + sys.mass(j)) * std::pow(d, -sys.alpha()));
            rate = std::max(rate, 1.5 * v_escape / d);
        }
    for (std::size_t i = 0; i < st.size(); ++i) {
        st.velocities[i] = rate * st.positions[i] + 0.2 * rate * jrot(st.positions[i]) +
                           Vec3{0.02 * rng.normal(), 0.02 * rng.normal(), 0.02 * rng.normal()};
    }
    return to_com_frame(sys, st);
}

PhaseState shrunk_circular_state(const AlphaSystem& sys, const std::vector<Vec3>& cc_positions,
                                 double omega, double lambda) {
    if (!(lambda > 0.0)) throw PreconditionViolated("lambda must be positive");
    PhaseState st;
    st.positions.resize(cc_positions.size());
    st.velocities.resize(cc_positions.size());
    for (std::size_t i = 0; i < cc_positions.size(); ++i) {
        st.positions[i] = lambda * cc_positions[i];
        st.velocities[i] = (omega / lambda) * jrot(cc_positions[i]);
    }
    return to_com_frame(sys, st);
}

PhaseState k1_candidate_state(const AlphaSystem& sys, Rng& rng, double omega) {
    const std::size_t n = sys.size();
    for (int attempt = 0; attempt < 1000; ++attempt) {
        PhaseState st;
        st.positions.resize(n);
        st.velocities.resize(n);
        for (Vec3& p : st.positions) p = {rng.normal(), rng.normal(), 0.0};
        if (min_pair_distance(st.positions) < 0.2) continue;
        Vec3 com{};
        for (std::size_t i = 0; i < n; ++i) com += sys.mass(i) * st.positions[i];
        com *= 1.0 / sys.total_mass();
        for (Vec3& p : st.positions) p -= com;

        // Scale the shape so K_omega >= 0 with margin, then boost a rigid
        // planar rotation beyond omega and add small noise.
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) inertia += sys.mass(i) * norm2(st.positions[i]);
        const double u = potential(sys, st.positions);
        const double null_scale =
            std::pow(-sys.alpha() * u / (omega * omega * inertia), 1.0 / (sys.alpha() + 2.0));
        const double lam = null_scale * (1.0 + rng.uniform(0.0, 2.0));
        for (Vec3& p : st.positions) p *= lam;
        const double beta = 1.0 + rng.uniform(0.0, 2.0);
        const double noise = 0.02 * beta * omega * lam;
        for (std::size_t i = 0; i < n; ++i)
            st.velocities[i] = beta * omega * jrot(st.positions[i]) +
                               Vec3{noise * rng.normal(), noise * rng.normal(), noise * rng.normal()};

        const InvariantRecord rec = invariants(sys, st);
        const double k = omega * omega * rec.inertia + sys.alpha() * rec.potential;
        if (k >= 0.0 && norm(rec.angular_momentum) >= omega * rec.inertia) return st;
    }
    throw NoConvergence("k1_candidate_state rejection sampling failed");
}

PhaseState twobody_state(const AlphaSystem& sys, double r, double rdot, double c) {
    if (sys.size() != 2) throw PreconditionViolated("twobody_state needs exactly two bodies");
    const double m1 = sys.mass(0), m2 = sys.mass(1);
    const Vec3 x{r, 0.0, 0.0};
    const Vec3 xdot{rdot, c / r, 0.0};
    PhaseState st;
    st.positions = {m2 * x, -m1 * x};
    st.velocities = {m2 * xdot, -m1 * xdot};
    return st;
}

} // namespace nbodylab::generators
