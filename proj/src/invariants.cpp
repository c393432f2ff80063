#include "nbodylab/invariants.hpp"

#include <cmath>

namespace nbodylab {

double potential(const AlphaSystem& sys, const std::vector<Vec3>& positions) {
    require_valid_configuration(sys, positions);
    const double a = sys.alpha();
    double u = 0.0;
    for (std::size_t i = 0; i + 1 < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            const double r = norm(positions[i] - positions[j]);
            u -= sys.mass(i) * sys.mass(j) / std::pow(r, a);
        }
    return u;
}

std::vector<Vec3> potential_gradient(const AlphaSystem& sys, const std::vector<Vec3>& positions) {
    require_valid_configuration(sys, positions);
    const double a = sys.alpha();
    std::vector<Vec3> grad(positions.size());
    for (std::size_t i = 0; i + 1 < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            const Vec3 d = positions[i] - positions[j];
            const double r = norm(d);
            // grad_i U gets +alpha m_i m_j d / r^(alpha+2), grad_j the negative
            const Vec3 g = (a * sys.mass(i) * sys.mass(j) / std::pow(r, a + 2.0)) * d;
            grad[i] += g;
            grad[j] -= g;
        }
    return grad;
}

std::vector<Vec3> accelerations(const AlphaSystem& sys, const std::vector<Vec3>& positions) {
    std::vector<Vec3> acc = potential_gradient(sys, positions);
    for (std::size_t i = 0; i < acc.size(); ++i)
        acc[i] *= -1.0 / sys.mass(i);
    return acc;
}

InvariantRecord invariants(const AlphaSystem& sys, const PhaseState& state) {
    InvariantRecord rec;
    rec.potential = potential(sys, state.positions);
    double kinetic = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double m = sys.mass(i);
        kinetic += 0.5 * m * norm2(state.velocities[i]);
        rec.angular_momentum += m * cross(state.positions[i], state.velocities[i]);
        rec.linear_momentum += m * state.velocities[i];
        rec.inertia += m * norm2(state.positions[i]);
        rec.inertia_rate += 2.0 * m * dot(state.positions[i], state.velocities[i]);
    }
    rec.energy = kinetic + rec.potential;
    rec.virial = rec.energy + (sys.alpha() / 2.0 - 1.0) * rec.potential;
    rec.inertia_accel = 4.0 * rec.virial;
    return rec;
}

PhaseState to_com_frame(const AlphaSystem& sys, const PhaseState& state) {
    Vec3 com{}, vcom{};
    for (std::size_t i = 0; i < state.size(); ++i) {
        com += sys.mass(i) * state.positions[i];
        vcom += sys.mass(i) * state.velocities[i];
    }
    com *= 1.0 / sys.total_mass();
    vcom *= 1.0 / sys.total_mass();
    PhaseState out = state;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.positions[i] -= com;
        out.velocities[i] -= vcom;
    }
    return out;
}

PhaseState align_angular_momentum(const AlphaSystem& sys, const PhaseState& state) {
    Vec3 a{};
    double a_scale = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        a += sys.mass(i) * cross(state.positions[i], state.velocities[i]);
        a_scale += sys.mass(i) * norm(state.positions[i]) * norm(state.velocities[i]);
    }
    const double amag = norm(a);
    if (amag == 0.0 || amag < 1e-14 * a_scale)
        throw ZeroAngularMomentum("cannot align a vanishing angular momentum");

    // Rodrigues rotation taking a/|a| onto ez.
    const Vec3 u = a / amag;
    const Vec3 ez{0.0, 0.0, 1.0};
    const double c = dot(u, ez);
    Vec3 axis = cross(u, ez);
    const double s = norm(axis);
    auto rotate = [&](const Vec3& v) -> Vec3 {
        if (s < 1e-300) return c > 0.0 ? v : Vec3{v.x, -v.y, -v.z}; // parallel: identity or pi about x
        const Vec3 k = axis / s;
        return c * v + s * cross(k, v) + (1.0 - c) * dot(k, v) * k;
    };
    PhaseState out = state;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.positions[i] = rotate(state.positions[i]);
        out.velocities[i] = rotate(state.velocities[i]);
    }
    return out;
}

double sundman_gap(const AlphaSystem& sys, const PhaseState& state) {
    const InvariantRecord rec = invariants(sys, state);
    return rec.energy - (norm2(rec.angular_momentum) / (2.0 * rec.inertia) + rec.potential);
}

} // namespace nbodylab
