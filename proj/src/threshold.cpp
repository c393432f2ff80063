#include "nbodylab/threshold.hpp"

#include <cmath>

namespace nbodylab {

namespace {

struct IkParts {
    double inertia;
    double pot;
};

IkParts inertia_and_potential(const AlphaSystem& sys, const std::vector<Vec3>& positions) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i)
        inertia += sys.mass(i) * norm2(positions[i]);
    return {inertia, potential(sys, positions)};
}

} // namespace

double k_omega(const AlphaSystem& sys, double omega, const std::vector<Vec3>& positions) {
    const IkParts p = inertia_and_potential(sys, positions);
    return omega * omega * p.inertia + sys.alpha() * p.pot;
}

double e_omega(const AlphaSystem& sys, double omega, const std::vector<Vec3>& positions) {
    const IkParts p = inertia_and_potential(sys, positions);
    return 0.5 * omega * omega * p.inertia + p.pot;
}

namespace {

// K_omega(lambda x) = omega^2 lambda^2 I + alpha lambda^-alpha U is strictly
// increasing in lambda, so bisection on a valid bracket cannot fail.
double bisect_null_scale(const AlphaSystem& sys, double omega,
                         const std::vector<Vec3>& positions, double lo, double hi) {
    const IkParts p = inertia_and_potential(sys, positions);
    auto f = [&](double lam) {
        return omega * omega * lam * lam * p.inertia +
               sys.alpha() * std::pow(lam, -sys.alpha()) * p.pot;
    };
    double flo = f(lo);
    for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0 || (hi - lo) < 1e-12 * mid) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

namespace {

// States within rounding of the null set are rejected by both scalers: the
// lemmas are about strictly signed K_omega.
double k_deadband(double omega, const IkParts& p, double alpha) {
    return 1e-12 * (omega * omega * p.inertia + alpha * std::abs(p.pot));
}

} // namespace

double scale_to_null_up(const AlphaSystem& sys, double omega, const std::vector<Vec3>& positions) {
    const IkParts p = inertia_and_potential(sys, positions);
    const double k = omega * omega * p.inertia + sys.alpha() * p.pot;
    if (!(k < -k_deadband(omega, p, sys.alpha())))
        throw PreconditionViolated("scale_to_null_up requires K_omega < 0");
    // Rigid scaling solves lambda^(alpha+2) = -alpha U / (omega^2 I); pad the
    // analytic root so the bracket provably contains it.
    const double hi =
        std::pow(-sys.alpha() * p.pot / (omega * omega * p.inertia), 1.0 / (sys.alpha() + 2.0)) +
        1.0;
    return bisect_null_scale(sys, omega, positions, 1.0, hi);
}

double scale_to_null_down(const AlphaSystem& sys, double omega,
                          const std::vector<Vec3>& positions) {
    const IkParts p = inertia_and_potential(sys, positions);
    const double k = omega * omega * p.inertia + sys.alpha() * p.pot;
    if (!(k > k_deadband(omega, p, sys.alpha())))
        throw PreconditionViolated("scale_to_null_down requires K_omega > 0");
    double lo = std::pow(-sys.alpha() * p.pot / (omega * omega * p.inertia),
                         1.0 / (sys.alpha() + 2.0)) *
                0.5;
    lo = std::min(lo, 0.5);
    return bisect_null_scale(sys, omega, positions, lo, 1.0);
}

RotatingEnergyDecomposition rotating_energy_decomposition(const AlphaSystem& sys, double omega,
                                                          const PhaseState& state) {
    RotatingEnergyDecomposition out;
    const InvariantRecord rec = invariants(sys, state);
    out.potential = rec.potential;
    out.omega_a3 = omega * rec.angular_momentum.z;
    double planar_inertia = 0.0;
    double rot_kin = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double m = sys.mass(i);
        const Vec3& x = state.positions[i];
        planar_inertia += m * (x.x * x.x + x.y * x.y);
        const Vec3 vtilde = state.velocities[i] - omega * jrot(x);
        rot_kin += 0.5 * m * norm2(vtilde);
    }
    out.centrifugal_term = -0.5 * omega * omega * planar_inertia;
    out.rotating_kinetic = rot_kin;
    out.residual =
        rec.energy - (out.centrifugal_term + out.potential + out.omega_a3 + out.rotating_kinetic);
    return out;
}

const char* to_string(SetLabel label) {
    switch (label) {
        case SetLabel::K1Plus: return "K1Plus";
        case SetLabel::K1Minus: return "K1Minus";
        case SetLabel::K2Plus: return "K2Plus";
        case SetLabel::K2Minus: return "K2Minus";
        case SetLabel::OutOfK: return "OutOfK";
    }
    return "OutOfK";
}

SetLabel set_label_from_string(const std::string& name) {
    if (name == "K1Plus") return SetLabel::K1Plus;
    if (name == "K1Minus") return SetLabel::K1Minus;
    if (name == "K2Plus") return SetLabel::K2Plus;
    if (name == "K2Minus") return SetLabel::K2Minus;
    if (name == "OutOfK") return SetLabel::OutOfK;
    throw PreconditionViolated("unknown set label '" + name + "'");
}

SetLabel classify_record(double alpha, double omega, const InvariantRecord& rec, double e_star,
                         double a_scale) {
    if (!std::isfinite(e_star) || rec.energy >= e_star) return SetLabel::OutOfK;
    const double amag = norm(rec.angular_momentum);
    if (amag == 0.0 || amag < 1e-15 * a_scale) return SetLabel::OutOfK;
    const double k = omega * omega * rec.inertia + alpha * rec.potential;
    const bool band1 = amag >= omega * rec.inertia;
    if (k >= 0.0) return band1 ? SetLabel::K1Plus : SetLabel::K2Plus;
    return band1 ? SetLabel::K1Minus : SetLabel::K2Minus;
}

SetLabel classify_state(const AlphaSystem& sys, double omega, const PhaseState& state,
                        double e_star) {
    const InvariantRecord rec = invariants(sys, state);
    double a_scale = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i)
        a_scale += sys.mass(i) * norm(state.positions[i]) * norm(state.velocities[i]);
    return classify_record(sys.alpha(), omega, rec, e_star, a_scale);
}

} // namespace nbodylab
