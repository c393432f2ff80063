#include "nbodylab/macmillan.hpp"

#include <algorithm>
#include <cmath>

#include "nbodylab/ode.hpp"

namespace nbodylab::macmillan {

double MacParams::omega() const { return std::sqrt(alpha / std::pow(2.0, alpha + 2.0)); }

void mac_rhs(double alpha, double z, double v, double& zdot, double& vdot) {
    zdot = v;
    vdot = -alpha * z * std::pow(1.0 + z * z, -(alpha + 2.0) / 2.0);
}

double mac_hamiltonian(double alpha, double z, double v) {
    return 0.5 * v * v - std::pow(1.0 + z * z, -alpha / 2.0);
}

double primary_separation(const ReducedState& s) {
    return 2.0 * std::sqrt(s.x1 * s.x1 + s.y1 * s.y1);
}

double third_body_distance(const MacParams& p, const ReducedState& s) {
    const double zz = (1.0 + p.epsilon) * s.z3;
    return std::sqrt(s.x1 * s.x1 + s.y1 * s.y1 + zz * zz);
}

std::array<double, 6> eps_mac_rhs(const MacParams& p, const ReducedState& s) {
    const double rho2 = s.x1 * s.x1 + s.y1 * s.y1;
    if (!(rho2 > 1e-24)) throw PrimaryCollision("primaries reached the distance floor");
    const double r12 = 2.0 * std::sqrt(rho2);
    const double r13 = third_body_distance(p, s);
    const double a = p.alpha;
    const double f12 = std::pow(r12, -(a + 2.0));
    const double f13 = std::pow(r13, -(a + 2.0));
    return {s.vx1,
            s.vy1,
            s.vz3,
            -a * (s.x1 * f12 + p.epsilon * s.x1 * f13),
            -a * (s.y1 * f12 + p.epsilon * s.y1 * f13),
            -a * (1.0 + p.epsilon) * s.z3 * f13};
}

double eps_energy(const MacParams& p, const ReducedState& s) {
    const double rho2 = s.x1 * s.x1 + s.y1 * s.y1;
    const double a = p.alpha;
    const double r13a = std::pow(third_body_distance(p, s), a);
    return 0.5 * (s.vx1 * s.vx1 + s.vy1 * s.vy1) -
           1.0 / (std::pow(2.0, a + 2.0) * std::pow(rho2, a / 2.0)) +
           p.epsilon * (0.5 * (1.0 + p.epsilon) * s.vz3 * s.vz3 - 1.0 / r13a);
}

double eps_k_omega(const MacParams& p, const ReducedState& s) {
    const double rho2 = s.x1 * s.x1 + s.y1 * s.y1;
    const double a = p.alpha;
    const double w2 = p.omega() * p.omega();
    const double planar = w2 * rho2 - a / (std::pow(2.0, a + 2.0) * std::pow(rho2, a / 2.0));
    const double r13a = std::pow(third_body_distance(p, s), a);
    return planar + p.epsilon * ((1.0 + p.epsilon) * w2 * s.z3 * s.z3 - a / r13a);
}

double eps_excited_energy(const MacParams& p) {
    const double a = p.alpha;
    return (a / 2.0 - 1.0) *
           std::pow(p.epsilon + std::pow(2.0, -(a + 2.0)), 2.0 / (a + 2.0)) * std::pow(2.0, -a);
}

ReferenceProfile reference_profile(const MacParams& p) {
    const double a = p.alpha;
    const double bump = 1.0 + std::pow(2.0, a + 1.0) * p.epsilon;
    ReferenceProfile out;
    out.r0_ref = 2.0 * std::pow(bump, 1.0 / (a - 2.0));
    out.r_inf = 2.0;
    out.v_inf_4omega = 4.0 * (a / 2.0 - 1.0) * std::pow(2.0, -(a + 2.0));
    out.v0_4omega = out.v_inf_4omega * std::pow(bump, -2.0 / (a - 2.0));
    return out;
}

namespace {

// Kepler-unit energy of the planar relative coordinate (r, rdot) against the
// infinity-reference effective potential at c = 4 omega.
double black_curve_excess(const MacParams& p, double r, double rdot) {
    const double c = 4.0 * p.omega();
    const double v_inf = reference_profile(p).v_inf_4omega;
    return 0.5 * rdot * rdot + c * c / (2.0 * r * r) - std::pow(r, -p.alpha) - v_inf;
}

} // namespace

SRegionReport s_region(const MacParams& p, const ReducedState& s) {
    const ReferenceProfile ref = reference_profile(p);
    const double omega = p.omega();
    const double r = primary_separation(s);
    const double angular = s.x1 * s.vy1 - s.y1 * s.vx1;

    SRegionReport rep{};
    rep.in_s = eps_energy(p, s) < 0.25 * ref.v0_4omega && std::abs(angular - omega) < 1e-10;
    if (std::abs(r - ref.r0_ref) < 1e-12 * ref.r0_ref)
        rep.s_sign = 0;
    else
        rep.s_sign = r > ref.r0_ref ? 1 : -1;
    rep.region = 0;
    if (!rep.in_s) return rep;

    if (rep.s_sign >= 0) {
        rep.region = 'E';
        return rep;
    }
    // Schematic split of S_- against the infinity-reference separatrix
    // ("black curve"): under-barrier inner wedge A, over-barrier incoming B /
    // outgoing D bands, and the lens C between the two reference radii.
    const double rho = 0.5 * r;
    const double rhodot = (s.x1 * s.vx1 + s.y1 * s.vy1) / std::max(rho, 1e-300);
    const double rdot = 2.0 * rhodot;
    const double excess = black_curve_excess(p, r, rdot);
    if (r <= ref.r_inf && excess <= 0.0)
        rep.region = 'A';
    else if (excess > 0.0 && rdot < 0.0)
        rep.region = 'B';
    else if (excess > 0.0)
        rep.region = 'D';
    else
        rep.region = 'C';
    return rep;
}

namespace {

ReducedState circular_start(const MacParams& p, double r12, double z3) {
    ReducedState s{};
    s.x1 = 0.5 * r12;
    s.vy1 = p.omega() / s.x1; // x1 vy1 - y1 vx1 = omega
    s.z3 = z3;
    return s;
}

// Radial velocity on the half-cycle symmetry section: the first z3dot = 0
// crossing with z3 on the opposite side of the start. The system is
// reversible, so a start with rdot = 0 whose section mismatch vanishes lies
// on a periodic orbit.
double section_mismatch(const MacParams& p, double r12, double z3_amplitude) {
    const ReducedState s0 = circular_start(p, r12, z3_amplitude);
    Dopri5::Options opts;
    opts.rel_tol = 1e-12;
    opts.abs_tol = 1e-13;
    Dopri5 stepper(6, [&p](double, const std::vector<double>& y, std::vector<double>& d) {
        const std::array<double, 6> rhs = eps_mac_rhs(p, {y[0], y[1], y[2], y[3], y[4], y[5]});
        d.assign(rhs.begin(), rhs.end());
    }, opts);
    stepper.init(0.0, {s0.x1, s0.y1, s0.z3, s0.vx1, s0.vy1, s0.vz3});
    double prev_vz = 0.0;
    while (stepper.t() < 200.0) {
        if (stepper.step(200.0) != Dopri5::StepStatus::Ok) return 1e9;
        const auto& y = stepper.y();
        const bool opposite = y[2] * z3_amplitude < 0.0;
        if (opposite && (prev_vz < 0.0) != (y[5] < 0.0)) {
            auto g = [](double, const std::vector<double>& yy) { return yy[5]; };
            const double te =
                bisect_event(stepper, g, stepper.t_prev(), stepper.t(), prev_vz, 1e-12);
            std::vector<double> yy;
            stepper.dense(te, yy);
            const double rho = std::sqrt(yy[0] * yy[0] + yy[1] * yy[1]);
            return (yy[0] * yy[3] + yy[1] * yy[4]) / rho;
        }
        prev_vz = y[5];
    }
    return 1e9;
}

// The primaries ride an exponentially unstable ridge (radial rate
// omega sqrt(alpha - 2)), so a generic start loses them within one or two
// z3 cycles. A secant solve of the section mismatch over the initial
// separation lands on the shadowing periodic orbit and buys many cycles.
double refine_default_separation(const MacParams& p, double z3_amplitude, double r_lo,
                                 double r_hi) {
    double x0 = 0.5 * (r_lo + r_hi);
    double x1 = 0.25 * r_lo + 0.75 * r_hi;
    const double fallback = x0;
    double f0 = section_mismatch(p, x0, z3_amplitude);
    double f1 = section_mismatch(p, x1, z3_amplitude);
    if (std::abs(f0) > 1e8 || std::abs(f1) > 1e8) return fallback;
    for (int it = 0; it < 20 && std::abs(f1) > 1e-13; ++it) {
        if (f1 == f0) break;
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x2 > 0.9 * r_lo) || !(x2 < 1.2 * r_hi)) return fallback;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = section_mismatch(p, x1, z3_amplitude);
        if (std::abs(f1) > 1e8) return fallback;
    }
    return std::abs(f1) < std::abs(f0) ? x1 : fallback;
}

} // namespace

TransitionResult transition_experiment(const MacParams& p, double z3_amplitude,
                                       const TransitionConfig& config) {
    const double omega = p.omega();
    const ReferenceProfile ref = reference_profile(p);

    // Default primary separation: between r_inf and the radius where the full
    // threshold vanishes at z3 = 0 (so K flips sign along the z3 cycle),
    // refined onto the shadowing periodic orbit when the problem is coupled.
    const double r_z0_null =
        2.0 * std::pow(1.0 + std::pow(2.0, p.alpha + 2.0) * p.epsilon, 1.0 / (p.alpha + 2.0));
    double r12 = config.r12_initial;
    if (!(r12 > 0.0)) {
        r12 = 0.5 * (ref.r_inf + r_z0_null);
        if (p.epsilon > 0.0 && z3_amplitude != 0.0)
            r12 = refine_default_separation(p, z3_amplitude, ref.r_inf, r_z0_null);
    }
    ReducedState s0 = circular_start(p, r12, z3_amplitude);

    Dopri5::Options opts;
    opts.rel_tol = config.rel_tol;
    opts.abs_tol = config.abs_tol;
    opts.h_max = 0.25;

    auto unpack = [](const std::vector<double>& y) {
        return ReducedState{y[0], y[1], y[2], y[3], y[4], y[5]};
    };
    Dopri5 stepper(6, [&p, &unpack](double, const std::vector<double>& y, std::vector<double>& d) {
        const std::array<double, 6> rhs = eps_mac_rhs(p, unpack(y));
        d.assign(rhs.begin(), rhs.end());
    }, opts);
    stepper.init(0.0, {s0.x1, s0.y1, s0.z3, s0.vx1, s0.vy1, s0.vz3});

    TransitionResult out;
    out.r12_used = r12;
    const double e0 = eps_energy(p, s0);

    // Deadband scale for counting sign changes: on the epsilon = 0 control K
    // is identically zero and integration noise must not register.
    auto k_scale_of = [&](const ReducedState& s) {
        const double rho2 = s.x1 * s.x1 + s.y1 * s.y1;
        const double w2 = omega * omega;
        return w2 * rho2 + p.alpha / (std::pow(2.0, p.alpha + 2.0) * std::pow(rho2, p.alpha / 2.0)) +
               p.epsilon * ((1.0 + p.epsilon) * w2 * s.z3 * s.z3 + 1.0);
    };

    double sum_abs_z3_pos = 0.0, sum_abs_z3_neg = 0.0;
    long n_pos = 0, n_neg = 0;
    int armed_sign = 0; // sign of the last K value that cleared the deadband
    double next_sample = 0.0;
    std::vector<double> ywork;

    auto record = [&](double t, const ReducedState& s) {
        const double k = eps_k_omega(p, s);
        out.samples.push_back({t, s, k, eps_energy(p, s)});
        out.max_abs_k = std::max(out.max_abs_k, std::abs(k));
        out.energy_drift = std::max(out.energy_drift, std::abs(eps_energy(p, s) - e0));
        if (k > 0.0) {
            sum_abs_z3_pos += std::abs(s.z3);
            ++n_pos;
        } else {
            sum_abs_z3_neg += std::abs(s.z3);
            ++n_neg;
        }
        const double band = 1e-9 * k_scale_of(s);
        if (k > band) {
            if (armed_sign < 0) out.transition_times.push_back(t);
            armed_sign = 1;
        } else if (k < -band) {
            if (armed_sign > 0) out.transition_times.push_back(t);
            armed_sign = -1;
        }
    };

    record(0.0, s0);
    while (stepper.t() < config.t_max) {
        const Dopri5::StepStatus st = stepper.step(config.t_max);
        if (st != Dopri5::StepStatus::Ok) {
            // The unstable primaries eventually collide or escape; report the
            // transitions observed up to that point instead of failing.
            out.truncated = true;
            break;
        }
        while (next_sample <= stepper.t() + 1e-15) {
            if (next_sample >= stepper.t_prev() - 1e-15) {
                stepper.dense(std::min(next_sample, stepper.t()), ywork);
                record(std::min(next_sample, stepper.t()), unpack(ywork));
            }
            next_sample += config.sample_dt;
        }
    }
    out.t_end = stepper.t();

    // Refine each counted transition to the actual K zero crossing between
    // the neighbouring samples.
    for (double& tc : out.transition_times) {
        std::size_t idx = 0;
        for (std::size_t i = 1; i < out.samples.size(); ++i)
            if (out.samples[i].t <= tc) idx = i;
        if (idx > 0) {
            const TransitionSample& a = out.samples[idx - 1];
            const TransitionSample& b = out.samples[idx];
            if ((a.k < 0.0) != (b.k < 0.0) && b.t > a.t) {
                // linear interpolation of the crossing time
                tc = a.t + (b.t - a.t) * (0.0 - a.k) / (b.k - a.k);
            }
        }
    }

    out.count = static_cast<int>(out.transition_times.size());
    out.mean_abs_z3_k_positive = n_pos > 0 ? sum_abs_z3_pos / static_cast<double>(n_pos) : 0.0;
    out.mean_abs_z3_k_negative = n_neg > 0 ? sum_abs_z3_neg / static_cast<double>(n_neg) : 0.0;
    out.pattern_ok = n_pos > 0 && n_neg > 0 &&
                     out.mean_abs_z3_k_positive > out.mean_abs_z3_k_negative;
    return out;
}

} // namespace nbodylab::macmillan
