#include "nbodylab/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nbodylab/invariants.hpp"
#include "nbodylab/linalg.hpp"
#include "nbodylab/rng.hpp"
#include "nbodylab/threshold.hpp"

namespace nbodylab::equilibria {

namespace {

std::vector<Vec3> center(const AlphaSystem& sys, std::vector<Vec3> q) {
    Vec3 com{};
    for (std::size_t i = 0; i < q.size(); ++i) com += sys.mass(i) * q[i];
    com *= 1.0 / sys.total_mass();
    for (Vec3& p : q) p -= com;
    return q;
}

// grad(omega^2 I/2 - U) as a flat 3N vector.
std::vector<double> cc_residual(const AlphaSystem& sys, double omega,
                                const std::vector<Vec3>& q) {
    const std::vector<Vec3> gu = potential_gradient(sys, q);
    std::vector<double> f(3 * q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const Vec3 r = omega * omega * sys.mass(i) * q[i] - gu[i];
        f[3 * i] = r.x;
        f[3 * i + 1] = r.y;
        f[3 * i + 2] = r.z;
    }
    return f;
}

double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double two_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Hessian of omega^2 I/2 - U, a symmetric 3N x 3N matrix.
Matrix cc_hessian(const AlphaSystem& sys, double omega, const std::vector<Vec3>& q) {
    const std::size_t n = q.size();
    const double a = sys.alpha();
    Matrix h(3 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (int d = 0; d < 3; ++d) h(3 * i + d, 3 * i + d) = omega * omega * sys.mass(i);
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec3 dv = q[i] - q[j];
            const double r2 = norm2(dv);
            const double r = std::sqrt(r2);
            const double w = a * sys.mass(i) * sys.mass(j) * std::pow(r, -(a + 2.0));
            const double dvec[3] = {dv.x, dv.y, dv.z};
            for (int p = 0; p < 3; ++p)
                for (int s = 0; s < 3; ++s) {
                    // block of Hess U: w (delta_ps - (alpha+2) d_p d_s / r^2)
                    const double blk =
                        w * ((p == s ? 1.0 : 0.0) - (a + 2.0) * dvec[p] * dvec[s] / r2);
                    h(3 * i + p, 3 * i + s) -= blk;
                    h(3 * j + p, 3 * j + s) -= blk;
                    h(3 * i + p, 3 * j + s) += blk;
                    h(3 * j + p, 3 * i + s) += blk;
                }
        }
    return h;
}

double config_scale(const std::vector<Vec3>& q) {
    double s = 0.0;
    for (const Vec3& p : q) s = std::max(s, norm(p));
    return s > 0.0 ? s : 1.0;
}

// Mass-weighted Gram matrix eigenvalues, ascending.
std::vector<double> gram_eigenvalues(const AlphaSystem& sys, const std::vector<Vec3>& q) {
    Matrix g(3);
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double v[3] = {q[i].x, q[i].y, q[i].z};
        for (int p = 0; p < 3; ++p)
            for (int s = 0; s < 3; ++s) g(p, s) += sys.mass(i) * v[p] * v[s];
    }
    return jacobi_eigen(g).eigenvalues;
}

} // namespace

bool configuration_planar(const AlphaSystem& sys, const std::vector<Vec3>& positions,
                          double rel_tol) {
    const std::vector<double> ev = gram_eigenvalues(sys, center(sys, positions));
    return ev[0] <= rel_tol * std::max(ev[2], 1e-300);
}

bool configuration_collinear(const AlphaSystem& sys, const std::vector<Vec3>& positions,
                             double rel_tol) {
    const std::vector<double> ev = gram_eigenvalues(sys, center(sys, positions));
    return ev[1] <= rel_tol * std::max(ev[2], 1e-300);
}

CentralConfig central_config_solve(const AlphaSystem& sys, double omega,
                                   std::vector<Vec3> initial_guess, const SolveOptions& opts) {
    if (!(omega > 0.0)) throw PreconditionViolated("central configurations need omega > 0");
    std::vector<Vec3> q = center(sys, std::move(initial_guess));
    require_valid_configuration(sys, q);

    std::vector<double> f = cc_residual(sys, omega, q);
    double fnorm = two_norm(f);
    double cond = 0.0;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        if (sup_norm(f) < opts.tol * std::max(1.0, omega * omega * sys.total_mass())) break;

        const Matrix h = cc_hessian(sys, omega, q);
        const std::vector<double> step = truncated_newton_step(h, f, 1e-9, &cond);
        const double step_norm = two_norm(step);
        if (step_norm < 1e-16 * std::max(1.0, config_scale(q))) {
            if (sup_norm(f) < opts.success_tol) break;
            throw SingularJacobian("Newton step vanished with a large residual", cond);
        }

        double s = 1.0;
        bool moved = false;
        const double floor = 1e-9 * config_scale(q);
        for (int bt = 0; bt < 40; ++bt, s *= 0.5) {
            std::vector<Vec3> trial = q;
            for (std::size_t i = 0; i < q.size(); ++i) {
                trial[i].x += s * step[3 * i];
                trial[i].y += s * step[3 * i + 1];
                trial[i].z += s * step[3 * i + 2];
            }
            if (min_pair_distance(trial) < floor) continue;
            std::vector<double> ftrial;
            try {
                ftrial = cc_residual(sys, omega, trial);
            } catch (const CollisionConfiguration&) {
                continue;
            }
            const double fn = two_norm(ftrial);
            if (fn < fnorm * (1.0 - 1e-4 * s) || fn < opts.tol) {
                q = std::move(trial);
                f = std::move(ftrial);
                fnorm = fn;
                moved = true;
                break;
            }
        }
        if (!moved)
            throw NoConvergence("central configuration Newton stalled at residual " +
                                std::to_string(sup_norm(f)));
    }

    CentralConfig cc;
    cc.positions = center(sys, q);
    cc.omega = omega;
    cc.residual = sup_norm(cc_residual(sys, omega, cc.positions));
    if (!(cc.residual < opts.success_tol))
        throw NoConvergence("central configuration residual " + std::to_string(cc.residual) +
                            " above success tolerance");
    return cc;
}

PhaseState relative_equilibrium_state(const AlphaSystem& sys, const CentralConfig& cc) {
    const double scale = config_scale(cc.positions);
    for (const Vec3& p : cc.positions)
        if (std::abs(p.z) > 1e-9 * scale)
            throw NonPlanarConfiguration("relative equilibrium lift needs a planar (z = 0) "
                                         "central configuration");
    PhaseState st;
    st.time = 0.0;
    st.positions = cc.positions;
    st.velocities.resize(cc.positions.size());
    for (std::size_t i = 0; i < cc.positions.size(); ++i)
        st.velocities[i] = cc.omega * jrot(cc.positions[i]);
    (void)sys;
    return st;
}

EqualMass3BodyForms equal_mass_3body_closed_forms(double alpha, double omega) {
    if (!(alpha > 2.0)) throw AlphaOutOfRange("equal-mass closed forms need alpha > 2");
    if (!(omega > 0.0)) throw PreconditionViolated("omega must be positive");
    EqualMass3BodyForms out;
    const double w2 = omega * omega;
    const double coll = 1.0 + std::pow(2.0, -(alpha + 1.0));
    out.x_lin = std::pow(alpha / w2 * coll, 1.0 / (alpha + 2.0));
    out.e_linear = 2.0 * (alpha / 2.0 - 1.0) * std::pow(coll, 2.0 / (alpha + 2.0)) *
                   std::pow(alpha / w2, -alpha / (alpha + 2.0));
    // Triangle side from the central-configuration condition omega^2 s^(alpha+2)
    // = alpha M (at alpha = 1 this is the classical omega^2 = G M / a^3). Its
    // energy is below the collinear one for every alpha > 2: on the unit
    // inertia sphere -U is 3 for the triangle against (2 + 2^-alpha) 2^(alpha/2)
    // for the collinear row, so the triangle is the excited state.
    out.r_tri = std::pow(3.0 * alpha / w2, 1.0 / (alpha + 2.0));
    out.e_triangle = (alpha / 2.0 - 1.0) * std::pow(3.0, 2.0 / (alpha + 2.0)) *
                     std::pow(alpha / w2, -alpha / (alpha + 2.0));
    out.a_star = 2.0 * std::pow(alpha * coll, 2.0 / (alpha + 2.0)) *
                 std::pow(omega, (alpha - 2.0) / (alpha + 2.0));
    return out;
}

std::vector<Vec3> moulton_collinear(const AlphaSystem& sys, double omega,
                                    const std::vector<int>& ordering) {
    const std::size_t n = sys.size();
    if (!(sys.alpha() > 2.0)) throw AlphaOutOfRange("moulton_collinear needs alpha > 2");
    {
        std::vector<int> check(ordering);
        std::sort(check.begin(), check.end());
        for (std::size_t i = 0; i < n; ++i)
            if (check.size() != n || check[i] != static_cast<int>(i))
                throw PreconditionViolated("ordering must be a permutation of the body indices");
    }
    const double a = sys.alpha();

    // Slot coordinates from gaps, centered.
    auto coords = [&](const std::vector<double>& gaps) {
        std::vector<double> s(n, 0.0);
        for (std::size_t k = 1; k < n; ++k) s[k] = s[k - 1] + gaps[k - 1];
        double com = 0.0;
        for (std::size_t k = 0; k < n; ++k) com += sys.mass(ordering[k]) * s[k];
        com /= sys.total_mass();
        for (double& v : s) v -= com;
        return s;
    };
    // Per-slot residual of the collinear central-configuration equation.
    auto slot_residual = [&](const std::vector<double>& s) {
        std::vector<double> r(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            double force = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == k) continue;
                const double d = s[k] - s[j];
                force += sys.mass(ordering[j]) * (d > 0.0 ? 1.0 : -1.0) *
                         std::pow(std::abs(d), -(a + 1.0));
            }
            r[k] = omega * omega * s[k] - a * force;
        }
        return r;
    };
    auto gap_equations = [&](const std::vector<double>& gaps) {
        const std::vector<double> r = slot_residual(coords(gaps));
        std::vector<double> g(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) g[k] = r[k + 1] - r[k];
        return g;
    };

    const double guess =
        std::pow(a / (omega * omega) * (1.0 + std::pow(2.0, -(a + 1.0))), 1.0 / (a + 2.0));
    std::vector<double> gaps(n - 1, guess);
    std::vector<double> g = gap_equations(gaps);
    const double tol = 1e-13 * omega * omega * guess * sys.total_mass();

    for (int iter = 0; iter < 200 && sup_norm(g) >= tol; ++iter) {
        Matrix jac(n - 1);
        for (std::size_t c = 0; c + 1 < n; ++c) {
            const double dg = 1e-7 * gaps[c];
            std::vector<double> bumped = gaps;
            bumped[c] += dg;
            const std::vector<double> gb = gap_equations(bumped);
            for (std::size_t r = 0; r + 1 < n; ++r) jac(r, c) = (gb[r] - g[r]) / dg;
        }
        std::vector<double> delta;
        if (!lu_solve(jac, g, delta))
            throw SingularJacobian("collinear gap Jacobian is singular",
                                   std::numeric_limits<double>::infinity());
        // Positivity-preserving damping: keep every gap above a fifth of its
        // current value.
        double s = 1.0;
        for (std::size_t k = 0; k + 1 < n; ++k)
            if (delta[k] > 0.0) s = std::min(s, 0.8 * gaps[k] / delta[k]);
        const double g0 = two_norm(g);
        bool moved = false;
        for (int bt = 0; bt < 40; ++bt, s *= 0.5) {
            std::vector<double> trial = gaps;
            for (std::size_t k = 0; k + 1 < n; ++k) trial[k] -= s * delta[k];
            bool positive = true;
            for (double gp : trial) positive = positive && gp > 0.0;
            if (!positive) continue;
            const std::vector<double> gt = gap_equations(trial);
            if (two_norm(gt) < g0 * (1.0 - 1e-4 * s) || sup_norm(gt) < tol) {
                gaps = std::move(trial);
                g = gt;
                moved = true;
                break;
            }
        }
        if (!moved) throw NoConvergence("collinear Newton stalled");
    }
    if (sup_norm(g) >= tol * 100.0)
        throw NoConvergence("collinear system residual " + std::to_string(sup_norm(g)));

    const std::vector<double> s = coords(gaps);
    std::vector<Vec3> q(n);
    for (std::size_t k = 0; k < n; ++k) q[ordering[k]] = {s[k], 0.0, 0.0};
    return center(sys, q);
}

namespace {

// Rescales a configuration onto {K_omega = 0}; any shape admits exactly one
// such rigid scale.
std::vector<Vec3> scale_to_k_null(const AlphaSystem& sys, double omega, std::vector<Vec3> q) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) inertia += sys.mass(i) * norm2(q[i]);
    const double u = potential(sys, q);
    const double lam = std::pow(-sys.alpha() * u / (omega * omega * inertia),
                                1.0 / (sys.alpha() + 2.0));
    for (Vec3& p : q) p *= lam;
    return q;
}

std::vector<std::vector<int>> orderings_up_to_reversal(std::size_t n, std::size_t cap) {
    std::vector<int> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
    std::vector<std::vector<int>> out;
    do {
        std::vector<int> rev(perm.rbegin(), perm.rend());
        if (std::lexicographical_compare(perm.begin(), perm.end(), rev.begin(), rev.end()))
            out.push_back(perm);
        if (out.size() >= cap) break;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

} // namespace

ExcitedEnergyResult excited_energy(const AlphaSystem& sys, double omega, int restarts,
                                   std::uint64_t seed) {
    ExcitedEnergyResult out;
    const double a = sys.alpha();
    if (a == 2.0) {
        out.degenerate_alpha = true;
        out.e_star = 0.0;
        return out;
    }
    if (a < 2.0) {
        out.degenerate_alpha = true;
        out.e_star = -std::numeric_limits<double>::infinity();
        return out;
    }

    const std::size_t n = sys.size();
    std::vector<std::vector<Vec3>> starts;

    // Collinear solutions are solved exactly first; for equal masses they are
    // the minimizers.
    for (const std::vector<int>& ord : orderings_up_to_reversal(n, 12)) {
        try {
            starts.push_back(moulton_collinear(sys, omega, ord));
        } catch (const Error&) {
        }
    }
    {
        // Regular polygon, scaled onto K_omega = 0.
        std::vector<Vec3> poly(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double th = 2.0 * 3.14159265358979323846 * static_cast<double>(i) /
                              static_cast<double>(n);
            poly[i] = {std::cos(th), std::sin(th), 0.0};
        }
        starts.push_back(scale_to_k_null(sys, omega, center(sys, poly)));
    }
    Rng rng(seed);
    while (static_cast<int>(starts.size()) < restarts) {
        std::vector<Vec3> q(n);
        const bool spatial = n >= 4 && (starts.size() % 3 == 0);
        for (Vec3& p : q) {
            p = {rng.normal(), rng.normal(), spatial ? rng.normal() : 0.0};
        }
        q = center(sys, q);
        if (min_pair_distance(q) < 1e-3) continue;
        starts.push_back(scale_to_k_null(sys, omega, q));
    }

    out.starts_attempted = static_cast<int>(starts.size());
    bool have_best = false;
    CentralConfig best;
    double best_e = std::numeric_limits<double>::infinity();
    std::vector<Vec3> best_key;

    for (const std::vector<Vec3>& q0 : starts) {
        CentralConfig cc;
        try {
            cc = central_config_solve(sys, omega, q0);
        } catch (const Error&) {
            continue;
        }
        ++out.starts_converged;
        const double e = -(a / 2.0 - 1.0) * potential(sys, cc.positions);
        auto lex_less = [](const std::vector<Vec3>& x, const std::vector<Vec3>& y) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i].x != y[i].x) return x[i].x < y[i].x;
                if (x[i].y != y[i].y) return x[i].y < y[i].y;
                if (x[i].z != y[i].z) return x[i].z < y[i].z;
            }
            return false;
        };
        if (!have_best || e < best_e - 1e-14 * std::abs(best_e) ||
            (std::abs(e - best_e) <= 1e-14 * std::abs(best_e) &&
             lex_less(cc.positions, best_key))) {
            have_best = true;
            best = cc;
            best_e = e;
            best_key = cc.positions;
        }
    }
    if (!have_best) throw NoConvergence("no central configuration start converged");

    out.minimizer = best;
    out.u_star = -potential(sys, best.positions);
    out.e_star = (a / 2.0 - 1.0) * out.u_star;

    // KKT multiplier of -grad U = lambda grad K at the minimizer.
    const std::vector<Vec3> gu = potential_gradient(sys, best.positions);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 gk = 2.0 * omega * omega * sys.mass(i) * best.positions[i] + a * gu[i];
        num += dot(-1.0 * gu[i], gk);
        den += dot(gk, gk);
    }
    out.multiplier = den > 0.0 ? num / den : 0.0;

    out.minimizer_planar = configuration_planar(sys, best.positions);
    out.minimizer_collinear = configuration_collinear(sys, best.positions);
    return out;
}

PlanarityKernel planarity_kernel(double alpha, const std::vector<Vec3>& positions) {
    const std::size_t n = positions.size();
    Matrix c(n);
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = norm(positions[i] - positions[j]);
            if (!(r > 0.0)) throw PreconditionViolated("coincident positions");
            const double aij = std::pow(r, -(alpha + 2.0));
            c(i, j) -= aij;
            c(j, i) -= aij;
            c(i, i) += aij;
            c(j, j) += aij;
        }
    const SymmetricEigen eig = jacobi_eigen(c);
    double cnorm = 0.0;
    for (double ev : eig.eigenvalues) cnorm = std::max(cnorm, std::abs(ev));

    PlanarityKernel out;
    const double ones_comp = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(eig.eigenvalues[k]) >= 1e-10 * cnorm) continue;
        std::vector<double> v(n);
        double align = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = eig.eigenvectors(i, k);
            align += v[i] * ones_comp;
        }
        out.basis.push_back(std::move(v));
        out.ones_alignment = std::max(out.ones_alignment, std::abs(align));
        ++out.kernel_dim;
    }
    return out;
}

std::vector<MonotonicityRow> estar_monotonicity_probe(const AlphaSystem& sys,
                                                      const std::vector<double>& omegas,
                                                      int restarts) {
    for (std::size_t i = 0; i + 1 < omegas.size(); ++i)
        if (!(omegas[i] < omegas[i + 1]))
            throw PreconditionViolated("omega grid must be strictly ascending");
    std::vector<MonotonicityRow> rows;
    rows.reserve(omegas.size());
    for (double w : omegas) rows.push_back({w, excited_energy(sys, w, restarts).e_star});
    return rows;
}

double inertia_lower_bound(const AlphaSystem& sys, double c) {
    if (!(c > 0.0)) throw PreconditionViolated("inertia_lower_bound needs c > 0");
    const double m = sys.min_mass();
    return m * m / sys.total_mass() * std::pow(m * m / c, 2.0 / sys.alpha());
}

ReExclusionReport re_exclusion_check(double alpha, double omega) {
    if (!(alpha > 2.0)) throw AlphaOutOfRange("re_exclusion_check needs alpha > 2");
    const double ratio = (1.0 + std::pow(2.0, -(alpha + 1.0))) / 1.5;
    ReExclusionReport rep;
    rep.omega1_energy_bound = std::pow(ratio, 1.0 / alpha) * omega;
    rep.omega1_momentum_bound =
        std::pow(2.0, (alpha + 2.0) / (alpha - 2.0)) * std::pow(ratio, 2.0 / (alpha - 2.0)) * omega;
    rep.incompatible = rep.omega1_momentum_bound > rep.omega1_energy_bound;
    return rep;
}

} // namespace nbodylab::equilibria
