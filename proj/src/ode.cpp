#include "nbodylab/ode.hpp"

#include <algorithm>
#include <cmath>

#include "nbodylab/errors.hpp"

namespace nbodylab {

namespace {

// Dormand-Prince RK5(4)7M coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// 5th-order weights minus the embedded 4th-order weights.
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;
// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

} // namespace

Dopri5::Dopri5(std::size_t dim, Rhs rhs, Options opt)
    : dim_(dim), rhs_(std::move(rhs)), opt_(opt) {
    k_.assign(7, std::vector<double>(dim_, 0.0));
    ytmp_.assign(dim_, 0.0);
    yerr_.assign(dim_, 0.0);
    rcont1_.assign(dim_, 0.0);
    rcont2_.assign(dim_, 0.0);
    rcont3_.assign(dim_, 0.0);
    rcont4_.assign(dim_, 0.0);
    rcont5_.assign(dim_, 0.0);
}

void Dopri5::init(double t0, std::vector<double> y0) {
    t_ = t_prev_ = t0;
    y_ = std::move(y0);
    y_prev_ = y_;
    h_ = opt_.h_init;
    fsal_valid_ = false;
    n_accepted_ = n_rejected_ = 0;
}

bool Dopri5::eval(double t, const std::vector<double>& y, std::vector<double>& f) {
    try {
        rhs_(t, y, f);
    } catch (const CollisionConfiguration&) {
        return false;
    } catch (const PrimaryCollision&) {
        return false;
    }
    for (double v : f)
        if (!std::isfinite(v)) return false;
    return true;
}

double Dopri5::error_norm(const std::vector<double>& yerr, const std::vector<double>& y0,
                          const std::vector<double>& y1) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double sc = opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double q = yerr[i] / sc;
        sum += q * q;
    }
    return std::sqrt(sum / static_cast<double>(dim_));
}

double Dopri5::initial_step(double t_limit) {
    if (!eval(t_, y_, k_[0])) return opt_.h_min;
    double dnorm = 0.0, ynorm = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double sc = opt_.abs_tol + opt_.rel_tol * std::abs(y_[i]);
        const double a = y_[i] / sc, b = k_[0][i] / sc;
        ynorm += a * a;
        dnorm += b * b;
    }
    double h = (dnorm > 1e-300) ? 0.01 * std::sqrt(ynorm / dnorm) : 1e-6;
    if (!(h > 0.0) || !std::isfinite(h)) h = 1e-6;
    h = std::min({h, opt_.h_max, std::abs(t_limit - t_)});
    fsal_valid_ = true;
    return std::max(h, opt_.h_min);
}

Dopri5::StepStatus Dopri5::step(double t_limit) {
    if (h_ <= 0.0) h_ = initial_step(t_limit);
    if (!fsal_valid_) {
        if (!eval(t_, y_, k_[0])) return StepStatus::MinStepReached;
        fsal_valid_ = true;
    }

    long guard = 0;
    while (true) {
        if (++guard > 10000) return StepStatus::MaxStepsReached;
        if (n_accepted_ + n_rejected_ > opt_.max_steps) return StepStatus::MaxStepsReached;
        double h = std::min(h_, std::abs(t_limit - t_));
        h = std::min(h, opt_.h_max);
        if (h < opt_.h_min) h = opt_.h_min;

        bool ok = true;
        auto stage = [&](int idx, double c, auto... terms) {
            for (std::size_t i = 0; i < dim_; ++i) {
                double acc = 0.0;
                ((acc += terms.first * k_[terms.second][i]), ...);
                ytmp_[i] = y_[i] + h * acc;
            }
            ok = ok && eval(t_ + c * h, ytmp_, k_[idx]);
        };
        using W = std::pair<double, int>;
        stage(1, c2, W{a21, 0});
        if (ok) stage(2, c3, W{a31, 0}, W{a32, 1});
        if (ok) stage(3, c4, W{a41, 0}, W{a42, 1}, W{a43, 2});
        if (ok) stage(4, c5, W{a51, 0}, W{a52, 1}, W{a53, 2}, W{a54, 3});
        if (ok) stage(5, 1.0, W{a61, 0}, W{a62, 1}, W{a63, 2}, W{a64, 3}, W{a65, 4});
        std::vector<double>& y1 = ytmp_;
        if (ok) {
            for (std::size_t i = 0; i < dim_; ++i)
                y1[i] = y_[i] + h * (b1 * k_[0][i] + b3 * k_[2][i] + b4 * k_[3][i] +
                                     b5 * k_[4][i] + b6 * k_[5][i]);
            ok = eval(t_ + h, y1, k_[6]);
        }

        double err = 2.0;
        if (ok) {
            for (std::size_t i = 0; i < dim_; ++i)
                yerr_[i] = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] + e5 * k_[4][i] +
                                e6 * k_[5][i] + e7 * k_[6][i]);
            err = error_norm(yerr_, y_, y1);
        }

        if (ok && err <= 1.0) {
            y_prev_ = y_;
            t_prev_ = t_;
            for (std::size_t i = 0; i < dim_; ++i) {
                rcont1_[i] = y_[i];
                const double ydiff = y1[i] - y_[i];
                rcont2_[i] = ydiff;
                const double bspl = h * k_[0][i] - ydiff;
                rcont3_[i] = bspl;
                rcont4_[i] = ydiff - h * k_[6][i] - bspl;
                rcont5_[i] = h * (d1 * k_[0][i] + d3 * k_[2][i] + d4 * k_[3][i] + d5 * k_[4][i] +
                                  d6 * k_[5][i] + d7 * k_[6][i]);
            }
            y_ = y1;
            t_ += h;
            std::swap(k_[0], k_[6]); // FSAL
            ++n_accepted_;
            const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
            h_ = std::min(h * fac, opt_.h_max);
            return StepStatus::Ok;
        }

        ++n_rejected_;
        const double fac =
            ok ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.25; // throw/NaN: back off hard
        const double h_new = h * fac;
        if (h_new < opt_.h_min) {
            h_ = opt_.h_min;
            return StepStatus::MinStepReached;
        }
        h_ = h_new;
    }
}

void Dopri5::dense(double t_query, std::vector<double>& out) const {
    out.resize(dim_);
    const double h = t_ - t_prev_;
    const double theta = h != 0.0 ? (t_query - t_prev_) / h : 0.0;
    const double theta1 = 1.0 - theta;
    for (std::size_t i = 0; i < dim_; ++i)
        out[i] = rcont1_[i] +
                 theta * (rcont2_[i] +
                          theta1 * (rcont3_[i] +
                                    theta * (rcont4_[i] + theta1 * rcont5_[i])));
}

double bisect_event(const Dopri5& stepper,
                    const std::function<double(double, const std::vector<double>&)>& g,
                    double t_lo, double t_hi, double g_lo, double tol_t) {
    std::vector<double> y;
    for (int iter = 0; iter < 200 && (t_hi - t_lo) > tol_t; ++iter) {
        const double tm = 0.5 * (t_lo + t_hi);
        stepper.dense(tm, y);
        const double gm = g(tm, y);
        if (gm == 0.0) return tm;
        if ((gm < 0.0) == (g_lo < 0.0)) {
            t_lo = tm;
            g_lo = gm;
        } else {
            t_hi = tm;
        }
    }
    return 0.5 * (t_lo + t_hi);
}

} // namespace nbodylab
