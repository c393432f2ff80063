#ifndef NBODYLAB_ODE_HPP
#define NBODYLAB_ODE_HPP

#include <functional>
#include <vector>

namespace nbodylab {

/// Dormand-Prince 5(4) embedded pair with the standard quartic dense output.
/// FSAL: the last stage of an accepted step is reused as the first stage of
/// the next. The right-hand side may throw; a throwing stage evaluation is
/// treated as a rejected step so the controller backs off before the state
/// reaches an invalid region.
class Dopri5 {
public:
    using Rhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dydt)>;

    struct Options {
        double rel_tol = 1e-10;
        double abs_tol = 1e-12;
        double h_init = 0.0; // 0: choose automatically
        double h_min = 1e-14;
        double h_max = 1e6;
        long max_steps = 200000000L;
    };

    enum class StepStatus { Ok, MinStepReached, MaxStepsReached };

    Dopri5(std::size_t dim, Rhs rhs, Options opt);

    void init(double t0, std::vector<double> y0);

    /// Advances exactly one accepted step, never past t_limit.
    StepStatus step(double t_limit);

    double t() const { return t_; }
    double t_prev() const { return t_prev_; }
    const std::vector<double>& y() const { return y_; }
    const std::vector<double>& y_prev() const { return y_prev_; }
    double h_last() const { return t_ - t_prev_; }

    /// Interpolates the solution at t_query in [t_prev, t].
    void dense(double t_query, std::vector<double>& out) const;

    long accepted() const { return n_accepted_; }
    long rejected() const { return n_rejected_; }

private:
    double error_norm(const std::vector<double>& yerr, const std::vector<double>& y0,
                      const std::vector<double>& y1) const;
    bool eval(double t, const std::vector<double>& y, std::vector<double>& f);
    double initial_step(double t_limit);
    void build_dense();

    std::size_t dim_;
    Rhs rhs_;
    Options opt_;

    double t_ = 0.0, t_prev_ = 0.0, h_ = 0.0;
    std::vector<double> y_, y_prev_;
    std::vector<std::vector<double>> k_; // 7 stage slopes
    std::vector<double> ytmp_, yerr_;
    std::vector<double> rcont1_, rcont2_, rcont3_, rcont4_, rcont5_;
    bool fsal_valid_ = false;
    long n_accepted_ = 0, n_rejected_ = 0;
};

/// Locates a root of g along the current dense segment of the stepper by
/// bisection; g_lo and g_hi must have opposite signs. Returns the time located
/// to tol_t.
double bisect_event(const Dopri5& stepper,
                    const std::function<double(double, const std::vector<double>&)>& g,
                    double t_lo, double t_hi, double g_lo, double tol_t);

} // namespace nbodylab

#endif
