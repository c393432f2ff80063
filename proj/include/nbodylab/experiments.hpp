#ifndef NBODYLAB_EXPERIMENTS_HPP
#define NBODYLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nbodylab/config.hpp"
#include "nbodylab/integrate.hpp"

namespace nbodylab::io {

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<double> horizon;
    std::optional<double> omega;
    int workers = 0; // 0: NBODYLAB_WORKERS env or hardware concurrency
};

/// Dispatches on the experiment kind (from expected_kind, or the config's
/// `experiment` key). Returns 0 on success, 2 on NoConvergence or
/// Undecided-only results; throws ConfigError and friends for exit code 1.
int run_experiment(const Config& cfg, const RunOptions& opts,
                   const std::string& expected_kind = "");

/// Config helpers shared by the drivers and the tests.
AlphaSystem system_from_config(const Config& cfg);
PhaseState state_from_config(const Config& cfg, const AlphaSystem& sys, std::uint64_t seed,
                             double omega);
IntegratorConfig integrator_from_config(const Config& cfg, std::optional<double> horizon);

/// One sampled reduced two-body run of the dichotomy ensemble.
struct TwoBodyRun {
    int index;
    double r, rdot, c; // reduced initial data
    double energy_2b;  // two-body energy m1 m2 E_red
    bool k_minus;      // true: started with K_omega < 0 (r < r0)
    OutcomeKind outcome;
    double t_collision;    // NaN unless collided
    double parabola_bound; // positive root of I0 + Idot0 t - 2 delta t^2
    double min_separation; // over the whole run
    int k_sign_changes;
    bool as_predicted;
};

struct TwoBodyEnsemble {
    std::vector<TwoBodyRun> runs;
    int misclassified = 0;
    double e_star;
    double a_star;
    double r0;
};

/// Samples `count` states with E < E*(omega) and |A| >= A*(omega) split
/// between K- (r < r0) and K+ (r > r0), integrates each, and checks the
/// two-body dichotomy: K- collides before the concave-parabola bound, K+
/// survives the horizon with separation above r0 and no K sign change.
TwoBodyEnsemble twobody_dichotomy_ensemble(double alpha, double omega, double m1, double m2,
                                           int count, std::uint64_t seed,
                                           const IntegratorConfig& config);

} // namespace nbodylab::io

#endif
