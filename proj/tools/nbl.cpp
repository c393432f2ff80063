// Command-line driver: one subcommand per experiment family, file outputs
// under --out. Exit codes: 0 success, 2 no-convergence or undecided-only
// results, 1 errors.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nbodylab/errors.hpp"
#include "nbodylab/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nbodylab: numerical laboratory for strong-force N-body dynamics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<double> horizon;
    std::optional<double> omega;
    int workers = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--horizon", horizon, "override the integration horizon");
        sub->add_option("--omega", omega, "override the frequency parameter");
        sub->add_option("--workers", workers,
                        "worker threads for sweep (default: NBODYLAB_WORKERS or hardware)");
    };

    const char* kinds[] = {"simulate",        "classify",  "excited-energy", "kepler-portrait",
                           "twobody-dichotomy", "macmillan", "sweep"};
    const char* descs[] = {
        "integrate a trajectory and write the CSV with invariants",
        "integrate and classify against the K1/K2 partition",
        "constrained minimum of E_omega over {K_omega = 0}",
        "effective-potential portrait of the reduced two-body problem",
        "sampled two-body dichotomy verdict table",
        "epsilon-MacMillan transition experiment",
        "fan an experiment out over a parameter grid"};
    for (int i = 0; i < 7; ++i) add_common(app.add_subcommand(kinds[i], descs[i]));

    CLI11_PARSE(app, argc, argv);

    const std::string kind = app.get_subcommands().front()->get_name();
    try {
        nbodylab::io::Config cfg = nbodylab::io::Config::parse_file(config_path);
        nbodylab::io::RunOptions opts;
        opts.out_dir = out_dir;
        opts.seed = seed;
        opts.horizon = horizon;
        opts.omega = omega;
        opts.workers = workers;
        return nbodylab::io::run_experiment(cfg, opts, kind);
    } catch (const nbodylab::NoConvergence& e) {
        std::fprintf(stderr, "no convergence: %s\n", e.what());
        return 2;
    } catch (const nbodylab::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
