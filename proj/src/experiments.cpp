#include "nbodylab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "nbodylab/equilibria.hpp"
#include "nbodylab/generators.hpp"
#include "nbodylab/kepler.hpp"
#include "nbodylab/macmillan.hpp"
#include "nbodylab/ode.hpp"
#include "nbodylab/report.hpp"
#include "nbodylab/threshold.hpp"

namespace fs = std::filesystem;

namespace nbodylab::io {

AlphaSystem system_from_config(const Config& cfg) {
    return AlphaSystem(cfg.get_doubles("system.masses"), cfg.get_double("system.alpha"));
}

PhaseState state_from_config(const Config& cfg, const AlphaSystem& sys, std::uint64_t seed,
                             double omega) {
    if (cfg.has("generator.kind")) {
        Rng rng(seed);
        const std::string kind = cfg.get_string("generator.kind");
        if (kind == "random")
            return generators::random_state(sys, rng, cfg.get_double("generator.pos_scale", 1.0),
                                            cfg.get_double("generator.vel_scale", 1.0));
        if (kind == "expanding")
            return generators::expanding_state(sys, rng,
                                               cfg.get_double("generator.pos_scale", 4.0),
                                               cfg.get_double("generator.expansion_rate", 0.5));
        if (kind == "shrunk_circular") {
            const double lambda = cfg.get_double("generator.lambda", 0.8);
            const auto cc = equilibria::excited_energy(sys, omega, 16, seed).minimizer;
            return generators::shrunk_circular_state(sys, cc.positions, omega, lambda);
        }
        if (kind == "k1_candidate") return generators::k1_candidate_state(sys, rng, omega);
        throw ConfigError("unknown generator.kind '" + kind + "'");
    }
    PhaseState st;
    st.positions.resize(sys.size());
    st.velocities.resize(sys.size());
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const std::string base = "state.body" + std::to_string(i + 1);
        const std::vector<double> p = cfg.get_doubles(base + ".position");
        const std::vector<double> v = cfg.get_doubles(base + ".velocity");
        if (p.size() != 3 || v.size() != 3)
            throw ConfigError(base + " position/velocity must have three components");
        st.positions[i] = {p[0], p[1], p[2]};
        st.velocities[i] = {v[0], v[1], v[2]};
    }
    return st;
}

IntegratorConfig integrator_from_config(const Config& cfg, std::optional<double> horizon) {
    IntegratorConfig ic;
    ic.rel_tol = cfg.get_double("integrator.rel_tol", ic.rel_tol);
    ic.abs_tol = cfg.get_double("integrator.abs_tol", ic.abs_tol);
    ic.h_init = cfg.get_double("integrator.h_init", ic.h_init);
    ic.h_min = cfg.get_double("integrator.h_min", ic.h_min);
    ic.h_max = cfg.get_double("integrator.h_max", ic.h_max);
    ic.collision_radius_factor =
        cfg.get_double("integrator.collision_radius_factor", ic.collision_radius_factor);
    ic.t_max = cfg.get_double("integrator.t_max", ic.t_max);
    ic.escape_window = cfg.get_double("integrator.escape_window", ic.escape_window);
    ic.escape_radius_factor =
        cfg.get_double("integrator.escape_radius_factor", ic.escape_radius_factor);
    ic.sample_interval = cfg.get_double("integrator.sample_interval", ic.sample_interval);
    if (horizon) ic.t_max = *horizon;
    return ic;
}

namespace {

const std::vector<std::string> kSystemKeys = {"experiment", "seed", "system.masses",
                                              "system.alpha", "omega"};
const std::vector<std::string> kStateKeys = {
    "state.body<k>.position", "state.body<k>.velocity", "generator.kind",
    "generator.pos_scale",    "generator.vel_scale",    "generator.lambda",
    "generator.expansion_rate"};
const std::vector<std::string> kIntegratorKeys = {
    "integrator.rel_tol", "integrator.abs_tol",
    "integrator.h_init",  "integrator.h_min",
    "integrator.h_max",   "integrator.collision_radius_factor",
    "integrator.t_max",   "integrator.escape_window",
    "integrator.escape_radius_factor", "integrator.sample_interval"};

std::vector<std::string> concat(std::initializer_list<std::vector<std::string>> lists,
                                std::initializer_list<const char*> extra = {}) {
    std::vector<std::string> out;
    for (const auto& l : lists) out.insert(out.end(), l.begin(), l.end());
    for (const char* e : extra) out.emplace_back(e);
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

double resolve_e_star(const Config& cfg, const AlphaSystem& sys, double omega,
                      std::uint64_t seed) {
    if (cfg.has("e_star")) return cfg.get_double("e_star");
    return equilibria::excited_energy(sys, omega, static_cast<int>(cfg.get_u64("restarts", 16)),
                                      seed)
        .e_star;
}

int run_simulate(const Config& cfg, const RunOptions& opts, const std::string& hash) {
    cfg.require_keys_among(concat({kSystemKeys, kStateKeys, kIntegratorKeys},
                                  {"e_star", "restarts"}));
    const AlphaSystem sys = system_from_config(cfg);
    const double omega = opts.omega.value_or(cfg.get_double("omega"));
    const std::uint64_t seed = opts.seed.value_or(cfg.get_u64("seed", 1));
    const PhaseState st = state_from_config(cfg, sys, seed, omega);
    const IntegratorConfig ic = integrator_from_config(cfg, opts.horizon);
    const double e_star = cfg.has("e_star") ? cfg.get_double("e_star")
                                            : std::numeric_limits<double>::quiet_NaN();
    const TrajectoryRecord rec = integrate(sys, st, omega, ic, e_star);
    std::ostringstream csv;
    write_trajectory_csv(csv, sys, rec);
    write_text(fs::path(opts.out_dir) / "trajectory.csv", csv.str());
    nlohmann::json j{{"config_hash", hash},
                     {"outcome", to_string(rec.outcome.kind)},
                     {"reason", rec.outcome.reason},
                     {"samples", rec.samples.size()},
                     {"energy_drift", rec.energy_drift},
                     {"low_accuracy", rec.low_accuracy}};
    write_text(fs::path(opts.out_dir) / "simulate.json", j.dump(2) + "\n");
    return 0;
}

int run_classify(const Config& cfg, const RunOptions& opts, const std::string& hash) {
    cfg.require_keys_among(concat({kSystemKeys, kStateKeys, kIntegratorKeys},
                                  {"e_star", "restarts"}));
    const AlphaSystem sys = system_from_config(cfg);
    const double omega = opts.omega.value_or(cfg.get_double("omega"));
    const std::uint64_t seed = opts.seed.value_or(cfg.get_u64("seed", 1));
    const PhaseState st = state_from_config(cfg, sys, seed, omega);
    const IntegratorConfig ic = integrator_from_config(cfg, opts.horizon);
    const double e_star = resolve_e_star(cfg, sys, omega, seed);
    const ClassifyResult res = classify_trajectory(sys, omega, st, e_star, ic);
    const nlohmann::json j = classify_report(sys, omega, e_star, res, hash);
    validate_schema(j, schema_classify());
    write_text(fs::path(opts.out_dir) / "classify.json", j.dump(2) + "\n");
    std::ostringstream csv;
    write_trajectory_csv(csv, sys, res.record);
    write_text(fs::path(opts.out_dir) / "trajectory.csv", csv.str());
    return res.outcome.kind == OutcomeKind::Undecided ? 2 : 0;
}

int run_excited_energy(const Config& cfg, const RunOptions& opts, const std::string& hash) {
    cfg.require_keys_among(concat({kSystemKeys}, {"restarts"}));
    const AlphaSystem sys = system_from_config(cfg);
    const double omega = opts.omega.value_or(cfg.get_double("omega"));
    const std::uint64_t seed = opts.seed.value_or(cfg.get_u64("seed", 20260801));
    equilibria::ExcitedEnergyResult res;
    try {
        res = equilibria::excited_energy(sys, omega,
                                         static_cast<int>(cfg.get_u64("restarts", 32)), seed);
    } catch (const NoConvergence&) {
        return 2;
    }
    const nlohmann::json j = excited_energy_report(sys, omega, res, hash);
    validate_schema(j, schema_excited_energy());
    write_text(fs::path(opts.out_dir) / "excited_energy.json", j.dump(2) + "\n");
    return 0;
}

int run_kepler_portrait(const Config& cfg, const RunOptions& opts, const std::string& hash) {
    cfg.require_keys_among({"experiment", "seed", "kepler.alpha", "kepler.c", "portrait.r_min",
                            "portrait.r_max", "portrait.samples", "portrait.orbit_t_max"});
    const double alpha = cfg.get_double("kepler.alpha");
    const double c = cfg.get_double("kepler.c");
    const kepler::Params params{alpha, c};
    const kepler::CriticalPoint cp = kepler::critical_point(params);
    const double r_min = cfg.get_double("portrait.r_min", 0.3 * cp.r0);
    const double r_max = cfg.get_double("portrait.r_max", 3.0 * cp.r0);
    const long nsamp = cfg.get_long("portrait.samples", 400);

    std::ostringstream csv;
    csv << "kind,name,t,r,rdot,value\n";
    csv << "meta,r0,,,," << format_double(cp.r0) << "\n";
    csv << "meta,v_star,,,," << format_double(cp.v_star) << "\n";
    csv << "meta,omega,,,," << format_double(kepler::c_to_omega(alpha, c)) << "\n";

    SvgSeries sep_up{"separatrix", "black", {}, {}};
    SvgSeries sep_dn{"", "black", {}, {}};
    for (long i = 0; i <= nsamp; ++i) {
        const double r = r_min + (r_max - r_min) * static_cast<double>(i) / nsamp;
        const double gap = cp.v_star - kepler::effective_potential(params, r);
        if (gap < 0.0) continue;
        const double rd = std::sqrt(2.0 * gap);
        csv << "separatrix,upper,," << format_double(r) << "," << format_double(rd) << ",\n";
        csv << "separatrix,lower,," << format_double(r) << "," << format_double(-rd) << ",\n";
        sep_up.x.push_back(r);
        sep_up.y.push_back(rd);
        sep_dn.x.push_back(r);
        sep_dn.y.push_back(-rd);
    }

    // Sample orbits: inside the barrier (collision) and outside (escape),
    // integrated as the planar Kepler flow.
    std::vector<SvgSeries> series{sep_up, sep_dn};
    const double t_cap = cfg.get_double("portrait.orbit_t_max", 30.0);
    int orbit_id = 0;
    for (double f : {0.6, 0.8, 1.3, 1.8}) {
        const double r_start = f * cp.r0;
        Dopri5::Options oo;
        oo.rel_tol = 1e-10;
        oo.abs_tol = 1e-12;
        Dopri5 stepper(4, [alpha](double, const std::vector<double>& y, std::vector<double>& d) {
            const double r2 = y[0] * y[0] + y[1] * y[1];
            const double f_r = alpha * std::pow(r2, -(alpha + 2.0) / 2.0);
            d = {y[2], y[3], -f_r * y[0], -f_r * y[1]};
        }, oo);
        stepper.init(0.0, {r_start, 0.0, 0.0, c / r_start});
        SvgSeries orbit{"orbit" + std::to_string(orbit_id), f < 1.0 ? "red" : "blue", {}, {}};
        while (stepper.t() < t_cap) {
            if (stepper.step(t_cap) != Dopri5::StepStatus::Ok) break;
            const auto& y = stepper.y();
            const double r = std::sqrt(y[0] * y[0] + y[1] * y[1]);
            const double rdot = (y[0] * y[2] + y[1] * y[3]) / r;
            csv << "orbit,orbit" << orbit_id << "," << format_double(stepper.t()) << ","
                << format_double(r) << "," << format_double(rdot) << ",\n";
            orbit.x.push_back(r);
            orbit.y.push_back(rdot);
            if (r < 0.05 * cp.r0 || r > 1.5 * r_max) break;
        }
        series.push_back(std::move(orbit));
        ++orbit_id;
    }
    write_text(fs::path(opts.out_dir) / "portrait.csv", csv.str());
    write_text(fs::path(opts.out_dir) / "portrait.svg",
               svg_line_chart("Kepler (r, rdot) portrait", series, "r", "rdot", hash));
    return 0;
}

int run_twobody(const Config& cfg, const RunOptions& opts, const std::string& hash) {
    cfg.require_keys_among(concat({kIntegratorKeys},
                                  {"experiment", "seed", "system.masses", "system.alpha", "omega",
                                   "count"}));
    const std::vector<double> masses =
        cfg.has("system.masses") ? cfg.get_doubles("system.masses")
                                 : std::vector<double>{0.5, 0.5};
    if (masses.size() != 2) throw ConfigError("twobody-dichotomy needs exactly two masses");
    const double alpha = cfg.get_double("system.alpha", 4.0);
    const double omega = opts.omega.value_or(cfg.get_double("omega", 2.0));
    const int count = static_cast<int>(cfg.get_u64("count", 500));
    const std::uint64_t seed = opts.seed.value_or(cfg.get_u64("seed", 7));
    IntegratorConfig ic = integrator_from_config(cfg, opts.horizon);

    const TwoBodyEnsemble ens =
        twobody_dichotomy_ensemble(alpha, omega, masses[0], masses[1], count, seed, ic);

    std::ostringstream csv;
    csv << "index,r,rdot,c,energy,class,outcome,t_collision,parabola_bound,min_separation,"
           "k_sign_changes,as_predicted\n";
    int undecided = 0;
    for (const TwoBodyRun& run : ens.runs) {
        csv << run.index << ',' << format_double(run.r) << ',' << format_double(run.rdot) << ','
            << format_double(run.c) << ',' << format_double(run.energy_2b) << ','
            << (run.k_minus ? "K-" : "K+") << ',' << to_string(run.outcome) << ','
            << format_double(run.t_collision) << ',' << format_double(run.parabola_bound) << ','
            << format_double(run.min_separation) << ',' << run.k_sign_changes << ','
            << (run.as_predicted ? 1 : 0) << '\n';
        if (run.outcome == OutcomeKind::Undecided && run.k_minus) ++undecided;
    }
    write_text(fs::path(opts.out_dir) / "dichotomy.csv", csv.str());
    nlohmann::json j{{"config_hash", hash},
                     {"alpha", alpha},
                     {"omega", omega},
                     {"e_star", ens.e_star},
                     {"a_star", ens.a_star},
                     {"r0", ens.r0},
                     {"runs", ens.runs.size()},
                     {"misclassified", ens.misclassified}};
    write_text(fs::path(opts.out_dir) / "dichotomy.json", j.dump(2) + "\n");
    return ens.misclassified == 0 ? (undecided > 0 ? 2 : 0) : 2;
}

int run_macmillan(const Config& cfg, const RunOptions& opts, const std::string& hash) {
    cfg.require_keys_among({"experiment", "seed", "macmillan.alpha", "macmillan.epsilon",
                            "macmillan.z3_amplitude", "macmillan.t_max", "macmillan.r12_initial",
                            "macmillan.control", "macmillan.control_t_max"});
    const macmillan::MacParams params(cfg.get_double("macmillan.alpha", 3.0),
                                      cfg.get_double("macmillan.epsilon", 1e-3));
    const double amplitude = cfg.get_double("macmillan.z3_amplitude", 4.0);
    macmillan::TransitionConfig tc;
    tc.t_max = opts.horizon.value_or(cfg.get_double("macmillan.t_max", tc.t_max));
    tc.r12_initial = cfg.get_double("macmillan.r12_initial", 0.0);
    const macmillan::TransitionResult res = macmillan::transition_experiment(params, amplitude, tc);

    std::optional<macmillan::TransitionResult> control;
    if (cfg.get_double("macmillan.control", 1.0) != 0.0) {
        macmillan::TransitionConfig cc;
        cc.t_max = cfg.get_double("macmillan.control_t_max", 40.0);
        cc.r12_initial = 2.0; // exact circular radius of the massless problem
        control = macmillan::transition_experiment(macmillan::MacParams(params.alpha, 0.0), 0.0,
                                                   cc);
    }

    const nlohmann::json j =
        macmillan_report(params, amplitude, res, control ? &*control : nullptr, hash);
    validate_schema(j, schema_macmillan());
    write_text(fs::path(opts.out_dir) / "macmillan.json", j.dump(2) + "\n");

    std::ostringstream csv;
    csv << "t,x1,y1,z3,vx1,vy1,vz3,r12,K,energy\n";
    for (const macmillan::TransitionSample& s : res.samples)
        csv << format_double(s.t) << ',' << format_double(s.state.x1) << ','
            << format_double(s.state.y1) << ',' << format_double(s.state.z3) << ','
            << format_double(s.state.vx1) << ',' << format_double(s.state.vy1) << ','
            << format_double(s.state.vz3) << ',' << format_double(primary_separation(s.state))
            << ',' << format_double(s.k) << ',' << format_double(s.energy) << '\n';
    write_text(fs::path(opts.out_dir) / "macmillan_timeline.csv", csv.str());

    std::ostringstream tr;
    tr << "transition_index,t\n";
    for (std::size_t i = 0; i < res.transition_times.size(); ++i)
        tr << i << ',' << format_double(res.transition_times[i]) << '\n';
    write_text(fs::path(opts.out_dir) / "transitions.csv", tr.str());

    double kmax = 1e-300, zmax = 1e-300;
    for (const macmillan::TransitionSample& s : res.samples) {
        kmax = std::max(kmax, std::abs(s.k));
        zmax = std::max(zmax, std::abs(s.state.z3));
    }
    SvgSeries sk{"K_omega (x " + format_double(zmax / kmax) + ")", "red", {}, {}};
    SvgSeries sz{"z3", "blue", {}, {}};
    for (const macmillan::TransitionSample& s : res.samples) {
        sk.x.push_back(s.t);
        sk.y.push_back(s.k * zmax / kmax);
        sz.x.push_back(s.t);
        sz.y.push_back(s.state.z3);
    }
    write_text(fs::path(opts.out_dir) / "macmillan.svg",
               svg_line_chart("epsilon-MacMillan transitions", {sz, sk}, "t", "z3, scaled K",
                              hash));
    return res.count > 0 || params.epsilon == 0.0 ? 0 : 2;
}

int run_one(const Config& cfg, const RunOptions& opts, const std::string& kind,
            const std::string& hash);

int run_sweep(const Config& cfg, const RunOptions& opts) {
    const std::string parameter = cfg.get_string("sweep.parameter");
    const std::vector<double> values = cfg.get_doubles("sweep.values");
    const std::string kind = cfg.get_string("sweep.experiment");

    // Derived config text: strip sweep.* and experiment keys, then append the
    // swept value. Run directories are named by run index.
    std::vector<std::string> kept;
    std::istringstream in(cfg.source_text());
    std::string line;
    while (std::getline(in, line)) {
        const std::string trimmed = line.substr(0, line.find('#'));
        const std::size_t eq = trimmed.find('=');
        if (eq != std::string::npos) {
            std::string key = trimmed.substr(0, eq);
            key.erase(key.find_last_not_of(" \t") + 1);
            key.erase(0, key.find_first_not_of(" \t"));
            if (key.rfind("sweep.", 0) == 0 || key == "experiment" || key == parameter) continue;
        }
        kept.push_back(line);
    }

    int workers = opts.workers;
    if (workers <= 0) {
        if (const char* env = std::getenv("NBODYLAB_WORKERS")) workers = std::atoi(env);
        if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers <= 0) workers = 2;
    }

    std::vector<int> codes(values.size(), 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= values.size()) return;
            std::string text;
            for (const std::string& l : kept) text += l + "\n";
            text += "experiment = " + kind + "\n";
            text += parameter + " = " + format_double(values[i]) + "\n";
            RunOptions sub = opts;
            sub.out_dir = (fs::path(opts.out_dir) / ("run" + std::to_string(i))).string();
            fs::create_directories(sub.out_dir);
            try {
                const Config derived = Config::parse_string(text, "sweep:run" + std::to_string(i));
                codes[i] = run_one(derived, sub, kind, hash_hex(fnv1a_hash(text)));
            } catch (const Error&) {
                codes[i] = 1;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();

    std::ostringstream csv;
    csv << "index," << parameter << ",exit_code,directory\n";
    int worst = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        csv << i << ',' << format_double(values[i]) << ',' << codes[i] << ",run" << i << "\n";
        worst = std::max(worst, codes[i]);
    }
    write_text(fs::path(opts.out_dir) / "index.csv", csv.str());
    return worst;
}

int run_one(const Config& cfg, const RunOptions& opts, const std::string& kind,
            const std::string& hash) {
    fs::create_directories(opts.out_dir);
    if (kind == "simulate") return run_simulate(cfg, opts, hash);
    if (kind == "classify") return run_classify(cfg, opts, hash);
    if (kind == "excited-energy") return run_excited_energy(cfg, opts, hash);
    if (kind == "kepler-portrait") return run_kepler_portrait(cfg, opts, hash);
    if (kind == "twobody-dichotomy") return run_twobody(cfg, opts, hash);
    if (kind == "macmillan") return run_macmillan(cfg, opts, hash);
    throw ConfigError("unknown experiment kind '" + kind + "'");
}

} // namespace

int run_experiment(const Config& cfg, const RunOptions& opts, const std::string& expected_kind) {
    std::string kind = cfg.get_string("experiment", expected_kind);
    if (!expected_kind.empty()) {
        if (kind != expected_kind && cfg.has("experiment"))
            throw ConfigError("config says experiment = " + kind + " but the subcommand is " +
                              expected_kind);
        kind = expected_kind;
    }
    if (kind.empty()) throw ConfigError("no experiment kind given");
    if (kind == "sweep") {
        fs::create_directories(opts.out_dir);
        return run_sweep(cfg, opts);
    }
    return run_one(cfg, opts, kind, hash_hex(fnv1a_hash(cfg.source_text())));
}

TwoBodyEnsemble twobody_dichotomy_ensemble(double alpha, double omega, double m1, double m2,
                                           int count, std::uint64_t seed,
                                           const IntegratorConfig& config) {
    const kepler::TwoBodyThresholds th = kepler::twobody_thresholds(m1, m2, alpha, omega);
    const double c_omega = kepler::omega_to_c(alpha, omega);
    const kepler::CriticalPoint cp = kepler::critical_point({alpha, c_omega});
    const AlphaSystem sys({m1, m2}, alpha);

    TwoBodyEnsemble ens;
    ens.e_star = th.e_star;
    ens.a_star = th.a_star;
    ens.r0 = cp.r0;
    Rng rng(seed);

    for (int i = 0; i < count; ++i) {
        const bool k_minus = i % 2 == 0;
        double r = 0.0, e_red = 0.0, c = 0.0;
        for (int attempt = 0;; ++attempt) {
            if (attempt > 10000) throw NoConvergence("two-body sampler starved");
            r = k_minus ? cp.r0 * rng.uniform(0.35, 0.97) : cp.r0 * rng.uniform(1.03, 3.0);
            c = c_omega * (1.0 + rng.uniform(0.0, 0.5));
            const double vc = kepler::effective_potential({alpha, c}, r);
            if (vc >= cp.v_star * (1.0 - 1e-3)) continue;
            e_red = vc + (cp.v_star * (1.0 - 1e-3) - vc) * rng.uniform(0.0, 1.0);
            break;
        }
        const double rdot =
            (rng.uniform() < 0.5 ? -1.0 : 1.0) *
            std::sqrt(std::max(0.0, 2.0 * (e_red - kepler::effective_potential({alpha, c}, r))));
        const PhaseState st = generators::twobody_state(sys, r, rdot, c);

        TwoBodyRun run;
        run.index = i;
        run.r = r;
        run.rdot = rdot;
        run.c = c;
        run.k_minus = k_minus;
        const InvariantRecord inv0 = invariants(sys, st);
        run.energy_2b = inv0.energy;

        const TrajectoryRecord rec = integrate(sys, st, omega, config, th.e_star);
        run.outcome = rec.outcome.kind;
        run.t_collision = rec.outcome.t_collision;
        run.k_sign_changes = 0;
        for (const TrajectoryEvent& e : rec.events)
            if (e.kind == EventKind::KSignChange) ++run.k_sign_changes;
        run.min_separation = std::numeric_limits<double>::infinity();
        for (const TrajectorySample& s : rec.samples)
            run.min_separation =
                std::min(run.min_separation, min_pair_distance(s.state.positions));

        // Concave-parabola collision bound: Iddot < -4 delta with
        // delta = E*(omega) - E in the two-body normalization.
        const double delta = th.e_star - inv0.energy;
        run.parabola_bound =
            (inv0.inertia_rate + std::sqrt(inv0.inertia_rate * inv0.inertia_rate +
                                           8.0 * delta * inv0.inertia)) /
            (4.0 * delta);

        if (k_minus) {
            run.as_predicted = run.outcome == OutcomeKind::Collision &&
                               run.t_collision <= run.parabola_bound + 1e-6 &&
                               run.k_sign_changes == 0;
        } else {
            run.as_predicted = run.outcome != OutcomeKind::Collision &&
                               run.min_separation > cp.r0 && run.k_sign_changes == 0;
        }
        if (!run.as_predicted) ++ens.misclassified;
        ens.runs.push_back(run);
    }
    return ens;
}

} // namespace nbodylab::io
