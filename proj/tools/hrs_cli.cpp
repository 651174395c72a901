// hrs: command-line driver for the two-time sub-quantum simulator.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hrs/algebra.hpp"
#include "hrs/concentration.hpp"
#include "hrs/config.hpp"
#include "hrs/dynamics.hpp"
#include "hrs/emergence.hpp"
#include "hrs/error.hpp"
#include "hrs/experiments.hpp"
#include "hrs/report.hpp"

namespace {

using hrs::Json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitContract = 3;

// Raised for bad flags; maps to the config-error exit code.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string format = "json";
    std::optional<std::int64_t> trials;
};

void add_common(CLI::App* cmd, Common& c, bool with_trials) {
    cmd->add_option("--config", c.config_path, "config file (key = value lines)");
    cmd->add_option("--seed", c.seed, "master seed, overrides the config");
    cmd->add_option("--out", c.out_path, "output file (default: stdout)");
    cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    if (with_trials) cmd->add_option("--trials", c.trials, "trials per setting pair, overrides the config");
}

std::vector<double> parse_list(const std::string& flag, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError(flag + ": not a number: '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

template <std::size_t N>
std::array<double, N> parse_fixed(const std::string& flag, const std::string& text) {
    const auto v = parse_list(flag, text);
    if (v.size() != N) throw UsageError(flag + ": expected " + std::to_string(N) + " values");
    std::array<double, N> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

hrs::SimConfig load(const Common& c, const std::string& command) {
    if (c.config_path.empty()) throw UsageError(command + ": missing required flag --config");
    hrs::SimConfig cfg = hrs::load_config(c.config_path);
    if (c.seed) cfg.seed = *c.seed;
    if (c.trials) {
        if (*c.trials < 1) throw UsageError("--trials must be positive");
        cfg.trials = *c.trials;
    }
    return cfg;
}

Json header(const std::string& command, const std::optional<hrs::SimConfig>& cfg) {
    Json j;
    j["command"] = command;
    if (cfg) {
        j["seed"] = cfg->seed;
        j["config"] = hrs::to_json(*cfg);
    } else {
        j["seed"] = nullptr;
        j["config"] = nullptr;
    }
    return j;
}

void emit(const Common& c, const std::string& text) {
    if (c.out_path.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(c.out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file " + c.out_path);
    f << text;
}

void emit_json(const Common& c, Json doc) { emit(c, doc.dump(2) + "\n"); }

std::vector<double> scale_distances(const std::vector<double>& d, bool in_ct, const hrs::SimConfig& cfg) {
    if (!in_ct) return d;
    const double ct = static_cast<double>(hrs::system_semi_period(cfg)) * cfg.lattice_spacing;
    std::vector<double> out;
    for (double x : d) out.push_back(x * ct);
    return out;
}

const std::string kDefaultAngles = "0,0.7853981633974483,0.39269908169744964,1.1780972450961724";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-time sub-quantum ensemble simulator"};
    app.require_subcommand(1, 1);

    Common simulate_c, epr_c, chsh_c, scan_c, inst_c, nosig_c, bell_c, conc_c, alg_c;

    auto* simulate = app.add_subcommand("simulate", "run tau_ticks cycles and report the emergent state");
    add_common(simulate, simulate_c, false);
    std::string trajectory_path;
    std::int64_t every = 0;
    simulate->add_option("--trajectory", trajectory_path, "also write the trajectory CSV to this path");
    simulate->add_option("--every", every, "trajectory sampling stride in t-steps (default: semi-period)");

    auto* epr = app.add_subcommand("epr", "correlation record for one pair of detector settings");
    add_common(epr, epr_c, true);
    std::string epr_settings = "0,0";
    epr->add_option("--settings", epr_settings, "detector angles a,b in radians");

    auto* chsh_cmd = app.add_subcommand("chsh", "CHSH statistic from four setting pairs");
    add_common(chsh_cmd, chsh_c, true);
    std::string chsh_angles = kDefaultAngles;
    chsh_cmd->add_option("--angles", chsh_angles, "a,a',b,b' in radians");

    auto* scan = app.add_subcommand("scan-distance", "concurrence versus detector separation");
    add_common(scan, scan_c, false);
    std::string scan_distances = "0.1,0.5,1,2,4";
    bool scan_in_ct = false;
    scan->add_option("--distances", scan_distances, "sorted detector separations");
    scan->add_flag("--in-ct", scan_in_ct, "distances are multiples of c*T");

    auto* inst = app.add_subcommand("instantaneity", "tau-latency of thermalization after projection");
    add_common(inst, inst_c, false);
    std::string inst_distances = "0,0.05,0.1,0.2,0.3,0.4";
    bool inst_in_ct = false;
    inst->add_option("--distances", inst_distances, "detector separations, each below 0.5 c*T");
    inst->add_flag("--in-ct", inst_in_ct, "distances are multiples of c*T");

    auto* nosig = app.add_subcommand("no-signaling", "observer-1 marginal versus the remote setting");
    add_common(nosig, nosig_c, true);
    double nosig_setting1 = 0.0;
    std::string nosig_settings2 = "0,0.7853981633974483";
    nosig->add_option("--setting1", nosig_setting1, "observer-1 angle");
    nosig->add_option("--settings2", nosig_settings2, "the two remote angles x,y");

    auto* bell = app.add_subcommand("bell-compare", "best factorized fit to the simulated correlations");
    add_common(bell, bell_c, true);
    std::string bell_angles = kDefaultAngles;
    int lambda_grid = 128;
    bell->add_option("--angles", bell_angles, "a,a',b,b' in radians");
    bell->add_option("--lambda-grid", lambda_grid, "hidden-variable grid points (>= 100)");

    auto* conc = app.add_subcommand("concentration", "deviation probability scan of the mean coordinate");
    add_common(conc, conc_c, false);
    std::string conc_dims = "50,100,200,400";
    double conc_eps = 0.15;
    std::size_t conc_samples = 100000;
    bool conc_collapse = false;
    conc->add_option("--dims", conc_dims, "strictly increasing ensemble sizes");
    conc->add_option("--epsilon", conc_eps, "deviation threshold");
    conc->add_option("--samples", conc_samples, "samples per size");
    conc->add_flag("--collapse", conc_collapse, "also run the one-cycle collapse demo");

    auto* alg = app.add_subcommand("algebra-check", "discrete commutator residuals and convergence order");
    add_common(alg, alg_c, false);
    std::size_t grid_size = 129;
    double spacing = 0.1;
    alg->add_option("--grid-size", grid_size, "points per axis (>= 8)");
    alg->add_option("--spacing", spacing, "grid spacing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*simulate) {
            const auto cfg = load(simulate_c, "simulate");
            const auto schedule = hrs::make_schedule(cfg);
            const std::int64_t stride = every > 0 ? every : schedule.semi_period;
            std::ostringstream traj;
            traj << hrs::kTrajectoryHeader << '\n';
            const bool want_traj = !trajectory_path.empty() || simulate_c.format == "csv";
            Json series = Json::array();
            const auto observe = [&](const hrs::Ensemble& e) {
                if (want_traj && e.t_step % stride == 0) traj << hrs::trajectory_rows(e);
            };
            hrs::RandomStream init = hrs::rng_stream(cfg.seed, hrs::derive_stream_id(0, 0, 0xA));
            hrs::Ensemble e = hrs::make_ensemble(cfg, init);
            hrs::CycleHooks hooks;
            hooks.observe = observe;
            if (cfg.thermalization) {
                hooks.ergodic = [&cfg](hrs::Ensemble& ens, hrs::RandomStream& s) {
                    ens = hrs::thermalize_pairs(std::move(ens), cfg, s);
                };
            }
            for (std::int64_t c = 0; c < cfg.tau_ticks; ++c) {
                e = hrs::run_cycle(std::move(e), cfg, hooks, 0);
                const auto state = hrs::average_velocities(e);
                series.push_back({{"tau", e.tau_tick}, {"satisfied_fraction", hrs::satisfied_fraction(e)},
                                  {"concurrence", hrs::concurrence(state)}});
            }
            if (want_traj) traj << hrs::trajectory_rows(e);
            if (!trajectory_path.empty()) {
                std::ofstream f(trajectory_path, std::ios::binary | std::ios::trunc);
                if (!f) throw std::runtime_error("cannot open trajectory file " + trajectory_path);
                f << traj.str();
            }
            if (simulate_c.format == "csv") {
                emit(simulate_c, traj.str());
            } else {
                Json doc = header("simulate", cfg);
                doc["semi_period"] = schedule.semi_period;
                doc["tau_series"] = series;
                doc["satisfied_fraction"] = hrs::satisfied_fraction(e);
                doc["state"] = hrs::to_json(hrs::average_velocities(e));
                emit_json(simulate_c, doc);
            }
        } else if (*epr) {
            const auto cfg = load(epr_c, "epr");
            const auto s = parse_fixed<2>("--settings", epr_settings);
            const auto rec = hrs::run_epr(cfg, s[0], s[1]);
            if (epr_c.format == "csv") {
                emit(epr_c, hrs::correlation_csv({rec}));
            } else {
                Json doc = header("epr", cfg);
                doc.update(hrs::to_json(rec));
                emit_json(epr_c, doc);
            }
        } else if (*chsh_cmd) {
            const auto cfg = load(chsh_c, "chsh");
            const auto angles = parse_fixed<4>("--angles", chsh_angles);
            const auto r = hrs::chsh(cfg, angles);
            if (chsh_c.format == "csv") {
                emit(chsh_c, hrs::correlation_csv({r.records.begin(), r.records.end()}));
            } else {
                Json doc = header("chsh", cfg);
                doc.update(hrs::to_json(r));
                emit_json(chsh_c, doc);
            }
        } else if (*scan) {
            const auto cfg = load(scan_c, "scan-distance");
            const auto d = scale_distances(parse_list("--distances", scan_distances), scan_in_ct, cfg);
            const auto r = hrs::scan_distance(cfg, d);
            if (scan_c.format == "csv") {
                emit(scan_c, hrs::scan_csv(r));
            } else {
                Json doc = header("scan-distance", cfg);
                doc.update(hrs::to_json(r));
                emit_json(scan_c, doc);
            }
        } else if (*inst) {
            const auto cfg = load(inst_c, "instantaneity");
            const auto d = scale_distances(parse_list("--distances", inst_distances), inst_in_ct, cfg);
            const auto r = hrs::instantaneity_check(cfg, d);
            if (inst_c.format == "csv") {
                emit(inst_c, hrs::instantaneity_csv(r));
            } else {
                Json doc = header("instantaneity", cfg);
                doc.update(hrs::to_json(r));
                emit_json(inst_c, doc);
            }
            for (const auto& p : r) {
                if (p.latency != 1) {
                    std::cerr << "instantaneity: latency " << p.latency << " at distance " << p.distance << '\n';
                    return kExitContract;
                }
            }
        } else if (*nosig) {
            const auto cfg = load(nosig_c, "no-signaling");
            const auto s2 = parse_fixed<2>("--settings2", nosig_settings2);
            const auto r = hrs::no_signaling_test(cfg, s2, static_cast<std::uint64_t>(cfg.trials), nosig_setting1);
            if (nosig_c.format == "csv") {
                std::ostringstream os;
                os << "setting_2,p_plus,trials\n";
                for (int k = 0; k < 2; ++k) {
                    os << hrs::format_number(r.settings_2[k]) << ',' << hrs::format_number(r.first_plus[k]) << ','
                       << r.trials << '\n';
                }
                emit(nosig_c, os.str());
            } else {
                Json doc = header("no-signaling", cfg);
                doc.update(hrs::to_json(r));
                emit_json(nosig_c, doc);
            }
            if (!r.passed) {
                std::cerr << "no-signaling: |dP| = " << r.delta << " exceeds 3 sigma = " << 3.0 * r.sigma << '\n';
                return kExitContract;
            }
        } else if (*bell) {
            const auto cfg = load(bell_c, "bell-compare");
            const auto angles = parse_fixed<4>("--angles", bell_angles);
            const auto r = hrs::bell_factorization_compare(cfg, angles, lambda_grid);
            if (bell_c.format == "csv") {
                emit(bell_c, hrs::correlation_csv({r.simulated.records.begin(), r.simulated.records.end()}));
            } else {
                Json doc = header("bell-compare", cfg);
                doc.update(hrs::to_json(r));
                emit_json(bell_c, doc);
            }
            if (!r.contract_holds) {
                std::cerr << "bell-compare: factorized fit closer than the CHSH lower bound\n";
                return kExitContract;
            }
        } else if (*conc) {
            const auto cfg = load(conc_c, "concentration");
            std::vector<std::size_t> dims;
            for (double v : parse_list("--dims", conc_dims)) {
                if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
                    throw UsageError("--dims: sizes must be positive integers");
                }
                dims.push_back(static_cast<std::size_t>(v));
            }
            hrs::RandomStream stream = hrs::rng_stream(cfg.seed, hrs::derive_stream_id(0xC0, 0));
            const auto r = hrs::concentration_scan(hrs::mean_coordinate, dims, conc_eps, conc_samples, stream);
            if (conc_c.format == "csv") {
                emit(conc_c, hrs::concentration_csv(r));
            } else {
                Json doc = header("concentration", cfg);
                doc.update(hrs::to_json(r));
                if (conc_collapse) doc["collapse"] = hrs::to_json(hrs::collapse_concentration_demo(cfg));
                emit_json(conc_c, doc);
            }
        } else if (*alg) {
            std::optional<hrs::SimConfig> cfg;
            if (!alg_c.config_path.empty()) cfg = load(alg_c, "algebra-check");
            const auto r = hrs::check_commutators(grid_size, spacing);
            if (alg_c.format == "csv") {
                std::ostringstream os;
                os << "quantity,value\n";
                const Json fields = hrs::to_json(r);
                for (const auto& [k, v] : fields.items()) os << k << ',' << v.dump() << '\n';
                emit(alg_c, os.str());
            } else {
                Json doc = header("algebra-check", cfg);
                doc.update(hrs::to_json(r));
                emit_json(alg_c, doc);
            }
            if (r.position_position > 1e-12 || r.momentum_momentum > 1e-12 || r.convergence_order < 1.9) {
                std::cerr << "algebra-check: commutator residuals outside tolerance\n";
                return kExitContract;
            }
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const hrs::Error& e) {
        std::cerr << "error [" << hrs::to_string(e.kind()) << "]: " << e.what() << '\n';
        return e.is_config_error() ? kExitConfig : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}
