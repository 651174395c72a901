// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hrs/algebra.hpp"
#include "hrs/concentration.hpp"
#include "hrs/config.hpp"
#include "hrs/dynamics.hpp"
#include "hrs/emergence.hpp"
#include "hrs/error.hpp"
#include "hrs/experiments.hpp"
#include "hrs/rng.hpp"
#include "support.hpp"

using namespace hrs;
using testing_support::read_file;
using testing_support::run_command;

namespace {

// Runtime ceilings, seconds. "Minutes" budgets are capped at ten.
constexpr double kFastBudget = 1.0;
constexpr double kMinuteBudget = 60.0;
constexpr double kMinutesBudget = 600.0;
constexpr double kAlgebraBudget = 10.0;

constexpr double kSemiPeriodRelTol = 1e-12;
constexpr double kEmergenceFloor = 0.95;
constexpr double kChshTol = 0.05;
constexpr double kRangeCeiling = 0.05;
constexpr double kSigmas = 3.0;
constexpr double kConcentrationEpsilon = 0.15;
constexpr std::size_t kConcentrationSamples = 1'000'000;
constexpr double kConcentrationR2 = 0.9;
constexpr double kCommutatorTol = 1e-12;
constexpr double kMinOrder = 1.9;
constexpr int kScanSalts = 8;

const std::array<double, 4> kChshAngles = {0.0, std::numbers::pi / 4, std::numbers::pi / 8, 3 * std::numbers::pi / 8};

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fixture(const std::string& name) { return std::string(HRS_FIXTURES) + "/" + name; }

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Verdict semi_period_law() {
    const auto start = std::chrono::steady_clock::now();
    RandomStream s = rng_stream(2024, 1);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double mu1 = s.uniform(0.0, 4.0), mu2 = s.uniform(0.0, 4.0);
        const auto t_min = static_cast<std::int64_t>(1 + s.next_u32() % 1000);
        const double lhs = semi_period_real(mu1 + mu2, t_min) * static_cast<double>(t_min);
        const double rhs = semi_period_real(mu1, t_min) * semi_period_real(mu2, t_min);
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    const double secs = seconds_since(start);
    return {worst <= kSemiPeriodRelTol && secs < kFastBudget,
            fmt("max relative error %.3g over 100 pairs, %.3f s", worst, secs)};
}

Verdict equilibrium() {
    SimConfig c = testing_support::small_config();
    c.n_a = c.n_b = 1000;
    c.t_min_steps = 50;
    const CycleSchedule sched = make_schedule(c);
    const BetaField beta = drift_beta_field(c.randers_drift);
    RandomStream s = rng_stream(c.seed, 0);
    Ensemble e = make_ensemble(c, s);

    bool ok = true;
    std::size_t checked = 0;
    double slowest = 0.0;
    constexpr int kCycles = 3;
    for (int cycle = 0; cycle < kCycles; ++cycle) {
        CycleHooks hooks;
        hooks.observe = [&](const Ensemble& x) {
            if (x.t_step != sched.semi_period) return;
            ok = ok && kappa(x.t_step, sched) == 1.0;
            for (const auto& m : x.molecules) {
                const auto u = phase_space_point(m);
                const auto p = canonical_momentum(m);
                ok = ok && hamiltonian_value(u, p, x.t_step, sched, beta) == 0.0;
                ++checked;
            }
        };
        const auto start = std::chrono::steady_clock::now();
        e = run_cycle(std::move(e), c, hooks, static_cast<std::uint64_t>(cycle));
        slowest = std::max(slowest, seconds_since(start));
    }
    ok = ok && checked == static_cast<std::size_t>(kCycles) * e.size();
    return {ok && slowest < kFastBudget,
            fmt("%zu molecule checks over %d cycles, slowest cycle %.3f s", checked, kCycles, slowest)};
}

Verdict bell_emergence() {
    SimConfig c = load_config(fixture("scan.cfg"));
    c.n_a = c.n_b = 5000;
    const double ct = static_cast<double>(system_semi_period(c)) * c.lattice_spacing;
    const RangeScan r = scan_distance(c, {0.1 * ct});
    const double fid = r.bell_fidelities[0];
    return {r.concurrences[0] >= kEmergenceFloor && fid >= kEmergenceFloor,
            fmt("concurrence %.6f, fidelity with %s %.6f", r.concurrences[0],
                std::string(to_string(configured_bell_state(c.bell_phase))).c_str(), fid)};
}

// Best local-deterministic S: enumerate the 16 outcome assignments.
double deterministic_chsh_bound() {
    double best = 0.0;
    for (int m = 0; m < 16; ++m) {
        const auto bit = [m](int k) { return (m >> k) & 1 ? 1.0 : -1.0; };
        const double a = bit(0), a2 = bit(1), b = bit(2), b2 = bit(3);
        best = std::max(best, chsh_value({a * b, a * b2, a2 * b, a2 * b2}));
    }
    return best;
}

Verdict chsh_violation() {
    const auto start = std::chrono::steady_clock::now();
    SimConfig singlet = load_config(fixture("demo.cfg"));
    singlet.trials = 100000;
    SimConfig control = load_config(fixture("product.cfg"));
    control.trials = 100000;
    const ChshResult q = chsh(singlet, kChshAngles);
    const ChshResult p = chsh(control, kChshAngles);
    const double bound = deterministic_chsh_bound();
    const double secs = seconds_since(start);
    const bool ok = std::abs(q.s_value - 2.0 * std::numbers::sqrt2) <= kChshTol &&
                    p.s_value <= bound + kSigmas * p.sigma && bound == 2.0 && secs < kMinutesBudget;
    return {ok, fmt("S = %.4f (target %.4f), control S = %.4f +- %.4f vs local bound %.1f, %.1f s", q.s_value,
                    2.0 * std::numbers::sqrt2, p.s_value, p.sigma, bound, secs)};
}

Verdict correlation_range() {
    const SimConfig c = load_config(fixture("scan.cfg"));
    const double ct = static_cast<double>(system_semi_period(c)) * c.lattice_spacing;
    const std::vector<double> distances = {0.1 * ct, 0.5 * ct, ct, 2 * ct, 4 * ct};

    std::vector<std::vector<double>> runs;
    for (int k = 0; k < kScanSalts; ++k) runs.push_back(scan_distance(c, distances, k).concurrences);

    const std::size_t n = distances.size();
    std::vector<double> mean(n, 0.0), sem(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& r : runs) mean[i] += r[i] / kScanSalts;
        double var = 0.0;
        for (const auto& r : runs) var += (r[i] - mean[i]) * (r[i] - mean[i]);
        sem[i] = std::sqrt(var / (kScanSalts - 1) / kScanSalts);
    }
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < n; ++i)
        monotone = monotone && mean[i + 1] <= mean[i] + kSigmas * std::hypot(sem[i], sem[i + 1]);
    const bool ok = runs[0].front() >= kEmergenceFloor && runs[0].back() <= kRangeCeiling &&
                    mean.front() >= kEmergenceFloor && mean.back() <= kRangeCeiling && monotone;

    std::ostringstream d;
    d << "mean concurrence by d/cT:";
    for (std::size_t i = 0; i < n; ++i) d << ' ' << distances[i] / ct << "->" << mean[i];
    d << (monotone ? ", nonincreasing" : ", NOT nonincreasing");
    return {ok, d.str()};
}

Verdict instantaneity() {
    const SimConfig c = load_config(fixture("scan.cfg"));
    const double ct = static_cast<double>(system_semi_period(c)) * c.lattice_spacing;
    std::vector<double> distances;
    for (int i = 0; i <= 8; ++i) distances.push_back(0.05 * i * ct);
    const auto points = instantaneity_check(c, distances);
    bool ok = points.size() == distances.size();
    std::ostringstream d;
    d << "latency by d/cT:";
    for (const auto& p : points) {
        ok = ok && p.latency == 1;
        d << ' ' << p.distance / ct << "->" << p.latency;
    }
    return {ok, d.str()};
}

Verdict no_signaling() {
    SimConfig c = load_config(fixture("demo.cfg"));
    const auto r = no_signaling_test(c, {0.0, std::numbers::pi / 4}, 100000);
    const auto broken = run_command(std::string(HRS_CLI) + " no-signaling --config " +
                                    fixture("broken_sampler.cfg") + " --trials 100000");
    const bool ok = r.passed && r.delta <= kSigmas * r.sigma && broken.exit_code == 3;
    return {ok, fmt("|dP| = %.5f, 3 sigma = %.5f; broken sampler exit %d", r.delta, kSigmas * r.sigma,
                    broken.exit_code)};
}

Verdict concentration() {
    const auto start = std::chrono::steady_clock::now();
    RandomStream s = rng_stream(99, 8);
    const std::vector<std::size_t> dims = {50, 100, 200, 400};
    const auto r = concentration_scan(mean_coordinate, dims, kConcentrationEpsilon, kConcentrationSamples, s);
    bool within = true;
    std::ostringstream d;
    d << "P:";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const double p = r.deviation_probs[i];
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(kConcentrationSamples));
        within = within && p <= hoeffding_bound(dims[i], kConcentrationEpsilon) + kSigmas * sigma;
        d << ' ' << dims[i] << "->" << p;
    }
    const double secs = seconds_since(start);
    d << fmt(", slope %.4g, R2 %.4f, %.1f s", r.fitted_slope, r.fit_r2, secs);
    return {r.fitted_slope < 0.0 && r.fit_r2 >= kConcentrationR2 && within && secs < kMinuteBudget, d.str()};
}

Verdict algebra() {
    const auto start = std::chrono::steady_clock::now();
    const auto r = check_commutators(129, 0.1);
    const double secs = seconds_since(start);
    const bool ok = r.position_position <= kCommutatorTol && r.momentum_momentum <= kCommutatorTol &&
                    r.convergence_order >= kMinOrder && secs < kAlgebraBudget;
    return {ok, fmt("[u,u] %.3g, [p,p] %.3g, order %.4f, %.2f s", r.position_position, r.momentum_momentum,
                    r.convergence_order, secs)};
}

Verdict determinism() {
    const auto start = std::chrono::steady_clock::now();
    const std::string demo = fixture("demo.cfg"), scan = fixture("scan.cfg");
    const std::vector<std::string> commands = {
        "simulate --config " + demo,
        "simulate --config " + demo + " --format csv",
        "epr --config " + demo + " --trials 20000 --settings 0,0.3",
        "chsh --config " + demo + " --trials 20000",
        "chsh --config " + demo + " --trials 20000 --format csv",
        "scan-distance --config " + scan + " --in-ct",
        "instantaneity --config " + scan + " --in-ct",
        "no-signaling --config " + demo + " --trials 20000",
        "bell-compare --config " + demo + " --trials 5000",
        "concentration --config " + demo + " --samples 20000 --collapse",
        "algebra-check",
    };
    const auto dir = std::filesystem::temp_directory_path();
    const std::string first = (dir / "hrs_accept_a.out").string(), second = (dir / "hrs_accept_b.out").string();
    const std::array<const char*, 3> threads = {"1", "1", "3"};
    int identical = 0;
    std::string failed;
    for (const auto& cmd : commands) {
        std::string reference;
        bool same = true;
        for (std::size_t k = 0; k < threads.size(); ++k) {
            const std::string path = k == 0 ? first : second;
            const auto r = run_command(std::string("HRS_THREADS=") + threads[k] + " " + HRS_CLI + " " + cmd +
                                       " --out " + path);
            const std::string out = read_file(path);
            if (r.exit_code != 0 || out.empty()) same = false;
            if (k == 0) reference = out;
            else same = same && out == reference;
        }
        if (same) ++identical;
        else failed += " [" + cmd.substr(0, cmd.find(' ')) + "]";
    }
    std::filesystem::remove(first);
    std::filesystem::remove(second);
    const double secs = seconds_since(start);
    return {identical == static_cast<int>(commands.size()) && secs < kMinuteBudget,
            fmt("%d/%zu invocations byte-identical across 3 runs (HRS_THREADS 1,1,3), %.1f s%s", identical,
                commands.size(), secs, failed.c_str())};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"semi-period law", semi_period_law},
        {"equilibrium at T", equilibrium},
        {"Bell-state emergence", bell_emergence},
        {"CHSH violation and local control", chsh_violation},
        {"correlation range", correlation_range},
        {"instantaneity", instantaneity},
        {"no-signaling", no_signaling},
        {"concentration of measure", concentration},
        {"commutator algebra", algebra},
        {"CLI determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const Error& e) {
            v = {false, std::string("error: ") + e.what()};
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failures;
        std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
