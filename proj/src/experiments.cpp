#include "hrs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hrs/error.hpp"
#include "hrs/parallel.hpp"

namespace hrs {

namespace {

constexpr std::uint64_t kInitPurpose = 0xA;
constexpr std::uint64_t kOutcomePurpose = 0xB;

// Row s of the rotated basis: s = 0 -> |+t>, s = 1 -> |-t>.
std::array<double, 2> basis_row(int s, double t) {
    return s == 0 ? std::array<double, 2>{std::cos(t), std::sin(t)} : std::array<double, 2>{-std::sin(t), std::cos(t)};
}

int outcome_index(int first, int second) { return (first > 0 ? 0 : 2) + (second > 0 ? 0 : 1); }

}  // namespace

std::array<double, 4> outcome_probabilities(const EmergentState& state, double setting_1, double setting_2) {
    std::array<double, 4> p{};
    for (int s1 = 0; s1 < 2; ++s1) {
        const auto u = basis_row(s1, setting_1);
        for (int s2 = 0; s2 < 2; ++s2) {
            const auto w = basis_row(s2, setting_2);
            Complex amp = 0.0;
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) amp += u[i] * w[j] * state.amps[i][j];
            }
            p[static_cast<std::size_t>(2 * s1 + s2)] = std::norm(amp);
        }
    }
    return p;
}

Outcome sample_outcome(const EmergentState& state, double setting_1, double setting_2, SamplerKind sampler,
                       RandomStream& stream) {
    const auto p = outcome_probabilities(state, setting_1, setting_2);
    const double total = p[0] + p[1] + p[2] + p[3];
    const double r = stream.uniform() * total;
    if (sampler == SamplerKind::BrokenCopy) {
        const double second_plus = p[0] + p[2];
        const int second = r < second_plus ? 1 : -1;
        return {second, second};
    }
    double acc = 0.0;
    int k = 0;
    for (; k < 3; ++k) {
        acc += p[static_cast<std::size_t>(k)];
        if (r < acc) break;
    }
    return {k < 2 ? 1 : -1, (k % 2 == 0) ? 1 : -1};
}

Ensemble run_thermalized(const SimConfig& config, std::uint64_t salt, std::int64_t cycles,
                         const std::function<void(const Ensemble&)>& observe) {
    RandomStream init = rng_stream(config.seed, derive_stream_id(salt, 0, kInitPurpose));
    Ensemble e = make_ensemble(config, init);
    CycleHooks hooks;
    hooks.observe = observe;
    if (config.thermalization) {
        hooks.ergodic = [&config](Ensemble& ens, RandomStream& stream) {
            ens = thermalize_pairs(std::move(ens), config, stream);
        };
    }
    for (std::int64_t c = 0; c < cycles; ++c) e = run_cycle(std::move(e), config, hooks, salt);
    return e;
}

double CorrelationRecord::first_plus_fraction() const {
    if (trials == 0) return 0.0;
    return static_cast<double>(counts[0][0] + counts[0][1]) / static_cast<double>(trials);
}

CorrelationRecord run_epr(const SimConfig& config, double setting_1, double setting_2, std::uint64_t salt) {
    const auto trials = static_cast<std::size_t>(config.trials);
    std::vector<std::uint8_t> outcomes(trials);
    parallel_for(trials, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::uint64_t trial_salt = derive_stream_id(salt, i);
            Ensemble e = run_thermalized(config, trial_salt, 1);
            e.settings = {setting_1, setting_2};
            const EmergentState state = average_velocities(e);
            RandomStream s = rng_stream(config.seed, derive_stream_id(trial_salt, 0, kOutcomePurpose));
            const Outcome o = sample_outcome(state, setting_1, setting_2, config.sampler, s);
            outcomes[i] = static_cast<std::uint8_t>(outcome_index(o.first, o.second));
        }
    });

    CorrelationRecord rec;
    rec.setting_1 = setting_1;
    rec.setting_2 = setting_2;
    rec.trials = trials;
    for (auto k : outcomes) rec.counts[k / 2][k % 2] += 1;
    const double n = static_cast<double>(trials);
    rec.e_value = (static_cast<double>(rec.counts[0][0] + rec.counts[1][1]) -
                   static_cast<double>(rec.counts[0][1] + rec.counts[1][0])) / n;
    rec.sigma = std::sqrt(std::max(0.0, 1.0 - rec.e_value * rec.e_value) / n);
    return rec;
}

double chsh_value(const std::array<double, 4>& e) { return std::abs(e[0] - e[1] + e[2] + e[3]); }

ChshResult chsh(const SimConfig& config, const std::array<double, 4>& angles, std::uint64_t salt) {
    ChshResult r;
    r.angles = angles;
    const std::array<std::pair<double, double>, 4> pairs{{{angles[0], angles[2]},
                                                          {angles[0], angles[3]},
                                                          {angles[1], angles[2]},
                                                          {angles[1], angles[3]}}};
    std::array<double, 4> e{};
    double var = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        r.records[i] = run_epr(config, pairs[i].first, pairs[i].second, derive_stream_id(salt, 0xC5, i));
        e[i] = r.records[i].e_value;
        var += r.records[i].sigma * r.records[i].sigma;
    }
    r.s_value = chsh_value(e);
    r.sigma = std::sqrt(var);
    return r;
}

SimConfig place_detectors(const SimConfig& config, double distance) {
    const double half = 0.5 * distance;
    if (half > config.spatial_extent) {
        throw Error(ErrorKind::DistanceExceedsBox, "distance " + std::to_string(distance) +
                                                       " exceeds the box of half-width " +
                                                       std::to_string(config.spatial_extent));
    }
    SimConfig c = config;
    c.detector_1_pos = {-half, 0.0, 0.0};
    c.detector_2_pos = {half, 0.0, 0.0};
    return c;
}

RangeScan scan_distance(const SimConfig& config, const std::vector<double>& distances, std::uint64_t salt) {
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (!(distances[i] >= 0.0)) throw Error(ErrorKind::InvalidValue, "distances must be nonnegative");
        if (i > 0 && distances[i] < distances[i - 1]) throw Error(ErrorKind::InvalidValue, "distances must be sorted");
    }
    std::vector<SimConfig> configs;
    for (double d : distances) configs.push_back(place_detectors(config, d));

    RangeScan scan;
    scan.distances = distances;
    scan.d_cor_bound = static_cast<double>(system_semi_period(config)) * config.lattice_spacing;
    const std::size_t n = distances.size();
    scan.concurrences.resize(n);
    scan.satisfied_fractions.resize(n);
    scan.bell_fidelities.resize(n);
    scan.product_fidelities.resize(n);
    scan.classes.resize(n);
    const EmergentState bell = bell_state(configured_bell_state(config.bell_phase));
    const EmergentState limit = product_limit_state(config.bell_phase);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Ensemble e = run_thermalized(configs[i], salt, std::max<std::int64_t>(1, config.tau_ticks));
            const EmergentState state = average_velocities(e);
            scan.concurrences[i] = concurrence(state);
            scan.satisfied_fractions[i] = satisfied_fraction(e);
            scan.bell_fidelities[i] = fidelity(bell, state);
            scan.product_fidelities[i] = fidelity(limit, state);
            scan.classes[i] = class_name(classify(state, 0.05));
        }
    });
    return scan;
}

std::vector<InstantaneityPoint> instantaneity_check(const SimConfig& config, const std::vector<double>& distances,
                                                    std::uint64_t salt) {
    const double reach = static_cast<double>(system_semi_period(config)) * config.lattice_spacing;
    for (double d : distances) {
        if (!(d >= 0.0) || !(d < 0.5 * reach)) {
            throw Error(ErrorKind::PreconditionViolated,
                        "instantaneity distances must lie in [0, 0.5 cT); got " + std::to_string(d));
        }
    }
    std::vector<SimConfig> configs;
    for (double d : distances) configs.push_back(place_detectors(config, d));

    std::vector<InstantaneityPoint> out(distances.size());
    const std::int64_t cycles = std::max<std::int64_t>(1, config.tau_ticks);
    parallel_for(distances.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            TwoTimeHistory history;
            const auto observe = [&history](const Ensemble& e) {
                history.record(e.t_step, e.tau_tick, satisfied_fraction(e));
            };
            // Terminal value of each cycle is recorded past the last t-step.
            const std::int64_t length = make_schedule(configs[i]).cycle_length();
            RandomStream init = rng_stream(configs[i].seed, derive_stream_id(salt, 0, kInitPurpose));
            Ensemble e = make_ensemble(configs[i], init);
            CycleHooks hooks;
            hooks.observe = observe;
            if (configs[i].thermalization) {
                hooks.ergodic = [&cfg = configs[i]](Ensemble& ens, RandomStream& stream) {
                    ens = thermalize_pairs(std::move(ens), cfg, stream);
                };
            }
            for (std::int64_t c = 0; c < cycles; ++c) {
                e = run_cycle(std::move(e), configs[i], hooks, salt);
                history.record(length, e.tau_tick - 1, satisfied_fraction(e));
            }
            InstantaneityPoint p;
            p.distance = distances[i];
            for (const auto& tp : project_two_time(history)) {
                p.tau_fractions.push_back(tp.value);
                if (p.latency < 0 && tp.value >= kInstantaneityThreshold) p.latency = tp.tau_tick + 1;
            }
            out[i] = std::move(p);
        }
    });
    return out;
}

NoSignalingReport no_signaling_test(const SimConfig& config, const std::array<double, 2>& settings_2,
                                    std::uint64_t trials, double setting_1, std::uint64_t salt) {
    if (trials < 10000) {
        throw Error(ErrorKind::PreconditionViolated, "no-signaling test needs trials >= 10000");
    }
    SimConfig c = config;
    c.trials = static_cast<std::int64_t>(trials);
    NoSignalingReport r;
    r.setting_1 = setting_1;
    r.settings_2 = settings_2;
    r.trials = trials;
    double var = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
        const CorrelationRecord rec = run_epr(c, setting_1, settings_2[k], derive_stream_id(salt, 0x5E, k));
        const double p = rec.first_plus_fraction();
        r.first_plus[k] = p;
        var += p * (1.0 - p) / static_cast<double>(trials);
    }
    r.delta = std::abs(r.first_plus[0] - r.first_plus[1]);
    r.sigma = std::sqrt(var);
    r.passed = r.delta <= 3.0 * r.sigma;
    return r;
}

FactorizedFit fit_factorized(const std::array<double, 4>& targets, int lambda_grid) {
    if (lambda_grid < 1) throw Error(ErrorKind::InvalidValue, "lambda_grid must be positive");
    const auto g_count = static_cast<std::size_t>(lambda_grid);
    // Strategy bits: A(a), A(a'), B(b), B(b'); bit set means -1.
    const auto value = [](int strategy, int bit) { return (strategy >> bit) & 1 ? -1 : 1; };
    // Products for (a,b), (a,b'), (a',b), (a',b').
    const auto products = [&](int s) {
        return std::array<int, 4>{value(s, 0) * value(s, 2), value(s, 0) * value(s, 3), value(s, 1) * value(s, 2),
                                  value(s, 1) * value(s, 3)};
    };
    std::vector<int> strategy(g_count);
    for (std::size_t g = 0; g < g_count; ++g) strategy[g] = (g % 2 == 0) ? 0 : 0b1100;
    std::array<long long, 4> sums{};
    for (std::size_t g = 0; g < g_count; ++g) {
        const auto p = products(strategy[g]);
        for (int k = 0; k < 4; ++k) sums[k] += p[k];
    }
    const double inv = 1.0 / static_cast<double>(g_count);
    const auto cost = [&](const std::array<long long, 4>& s) {
        double c = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double d = static_cast<double>(s[k]) * inv - targets[k];
            c += d * d;
        }
        return c;
    };

    double current = cost(sums);
    for (int pass = 0; pass < 1000; ++pass) {
        bool improved = false;
        for (std::size_t g = 0; g < g_count; ++g) {
            const auto old = products(strategy[g]);
            std::array<long long, 4> base = sums;
            for (int k = 0; k < 4; ++k) base[k] -= old[k];
            int best = strategy[g];
            double best_cost = current;
            for (int s = 0; s < 16; ++s) {
                const auto p = products(s);
                std::array<long long, 4> trial = base;
                for (int k = 0; k < 4; ++k) trial[k] += p[k];
                const double c = cost(trial);
                if (c < best_cost - 1e-15) {
                    best_cost = c;
                    best = s;
                }
            }
            if (best != strategy[g]) {
                const auto p = products(best);
                for (int k = 0; k < 4; ++k) sums[k] = base[k] + p[k];
                strategy[g] = best;
                current = best_cost;
                improved = true;
            }
        }
        if (!improved) break;
    }

    FactorizedFit fit;
    fit.sum_squares = current;
    for (int k = 0; k < 4; ++k) {
        fit.fitted[k] = static_cast<double>(sums[k]) * inv;
        fit.residuals[k] = std::abs(fit.fitted[k] - targets[k]);
        fit.max_residual = std::max(fit.max_residual, fit.residuals[k]);
    }
    return fit;
}

BellCompareReport bell_factorization_compare(const SimConfig& config, const std::array<double, 4>& angles,
                                             int lambda_grid, std::uint64_t salt) {
    if (lambda_grid < 100) throw Error(ErrorKind::PreconditionViolated, "lambda_grid must be >= 100");
    BellCompareReport r;
    r.lambda_grid = lambda_grid;
    r.simulated = chsh(config, angles, salt);
    std::array<double, 4> e{};
    for (std::size_t i = 0; i < 4; ++i) e[i] = r.simulated.records[i].e_value;
    r.fit = fit_factorized(e, lambda_grid);
    r.lower_bound = std::max(0.0, (r.simulated.s_value - 2.0) / 4.0);
    r.contract_holds = r.simulated.s_value <= 2.0 || r.fit.max_residual >= r.lower_bound - 1e-12;
    return r;
}

}  // namespace hrs
