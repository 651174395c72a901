#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hrs/config.hpp"
#include "hrs/dynamics.hpp"
#include "hrs/emergence.hpp"
#include "hrs/model.hpp"
#include "hrs/rng.hpp"

namespace hrs {

// Joint outcome probabilities after rotating each channel basis by its
// detector angle, ordered (++, +-, -+, --). |+t> = cos t|1> + sin t|2>.
std::array<double, 4> outcome_probabilities(const EmergentState& state, double setting_1, double setting_2);

struct Outcome {
    int first = 1;   // observer 1, +1 or -1
    int second = 1;  // observer 2
};

// Born sampling from one uniform draw; BrokenCopy draws observer 2 from its
// marginal and copies it to observer 1 (a deliberately signalling control).
Outcome sample_outcome(const EmergentState& state, double setting_1, double setting_2, SamplerKind sampler,
                       RandomStream& stream);

// Predecessor ensemble run for `cycles` cycles with coincidence thermalization
// (if enabled in the config). observe sees every t-step of every cycle.
Ensemble run_thermalized(const SimConfig& config, std::uint64_t salt, std::int64_t cycles,
                         const std::function<void(const Ensemble&)>& observe = {});

struct CorrelationRecord {
    double setting_1 = 0.0;
    double setting_2 = 0.0;
    // counts[i][j]: i = 0 for +1 at observer 1, 1 for -1; same for j.
    std::array<std::array<std::uint64_t, 2>, 2> counts{};
    double e_value = 0.0;
    double sigma = 0.0;  // sqrt((1 - E^2) / trials)
    std::uint64_t trials = 0;

    double first_plus_fraction() const;
};

// config.trials independent trials, one cycle each. Deterministic for a
// fixed (seed, salt) regardless of HRS_THREADS.
CorrelationRecord run_epr(const SimConfig& config, double setting_1, double setting_2, std::uint64_t salt = 0);

struct ChshResult {
    std::array<double, 4> angles{};  // a, a', b, b'
    std::array<CorrelationRecord, 4> records;  // (a,b), (a,b'), (a',b), (a',b')
    double s_value = 0.0;
    double sigma = 0.0;
};

// S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')|.
double chsh_value(const std::array<double, 4>& e);
ChshResult chsh(const SimConfig& config, const std::array<double, 4>& angles, std::uint64_t salt = 0);

struct RangeScan {
    std::vector<double> distances;
    std::vector<double> concurrences;
    std::vector<double> satisfied_fractions;
    std::vector<double> bell_fidelities;     // against the configured Bell state
    std::vector<double> product_fidelities;  // against the limit product state
    std::vector<std::string> classes;
    double d_cor_bound = 0.0;  // semi-period x lattice spacing
};

// Config with detectors at (-d/2, 0, 0) and (d/2, 0, 0).
// Throws Error{DistanceExceedsBox} if they fall outside the box.
SimConfig place_detectors(const SimConfig& config, double distance);

// Runs config.tau_ticks cycles per distance with common random numbers.
// Throws Error{InvalidValue} unless distances are nonnegative and sorted.
RangeScan scan_distance(const SimConfig& config, const std::vector<double>& distances, std::uint64_t salt = 0);

struct InstantaneityPoint {
    double distance = 0.0;
    // tau ticks until the projected satisfied fraction reaches the threshold; -1 if never.
    std::int64_t latency = -1;
    std::vector<double> tau_fractions;
};

inline constexpr double kInstantaneityThreshold = 0.99;

// Throws Error{PreconditionViolated} unless every distance < 0.5 cT.
std::vector<InstantaneityPoint> instantaneity_check(const SimConfig& config, const std::vector<double>& distances,
                                                    std::uint64_t salt = 0);

struct NoSignalingReport {
    double setting_1 = 0.0;
    std::array<double, 2> settings_2{};
    std::array<double, 2> first_plus{};  // P(+ at observer 1 | remote setting)
    double delta = 0.0;                  // |difference|
    double sigma = 0.0;
    std::uint64_t trials = 0;
    bool passed = false;  // delta <= 3 sigma
};

// Throws Error{PreconditionViolated} if trials < 10^4.
NoSignalingReport no_signaling_test(const SimConfig& config, const std::array<double, 2>& settings_2,
                                    std::uint64_t trials, double setting_1 = 0.0, std::uint64_t salt = 0);

struct FactorizedFit {
    std::array<double, 4> fitted{};
    std::array<double, 4> residuals{};  // |fitted - target|
    double max_residual = 0.0;
    double sum_squares = 0.0;
};

// Best factorized model E(x, y) = (1/G) sum_g A(x, g) B(y, g), A, B in {+1, -1},
// uniform weights over the grid, found by local search over the 16
// deterministic strategies per grid point. Start: A = +1, B alternating.
FactorizedFit fit_factorized(const std::array<double, 4>& targets, int lambda_grid);

struct BellCompareReport {
    ChshResult simulated;
    FactorizedFit fit;
    int lambda_grid = 0;
    double lower_bound = 0.0;  // max(0, (S - 2) / 4): minimum max residual of any factorized model
    bool contract_holds = true;
};

// Throws Error{PreconditionViolated} if lambda_grid < 100.
BellCompareReport bell_factorization_compare(const SimConfig& config, const std::array<double, 4>& angles,
                                             int lambda_grid, std::uint64_t salt = 0);

}  // namespace hrs
