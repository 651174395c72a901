#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hrs/config.hpp"
#include "hrs/model.hpp"
#include "hrs/rng.hpp"

namespace hrs {

// One fundamental cycle lasts 2T steps: ergodic [0, t_e), contractive
// [t_e, T), expansive [T, 2T). kappa peaks (= 1) at t = T.
struct CycleSchedule {
    std::int64_t semi_period = 2;
    std::int64_t ergodic_end = 1;
    double contraction_rate = 0.05;
    double lattice_spacing = 1.0;

    std::int64_t cycle_length() const { return 2 * semi_period; }
    Phase phase_at(std::int64_t t_step) const;
};

// Semi-period law T = T_min * exp(mu), mu = T_min M c^2 / hbar.
double semi_period_real(double mu, std::int64_t t_min_steps);
// Rounded to whole t-steps; throws Error{Overflow} past int64 range.
std::int64_t semi_period(double mu, std::int64_t t_min_steps);

// Composite systems use the largest of the individual semi-periods.
std::int64_t system_semi_period(const SimConfig& config);

// Throws Error{InvalidValue} if T < 2 (no room for both windows).
CycleSchedule make_schedule(std::int64_t semi_period, double ergodic_fraction,
                            double contraction_rate, double lattice_spacing = 1.0);
CycleSchedule make_schedule(const SimConfig& config);

// Smoothstep 3s^2 - 2s^3 on s = (t - t_e)/(T - t_e), mirrored about T.
// Throws Error{OutOfRange} outside [0, 2T).
double kappa(std::int64_t t_step, const CycleSchedule& schedule);

// u, p: phase-space point and momentum covector, 8 components per molecule.
using BetaField = std::function<void(std::span<const double> u, std::span<double> beta)>;

// H = (1 - kappa(t)) * sum_k beta^k(u) p_k. Throws Error{DimensionMismatch}.
double hamiltonian_value(std::span<const double> u, std::span<const double> p,
                         std::int64_t t_step, const CycleSchedule& schedule,
                         const BetaField& beta);

// Beta field used by the simulator: on-shell x' = y for the position block
// and the Randers drift for the velocity block.
BetaField drift_beta_field(const Vec3& drift);
std::array<double, 8> phase_space_point(const Molecule& m);
std::array<double, 8> canonical_momentum(const Molecule& m);

// Ergodic step: velocity redrawn from the drift-biased cone with
// probability resample_prob, then one ballistic step, reflected at the walls.
Ensemble step_ergodic(Ensemble ensemble, RandomStream& stream, const SimConfig& config);

// Moves every molecule toward its particle's barycenter by `factor` of the
// separation, at most one lattice spacing. 1-Lipschitz for factor in [0, 1].
Ensemble contract_toward_barycenter(Ensemble ensemble, double factor, double lattice_spacing);
Ensemble step_contractive(Ensemble ensemble, const CycleSchedule& schedule);

// Ergodic-like step plus an outward push kappa(t) * gamma * (x - barycenter).
Ensemble step_expansive(Ensemble ensemble, RandomStream& stream, const CycleSchedule& schedule,
                        const SimConfig& config);

struct CycleHooks {
    // Called at every ergodic t-step before the molecules move.
    std::function<void(Ensemble&, RandomStream&)> ergodic;
    // Called at every t-step, before the step is applied.
    std::function<void(const Ensemble&)> observe;
};

// Advances one full cycle (2T steps) and increments tau_tick.
// Throws Error{PreconditionViolated} unless t_step == 0.
Ensemble run_cycle(Ensemble ensemble, const SimConfig& config, const CycleHooks& hooks,
                   std::uint64_t stream_salt = 0);

struct TwoTimeSample {
    std::int64_t t_step = 0;
    std::int64_t tau_tick = 0;
    double value = 0.0;
};

// Samples ordered lexicographically by (tau_tick, t_step).
struct TwoTimeHistory {
    std::vector<TwoTimeSample> samples;
    void record(std::int64_t t_step, std::int64_t tau_tick, double value);
};

struct TauPoint {
    std::int64_t tau_tick = 0;
    double value = 0.0;
};

// (t, tau) -> tau: keeps the terminal sample of each cycle.
std::vector<TauPoint> project_two_time(const TwoTimeHistory& history);

}  // namespace hrs
