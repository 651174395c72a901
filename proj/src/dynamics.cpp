#include "hrs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hrs/error.hpp"

namespace hrs {

Phase CycleSchedule::phase_at(std::int64_t t_step) const {
    if (t_step < ergodic_end) return Phase::Ergodic;
    if (t_step < semi_period) return Phase::Contractive;
    return Phase::Expansive;
}

double semi_period_real(double mu, std::int64_t t_min_steps) {
    if (mu < 0.0) throw Error(ErrorKind::InvalidValue, "mu must be >= 0");
    if (t_min_steps < 1) throw Error(ErrorKind::InvalidValue, "t_min_steps must be >= 1");
    return static_cast<double>(t_min_steps) * std::exp(mu);
}

std::int64_t semi_period(double mu, std::int64_t t_min_steps) {
    const double t = std::round(semi_period_real(mu, t_min_steps));
    // 2^62 keeps the 2T cycle length representable as well.
    if (!(t < 0x1.0p62)) {
        throw Error(ErrorKind::Overflow, "semi-period exceeds the representable step range");
    }
    return std::max(static_cast<std::int64_t>(t), t_min_steps);
}

std::int64_t system_semi_period(const SimConfig& config) {
    return std::max(semi_period(config.mu_a, config.t_min_steps),
                    semi_period(config.mu_b, config.t_min_steps));
}

CycleSchedule make_schedule(std::int64_t semi_period, double ergodic_fraction,
                            double contraction_rate, double lattice_spacing) {
    if (semi_period < 2) {
        throw Error(ErrorKind::InvalidValue, "semi-period must be >= 2 steps to hold both windows");
    }
    CycleSchedule s;
    s.semi_period = semi_period;
    const auto t_e = static_cast<std::int64_t>(std::llround(ergodic_fraction * static_cast<double>(semi_period)));
    s.ergodic_end = std::clamp<std::int64_t>(t_e, 1, semi_period - 1);
    s.contraction_rate = contraction_rate;
    s.lattice_spacing = lattice_spacing;
    return s;
}

CycleSchedule make_schedule(const SimConfig& config) {
    return make_schedule(system_semi_period(config), config.ergodic_fraction,
                         config.contraction_rate, config.lattice_spacing);
}

double kappa(std::int64_t t_step, const CycleSchedule& schedule) {
    const std::int64_t period = schedule.semi_period;
    if (t_step < 0 || t_step >= 2 * period) {
        throw Error(ErrorKind::OutOfRange, "t_step " + std::to_string(t_step) + " outside the cycle");
    }
    // Expansive half mirrors the contractive half: kappa(T + s) = kappa(T - s).
    const std::int64_t t = t_step > period ? 2 * period - t_step : t_step;
    if (t < schedule.ergodic_end) return 0.0;
    if (t == period) return 1.0;
    const double s = static_cast<double>(t - schedule.ergodic_end) /
                     static_cast<double>(period - schedule.ergodic_end);
    return s * s * (3.0 - 2.0 * s);
}

double hamiltonian_value(std::span<const double> u, std::span<const double> p,
                         std::int64_t t_step, const CycleSchedule& schedule,
                         const BetaField& beta) {
    if (u.size() != p.size() || u.size() % 8 != 0) {
        throw Error(ErrorKind::DimensionMismatch,
                    "u has " + std::to_string(u.size()) + " components, p has " +
                        std::to_string(p.size()) + "; need equal multiples of 8");
    }
    std::vector<double> b(u.size());
    beta(u, b);
    double sum = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) sum += b[k] * p[k];
    return (1.0 - kappa(t_step, schedule)) * sum;
}

BetaField drift_beta_field(const Vec3& drift) {
    return [drift](std::span<const double> u, std::span<double> beta) {
        for (std::size_t base = 0; base + 8 <= u.size(); base += 8) {
            beta[base + 0] = 1.0;
            beta[base + 1] = u[base + 5];
            beta[base + 2] = u[base + 6];
            beta[base + 3] = u[base + 7];
            beta[base + 4] = 0.0;
            beta[base + 5] = drift.x;
            beta[base + 6] = drift.y;
            beta[base + 7] = drift.z;
        }
    };
}

std::array<double, 8> phase_space_point(const Molecule& m) {
    return {m.t_label, m.position.x, m.position.y, m.position.z,
            1.0,       m.velocity.x, m.velocity.y, m.velocity.z};
}

std::array<double, 8> canonical_momentum(const Molecule& m) {
    return {1.0, m.velocity.x, m.velocity.y, m.velocity.z, 0.0, 0.0, 0.0, 0.0};
}

namespace {

// Clamp a displacement to at most one lattice spacing.
Vec3 clamp_step(Vec3 d, double spacing) {
    const double len = norm(d);
    if (len > spacing) d *= spacing / len;
    return d;
}

void apply_displacement(Molecule& m, Vec3 displacement, double spacing, const Domain& domain) {
    displacement = clamp_step(displacement, spacing);
    Vec3 velocity = displacement * (1.0 / spacing);
    m.position += displacement;
    domain.reflect(m.position, velocity);
    const double speed = norm(velocity);
    if (speed > 1.0) velocity *= 1.0 / speed;
    m.velocity = velocity;
    m.t_label += 1.0;
}

}  // namespace

Ensemble step_ergodic(Ensemble ensemble, RandomStream& stream, const SimConfig& config) {
    const Domain domain = allowable_domain(config);
    const double spacing = config.lattice_spacing;
    for (auto& m : ensemble.molecules) {
        if (stream.bernoulli(config.resample_prob)) {
            m.velocity = sample_cone_velocity(config.randers_drift, stream);
        }
        apply_displacement(m, m.velocity * spacing, spacing, domain);
    }
    return ensemble;
}

Ensemble contract_toward_barycenter(Ensemble ensemble, double factor, double lattice_spacing) {
    const Vec3 center_a = barycenter(ensemble, Particle::A);
    const Vec3 center_b = barycenter(ensemble, Particle::B);
    for (auto& m : ensemble.molecules) {
        const Vec3& center = m.particle == Particle::A ? center_a : center_b;
        const Vec3 disp = clamp_step((center - m.position) * factor, lattice_spacing);
        m.position += disp;
        m.velocity = disp * (1.0 / lattice_spacing);
        const double speed = norm(m.velocity);
        if (speed > 1.0) m.velocity *= 1.0 / speed;
        m.t_label += 1.0;
    }
    return ensemble;
}

Ensemble step_contractive(Ensemble ensemble, const CycleSchedule& schedule) {
    if (ensemble.phase != Phase::Contractive) {
        throw Error(ErrorKind::PreconditionViolated, "step_contractive requires the contractive phase");
    }
    const double factor = kappa(ensemble.t_step, schedule) * schedule.contraction_rate;
    return contract_toward_barycenter(std::move(ensemble), factor, schedule.lattice_spacing);
}

Ensemble step_expansive(Ensemble ensemble, RandomStream& stream, const CycleSchedule& schedule,
                        const SimConfig& config) {
    if (ensemble.phase != Phase::Expansive) {
        throw Error(ErrorKind::PreconditionViolated, "step_expansive requires the expansive phase");
    }
    const Domain domain = allowable_domain(config);
    const double spacing = schedule.lattice_spacing;
    const double push = kappa(ensemble.t_step, schedule) * schedule.contraction_rate;
    const Vec3 center_a = barycenter(ensemble, Particle::A);
    const Vec3 center_b = barycenter(ensemble, Particle::B);
    for (auto& m : ensemble.molecules) {
        if (stream.bernoulli(config.resample_prob)) {
            m.velocity = sample_cone_velocity(config.randers_drift, stream);
        }
        const Vec3& center = m.particle == Particle::A ? center_a : center_b;
        apply_displacement(m, m.velocity * spacing + (m.position - center) * push, spacing, domain);
    }
    return ensemble;
}

Ensemble run_cycle(Ensemble ensemble, const SimConfig& config, const CycleHooks& hooks,
                   std::uint64_t stream_salt) {
    if (ensemble.t_step != 0) {
        throw Error(ErrorKind::PreconditionViolated, "run_cycle must start at t_step = 0");
    }
    const CycleSchedule schedule = make_schedule(config);
    const auto tau = static_cast<std::uint64_t>(ensemble.tau_tick);
    RandomStream motion = rng_stream(config.seed, derive_stream_id(stream_salt, tau, 1));
    RandomStream thermal = rng_stream(config.seed, derive_stream_id(stream_salt, tau, 2));

    for (std::int64_t t = 0; t < schedule.cycle_length(); ++t) {
        ensemble.t_step = t;
        ensemble.phase = schedule.phase_at(t);
        if (hooks.observe) hooks.observe(ensemble);
        switch (ensemble.phase) {
            case Phase::Ergodic:
                if (hooks.ergodic) hooks.ergodic(ensemble, thermal);
                ensemble = step_ergodic(std::move(ensemble), motion, config);
                break;
            case Phase::Contractive:
                ensemble = step_contractive(std::move(ensemble), schedule);
                break;
            case Phase::Expansive:
                ensemble = step_expansive(std::move(ensemble), motion, schedule, config);
                break;
        }
    }
    ensemble.t_step = 0;
    ensemble.phase = Phase::Ergodic;
    ensemble.tau_tick += 1;
    return ensemble;
}

void TwoTimeHistory::record(std::int64_t t_step, std::int64_t tau_tick, double value) {
    samples.push_back({t_step, tau_tick, value});
}

std::vector<TauPoint> project_two_time(const TwoTimeHistory& history) {
    auto samples = history.samples;
    std::stable_sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) {
        return a.tau_tick != b.tau_tick ? a.tau_tick < b.tau_tick : a.t_step < b.t_step;
    });
    std::vector<TauPoint> out;
    for (const auto& s : samples) {
        if (out.empty() || out.back().tau_tick != s.tau_tick) {
            out.push_back({s.tau_tick, s.value});
        } else {
            out.back().value = s.value;
        }
    }
    return out;
}

}  // namespace hrs
