#include "hrs/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hrs/error.hpp"

namespace hrs {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSpeedSlack = 1e-12;
}  // namespace

void check_molecule(const Molecule& m) {
    const auto& c = m.channels;
    if (c.n1 < 0.0 || c.n2 < 0.0) {
        throw Error(ErrorKind::InvalidValue, "molecule " + std::to_string(m.index) + ": negative channel weight");
    }
    if ((c.n1 != 0.0) == (c.n2 != 0.0)) {
        throw Error(ErrorKind::InvalidValue,
                    "molecule " + std::to_string(m.index) + ": exactly one channel weight must be nonzero");
    }
    if (c.phi1 < 0.0 || c.phi1 >= kTwoPi || c.phi2 < 0.0 || c.phi2 >= kTwoPi) {
        throw Error(ErrorKind::InvalidValue, "molecule " + std::to_string(m.index) + ": phase outside [0, 2pi)");
    }
    if (norm(m.velocity) > 1.0 + kSpeedSlack) {
        throw Error(ErrorKind::InvalidValue, "molecule " + std::to_string(m.index) + ": speed exceeds 1");
    }
}

Molecule make_molecule(int index, Particle particle, const Vec3& position, const Vec3& velocity,
                       const ChannelAmplitudes& channels, double t_label) {
    Molecule m{index, particle, t_label, position, velocity, channels};
    check_molecule(m);
    return m;
}

bool Domain::contains(const Vec3& p) const {
    for (int i = 0; i < 3; ++i) {
        if (p[i] < lo[i] || p[i] > hi[i]) return false;
    }
    return true;
}

void Domain::reflect(Vec3& p, Vec3& v) const {
    for (int i = 0; i < 3; ++i) {
        const double width = hi[i] - lo[i];
        if (width <= 0.0) {
            p[i] = lo[i];
            continue;
        }
        // A single step never exceeds one wall width in practice, but loop to be exact.
        while (p[i] < lo[i] || p[i] > hi[i]) {
            if (p[i] < lo[i]) p[i] = 2.0 * lo[i] - p[i];
            if (p[i] > hi[i]) p[i] = 2.0 * hi[i] - p[i];
            v[i] = -v[i];
        }
    }
}

Domain allowable_domain(const SimConfig& config) {
    const double margin = config.effective_domain_margin();
    const double half = config.spatial_extent;
    Domain d;
    for (int i = 0; i < 3; ++i) {
        const double a = config.detector_1_pos[i];
        const double b = config.detector_2_pos[i];
        d.lo[i] = std::max(-half, std::min(a, b) - margin);
        d.hi[i] = std::min(half, std::max(a, b) + margin);
    }
    return d;
}

std::size_t Ensemble::count(Particle p) const {
    return static_cast<std::size_t>(std::count_if(
        molecules.begin(), molecules.end(), [p](const Molecule& m) { return m.particle == p; }));
}

void Ensemble::sync_partition() {
    partition.assignment.resize(molecules.size());
    for (std::size_t i = 0; i < molecules.size(); ++i) {
        partition.assignment[i] = molecules[i].channel();
    }
}

ChannelAmplitudes channel_amplitudes(Particle particle, Channel channel, double bell_phase) {
    double phase = 0.0;
    if (particle == Particle::A && channel == Channel::Two) {
        phase = std::fmod(bell_phase, kTwoPi);
        if (phase < 0.0) phase += kTwoPi;
    }
    if (channel == Channel::One) return {1.0, 0.0, phase, 0.0};
    return {0.0, 1.0, 0.0, phase};
}

Vec3 sample_cone_velocity(const Vec3& drift, RandomStream& stream) {
    const double slack = 1.0 - norm(drift);
    Vec3 v = drift + stream.unit_ball() * slack;
    const double speed = norm(v);
    if (speed > 1.0) v *= 1.0 / speed;
    return v;
}

namespace {

Ensemble make_with_positions(const SimConfig& config, RandomStream& stream, bool spread) {
    const Domain domain = allowable_domain(config);
    Ensemble e;
    const auto total = static_cast<int>(config.n_a + config.n_b);
    e.molecules.reserve(static_cast<std::size_t>(total));
    for (int k = 0; k < total; ++k) {
        const Particle particle = k < config.n_a ? Particle::A : Particle::B;
        const int local = particle == Particle::A ? k : k - static_cast<int>(config.n_a);
        const Channel channel = local % 2 == 0 ? Channel::One : Channel::Two;
        Vec3 position = particle == Particle::A ? config.detector_1_pos : config.detector_2_pos;
        if (spread) {
            for (int i = 0; i < 3; ++i) position[i] = stream.uniform(domain.lo[i], domain.hi[i]);
        }
        const Vec3 velocity = sample_cone_velocity(config.randers_drift, stream);
        e.molecules.push_back(
            Molecule{k, particle, 0.0, position, velocity,
                     channel_amplitudes(particle, channel, config.bell_phase)});
    }
    e.partner.assign(e.molecules.size(), -1);
    e.sync_partition();
    return e;
}

}  // namespace

Ensemble make_ensemble(const SimConfig& config, RandomStream& stream) {
    return make_with_positions(config, stream, false);
}

Ensemble make_spread_ensemble(const SimConfig& config, RandomStream& stream) {
    return make_with_positions(config, stream, true);
}

Vec3 barycenter(const Ensemble& ensemble, Particle particle) {
    Vec3 sum{};
    std::size_t n = 0;
    for (const auto& m : ensemble.molecules) {
        if (m.particle != particle) continue;
        sum += m.position;
        ++n;
    }
    return n == 0 ? sum : sum * (1.0 / static_cast<double>(n));
}

double ensemble_spread(const Ensemble& ensemble) {
    double total = 0.0;
    int particles = 0;
    for (Particle p : {Particle::A, Particle::B}) {
        const Vec3 center = barycenter(ensemble, p);
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& m : ensemble.molecules) {
            if (m.particle != p) continue;
            sum += distance(m.position, center);
            ++n;
        }
        if (n > 0) {
            total += sum / static_cast<double>(n);
            ++particles;
        }
    }
    return particles == 0 ? 0.0 : total / particles;
}

}  // namespace hrs
