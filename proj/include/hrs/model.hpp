#pragma once

#include <cstdint>
#include <vector>

#include "hrs/config.hpp"
#include "hrs/rng.hpp"
#include "hrs/vec3.hpp"

namespace hrs {

enum class Particle : std::uint8_t { A, B };
enum class Phase : std::uint8_t { Ergodic, Contractive, Expansive };

// Detector label / channel index. Channel 1 is identified with |0> and
// channel 2 with |1> of the spin basis at each detector.
enum class Channel : std::uint8_t { One = 1, Two = 2 };

inline Channel complement(Channel c) { return c == Channel::One ? Channel::Two : Channel::One; }

struct ChannelAmplitudes {
    double n1 = 0.0;
    double n2 = 0.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
};

// One sub-quantum degree of freedom u = (x, y).
struct Molecule {
    int index = 0;
    Particle particle = Particle::A;
    double t_label = 0.0;
    Vec3 position{};
    Vec3 velocity{};
    ChannelAmplitudes channels{1.0, 0.0, 0.0, 0.0};

    // Exactly one channel weight nonzero.
    Channel channel() const { return channels.n1 != 0.0 ? Channel::One : Channel::Two; }
};

// Checked constructor: rejects non-classical weights, negative weights,
// phases outside [0, 2pi) and super-luminal velocities.
Molecule make_molecule(int index, Particle particle, const Vec3& position,
                       const Vec3& velocity, const ChannelAmplitudes& channels,
                       double t_label = 0.0);

// Throws Error{InvalidValue} if the molecule violates classicality or the speed bound.
void check_molecule(const Molecule& m);

// Molecule index -> detector label, total over the ensemble.
struct PartitionMap {
    std::vector<Channel> assignment;

    Channel label(int index) const { return assignment.at(static_cast<std::size_t>(index)); }
    friend bool operator==(const PartitionMap&, const PartitionMap&) = default;
};

struct DetectorSettings {
    double setting_1 = 0.0;
    double setting_2 = 0.0;
    friend bool operator==(const DetectorSettings&, const DetectorSettings&) = default;
};

// Axis-aligned allowable causal domain with reflecting walls.
struct Domain {
    Vec3 lo{};
    Vec3 hi{};

    bool contains(const Vec3& p) const;
    // Folds p back into the domain, flipping the matching velocity components.
    void reflect(Vec3& p, Vec3& v) const;
};

// Box spanned by the two detectors, grown by the domain margin and clipped
// to [-spatial_extent, spatial_extent]^3.
Domain allowable_domain(const SimConfig& config);

struct Ensemble {
    std::vector<Molecule> molecules;
    std::int64_t t_step = 0;
    std::int64_t tau_tick = 0;
    Phase phase = Phase::Ergodic;
    PartitionMap partition;
    DetectorSettings settings;
    // Coincidence link of each molecule to a molecule of the other particle; -1 if none.
    std::vector<int> partner;

    std::size_t size() const { return molecules.size(); }
    std::size_t count(Particle p) const;
    void sync_partition();
};

// Channel weights/phases for a molecule placed in `channel` under the shared
// phase convention: particle a's channel 2 carries bell_phase, all else 0.
ChannelAmplitudes channel_amplitudes(Particle particle, Channel channel, double bell_phase);

// Predecessor product state: particle a at detector 1, particle b at detector 2,
// channels alternating by index, velocities drawn from the drift-biased cone.
Ensemble make_ensemble(const SimConfig& config, RandomStream& stream);

// Same, but positions drawn uniformly in the allowable domain.
Ensemble make_spread_ensemble(const SimConfig& config, RandomStream& stream);

// Velocity drawn uniformly from the causal cone shifted by the Randers drift:
// v = beta + (1 - |beta|) u, u uniform in the unit ball, so |v| <= 1.
Vec3 sample_cone_velocity(const Vec3& drift, RandomStream& stream);

// Mean distance of a particle's molecules to that particle's barycenter,
// averaged over both particles.
double ensemble_spread(const Ensemble& ensemble);
Vec3 barycenter(const Ensemble& ensemble, Particle particle);

}  // namespace hrs
