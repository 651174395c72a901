#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>

#include "hrs/vec3.hpp"

namespace hrs {

enum class SamplerKind {
    Born,
    // Negative control: observer 1 copies observer 2's outcome.
    BrokenCopy,
};

// All model constants. Units: c = 1, one t-step is one Planck tick, lengths
// are in the same units as lattice_spacing (light covers one spacing per step).
struct SimConfig {
    std::int64_t n_a = 1;
    std::int64_t n_b = 1;
    double mu_a = 0.0;
    double mu_b = 0.0;
    std::int64_t t_min_steps = 1;
    double lattice_spacing = 1.0;
    double spatial_extent = 1.0;
    Vec3 detector_1_pos{};
    Vec3 detector_2_pos{};
    double coincidence_radius = 1.0;
    Vec3 randers_drift{};
    std::int64_t tau_ticks = 1;
    std::uint64_t seed = 0;
    std::int64_t trials = 1;

    // Optional keys.
    double ergodic_fraction = 0.6;
    double contraction_rate = 0.05;
    double resample_prob = 0.02;
    double domain_margin = -1.0;  // negative: 5 * coincidence_radius
    double bell_phase = std::numbers::pi;
    bool thermalization = true;
    SamplerKind sampler = SamplerKind::Born;

    double effective_domain_margin() const {
        return domain_margin < 0.0 ? 5.0 * coincidence_radius : domain_margin;
    }

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

// Throws Error{InvalidValue} naming the first violated invariant.
void validate(const SimConfig& config);

// Parses `key = value` lines; `#` starts a comment; vectors are comma-separated
// triples, optionally parenthesised. Throws Error{MissingKey|InvalidValue}.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::string& path);

// Inverse of parse_config: parse_config(serialize_config(c)) == c.
std::string serialize_config(const SimConfig& config);

std::string_view to_string(SamplerKind kind);

}  // namespace hrs
