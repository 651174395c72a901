#include "hrs/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hrs/error.hpp"

namespace hrs {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MissingKey: return "MissingKey";
        case ErrorKind::InvalidValue: return "InvalidValue";
        case ErrorKind::Overflow: return "Overflow";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::SameParticle: return "SameParticle";
        case ErrorKind::EmptyParticle: return "EmptyParticle";
        case ErrorKind::NotNormalized: return "NotNormalized";
        case ErrorKind::GridTooSmall: return "GridTooSmall";
        case ErrorKind::AllZeroProbabilities: return "AllZeroProbabilities";
        case ErrorKind::SingleDim: return "SingleDim";
        case ErrorKind::DistanceExceedsBox: return "DistanceExceedsBox";
        case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    }
    return "Unknown";
}

std::string_view to_string(SamplerKind kind) {
    return kind == SamplerKind::Born ? "born" : "broken_copy";
}

namespace {

constexpr std::array kRequiredKeys = {
    "n_a", "n_b", "mu_a", "mu_b", "t_min_steps", "lattice_spacing", "spatial_extent",
    "detector_1_pos", "detector_2_pos", "coincidence_radius", "randers_drift",
    "tau_ticks", "seed", "trials"};

constexpr std::array kOptionalKeys = {
    "ergodic_fraction", "contraction_rate", "resample_prob", "domain_margin",
    "bell_phase", "thermalization", "sampler"};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void invalid(std::string_view key, std::string_view why) {
    throw Error(ErrorKind::InvalidValue, std::string(key) + ": " + std::string(why));
}

double to_double(std::string_view key, std::string_view text) {
    text = trim(text);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        invalid(key, "expected a real number, got '" + std::string(text) + "'");
    }
    return value;
}

std::int64_t to_int(std::string_view key, std::string_view text) {
    text = trim(text);
    std::int64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        invalid(key, "expected an integer, got '" + std::string(text) + "'");
    }
    return value;
}

std::uint64_t to_u64(std::string_view key, std::string_view text) {
    text = trim(text);
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        invalid(key, "expected an unsigned 64-bit integer, got '" + std::string(text) + "'");
    }
    return value;
}

Vec3 to_vec3(std::string_view key, std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '(') {
        if (text.back() != ')') invalid(key, "unbalanced parenthesis");
        text = text.substr(1, text.size() - 2);
    }
    Vec3 v;
    int i = 0;
    while (true) {
        const auto comma = text.find(',');
        if (i > 2) invalid(key, "expected exactly three components");
        v[i++] = to_double(key, text.substr(0, comma));
        if (comma == std::string_view::npos) break;
        text = text.substr(comma + 1);
    }
    if (i != 3) invalid(key, "expected exactly three components");
    return v;
}

bool to_bool(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    invalid(key, "expected true/false");
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_vec(const Vec3& v) {
    return fmt_double(v.x) + ", " + fmt_double(v.y) + ", " + fmt_double(v.z);
}

bool inside_box(const Vec3& p, double half) {
    return std::abs(p.x) <= half && std::abs(p.y) <= half && std::abs(p.z) <= half;
}

}  // namespace

void validate(const SimConfig& c) {
    if (c.n_a < 1) invalid("n_a", "must be >= 1");
    if (c.n_b < 1) invalid("n_b", "must be >= 1");
    if (c.mu_a < 0.0) invalid("mu_a", "must be >= 0");
    if (c.mu_b < 0.0) invalid("mu_b", "must be >= 0");
    if (c.t_min_steps < 1) invalid("t_min_steps", "must be >= 1");
    if (!(c.lattice_spacing > 0.0)) invalid("lattice_spacing", "must be > 0");
    if (!(c.spatial_extent > 0.0)) invalid("spatial_extent", "must be > 0");
    if (!(c.coincidence_radius > 0.0)) invalid("coincidence_radius", "must be > 0");
    if (c.coincidence_radius < c.lattice_spacing) {
        invalid("coincidence_radius", "must be >= lattice_spacing");
    }
    if (!(norm(c.randers_drift) < 1.0)) invalid("randers_drift", "randers_drift norm >= 1");
    if (c.tau_ticks < 1) invalid("tau_ticks", "must be >= 1");
    if (c.trials < 1) invalid("trials", "must be >= 1");
    if (!inside_box(c.detector_1_pos, c.spatial_extent)) {
        invalid("detector_1_pos", "outside the simulation box");
    }
    if (!inside_box(c.detector_2_pos, c.spatial_extent)) {
        invalid("detector_2_pos", "outside the simulation box");
    }
    if (!(c.ergodic_fraction > 0.0 && c.ergodic_fraction < 1.0)) {
        invalid("ergodic_fraction", "must lie in (0, 1)");
    }
    if (!(c.contraction_rate >= 0.0 && c.contraction_rate <= 1.0)) {
        invalid("contraction_rate", "must lie in [0, 1]");
    }
    if (!(c.resample_prob > 0.0 && c.resample_prob <= 1.0)) {
        invalid("resample_prob", "must lie in (0, 1]");
    }
    if (c.domain_margin >= 0.0 && c.domain_margin < c.lattice_spacing) {
        invalid("domain_margin", "must be >= lattice_spacing");
    }
}

SimConfig parse_config(std::string_view text) {
    std::map<std::string, std::string, std::less<>> entries;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::InvalidValue,
                        "line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const bool known =
            std::find(kRequiredKeys.begin(), kRequiredKeys.end(), key) != kRequiredKeys.end() ||
            std::find(kOptionalKeys.begin(), kOptionalKeys.end(), key) != kOptionalKeys.end();
        if (!known) invalid(key, "unknown key");
        if (entries.contains(key)) invalid(key, "duplicate key");
        entries.emplace(key, std::string(trim(line.substr(eq + 1))));
    }

    for (const char* key : kRequiredKeys) {
        if (!entries.contains(key)) throw Error(ErrorKind::MissingKey, key);
    }

    SimConfig c;
    const auto get = [&](const char* key) -> std::string_view { return entries.find(key)->second; };
    c.n_a = to_int("n_a", get("n_a"));
    c.n_b = to_int("n_b", get("n_b"));
    c.mu_a = to_double("mu_a", get("mu_a"));
    c.mu_b = to_double("mu_b", get("mu_b"));
    c.t_min_steps = to_int("t_min_steps", get("t_min_steps"));
    c.lattice_spacing = to_double("lattice_spacing", get("lattice_spacing"));
    c.spatial_extent = to_double("spatial_extent", get("spatial_extent"));
    c.detector_1_pos = to_vec3("detector_1_pos", get("detector_1_pos"));
    c.detector_2_pos = to_vec3("detector_2_pos", get("detector_2_pos"));
    c.coincidence_radius = to_double("coincidence_radius", get("coincidence_radius"));
    c.randers_drift = to_vec3("randers_drift", get("randers_drift"));
    c.tau_ticks = to_int("tau_ticks", get("tau_ticks"));
    c.seed = to_u64("seed", get("seed"));
    c.trials = to_int("trials", get("trials"));

    if (auto it = entries.find("ergodic_fraction"); it != entries.end()) {
        c.ergodic_fraction = to_double(it->first, it->second);
    }
    if (auto it = entries.find("contraction_rate"); it != entries.end()) {
        c.contraction_rate = to_double(it->first, it->second);
    }
    if (auto it = entries.find("resample_prob"); it != entries.end()) {
        c.resample_prob = to_double(it->first, it->second);
    }
    if (auto it = entries.find("domain_margin"); it != entries.end()) {
        c.domain_margin = to_double(it->first, it->second);
    }
    if (auto it = entries.find("bell_phase"); it != entries.end()) {
        c.bell_phase = to_double(it->first, it->second);
    }
    if (auto it = entries.find("thermalization"); it != entries.end()) {
        c.thermalization = to_bool(it->first, it->second);
    }
    if (auto it = entries.find("sampler"); it != entries.end()) {
        if (it->second == "born") {
            c.sampler = SamplerKind::Born;
        } else if (it->second == "broken_copy") {
            c.sampler = SamplerKind::BrokenCopy;
        } else {
            invalid("sampler", "expected born or broken_copy");
        }
    }
    validate(c);
    return c;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidValue, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const SimConfig& c) {
    std::ostringstream out;
    out << "n_a = " << c.n_a << '\n'
        << "n_b = " << c.n_b << '\n'
        << "mu_a = " << fmt_double(c.mu_a) << '\n'
        << "mu_b = " << fmt_double(c.mu_b) << '\n'
        << "t_min_steps = " << c.t_min_steps << '\n'
        << "lattice_spacing = " << fmt_double(c.lattice_spacing) << '\n'
        << "spatial_extent = " << fmt_double(c.spatial_extent) << '\n'
        << "detector_1_pos = " << fmt_vec(c.detector_1_pos) << '\n'
        << "detector_2_pos = " << fmt_vec(c.detector_2_pos) << '\n'
        << "coincidence_radius = " << fmt_double(c.coincidence_radius) << '\n'
        << "randers_drift = " << fmt_vec(c.randers_drift) << '\n'
        << "tau_ticks = " << c.tau_ticks << '\n'
        << "seed = " << c.seed << '\n'
        << "trials = " << c.trials << '\n'
        << "ergodic_fraction = " << fmt_double(c.ergodic_fraction) << '\n'
        << "contraction_rate = " << fmt_double(c.contraction_rate) << '\n'
        << "resample_prob = " << fmt_double(c.resample_prob) << '\n'
        << "domain_margin = " << fmt_double(c.domain_margin) << '\n'
        << "bell_phase = " << fmt_double(c.bell_phase) << '\n'
        << "thermalization = " << (c.thermalization ? "true" : "false") << '\n'
        << "sampler = " << to_string(c.sampler) << '\n';
    return out.str();
}

}  // namespace hrs
