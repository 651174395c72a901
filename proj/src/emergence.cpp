#include "hrs/emergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "hrs/error.hpp"

namespace hrs {

double EmergentState::norm2() const {
    double s = 0.0;
    for (const auto& row : amps) {
        for (const auto& a : row) s += std::norm(a);
    }
    return s;
}

EmergentState EmergentState::normalized() const {
    const double n2 = norm2();
    if (!(n2 > 0.0)) throw Error(ErrorKind::NotNormalized, "cannot normalize the zero state");
    EmergentState out = *this;
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& row : out.amps) {
        for (auto& a : row) a *= inv;
    }
    return out;
}

EmergentState make_state(Complex a11, Complex a12, Complex a21, Complex a22) {
    EmergentState s;
    s.amps = {{{a11, a12}, {a21, a22}}};
    return s;
}

double entanglement_residual(const ChannelAmplitudes& k, const ChannelAmplitudes& l) {
    const double scale = std::hypot(k.n1, k.n2) * std::hypot(l.n1, l.n2);
    if (scale == 0.0) return 0.0;
    const Complex det = k.n1 * l.n1 * std::polar(1.0, k.phi1 + l.phi1) +
                        k.n2 * l.n2 * std::polar(1.0, k.phi2 + l.phi2);
    return std::abs(det) / scale;
}

double entanglement_residual(const Molecule& mol_k, const Molecule& mol_l) {
    if (mol_k.particle == mol_l.particle) {
        throw Error(ErrorKind::SameParticle, "molecules " + std::to_string(mol_k.index) + " and " +
                                                 std::to_string(mol_l.index) + " belong to one particle");
    }
    return entanglement_residual(mol_k.channels, mol_l.channels);
}

bool is_satisfied(const Ensemble& e, std::size_t index) {
    const int p = e.partner[index];
    if (p < 0) return false;
    const auto& a = e.molecules[index];
    const auto& b = e.molecules[static_cast<std::size_t>(p)];
    if (a.particle == b.particle) return false;
    return entanglement_residual(a.channels, b.channels) < kConstraintTolerance;
}

double satisfied_fraction(const Ensemble& e) {
    if (e.molecules.empty()) return 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < e.molecules.size(); ++i) n += is_satisfied(e, i) ? 1 : 0;
    return static_cast<double>(n) / static_cast<double>(e.molecules.size());
}

ConstraintReport constraint_report(const Ensemble& e) {
    ConstraintReport r;
    for (std::size_t i = 0; i < e.molecules.size(); ++i) {
        const int p = e.partner[i];
        if (p < 0) continue;
        const auto& m = e.molecules[i];
        const auto& o = e.molecules[static_cast<std::size_t>(p)];
        if (m.particle == o.particle) continue;
        const auto key = m.particle == Particle::A ? std::pair{m.index, o.index} : std::pair{o.index, m.index};
        r.residuals[key] = entanglement_residual(m.channels, o.channels);
    }
    r.satisfied_fraction = satisfied_fraction(e);
    return r;
}

namespace {

// Uniform grid with cell size equal to the coincidence radius; lookups scan
// the 27 neighbouring cells and return the smallest qualifying index, which
// keeps results independent of hashing order.
class CoincidenceGrid {
public:
    CoincidenceGrid(const Ensemble& e, double radius, const std::vector<int>& members)
        : e_(e), radius_(radius) {
        entries_.reserve(members.size());
        for (int idx : members) {
            entries_.push_back({key_of(cell_of(e.molecules[static_cast<std::size_t>(idx)].position)), idx});
        }
        std::sort(entries_.begin(), entries_.end());
    }

    template <typename Pred>
    int nearest_index(const Vec3& p, Pred&& accept) const {
        const auto c = cell_of(p);
        int best = -1;
        const double r2 = radius_ * radius_;
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    const std::uint64_t key = key_of({c[0] + dx, c[1] + dy, c[2] + dz});
                    auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{key, -1});
                    for (; it != entries_.end() && it->key == key; ++it) {
                        const int idx = it->index;
                        if (best >= 0 && idx >= best) continue;
                        const auto& m = e_.molecules[static_cast<std::size_t>(idx)];
                        if (norm2(m.position - p) <= r2 && accept(idx)) best = idx;
                    }
                }
            }
        }
        return best;
    }

private:
    struct Entry {
        std::uint64_t key;
        int index;
        friend bool operator<(const Entry& a, const Entry& b) {
            return a.key != b.key ? a.key < b.key : a.index < b.index;
        }
    };

    std::array<std::int64_t, 3> cell_of(const Vec3& p) const {
        return {static_cast<std::int64_t>(std::floor(p.x / radius_)),
                static_cast<std::int64_t>(std::floor(p.y / radius_)),
                static_cast<std::int64_t>(std::floor(p.z / radius_))};
    }

    static std::uint64_t key_of(const std::array<std::int64_t, 3>& c) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (auto v : c) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 0x100000001b3ull;
            h ^= h >> 29;
        }
        return h;
    }

    const Ensemble& e_;
    double radius_;
    std::vector<Entry> entries_;
};

void set_channel(Molecule& m, Channel c, double bell_phase) {
    m.channels = channel_amplitudes(m.particle, c, bell_phase);
}

}  // namespace

Ensemble thermalize_pairs(Ensemble e, const SimConfig& config, RandomStream& stream) {
    const std::size_t n = e.molecules.size();
    std::vector<char> sat(n);
    bool any_unsatisfied = false;
    for (std::size_t i = 0; i < n; ++i) {
        sat[i] = is_satisfied(e, i) ? 1 : 0;
        any_unsatisfied |= !sat[i];
    }
    if (!any_unsatisfied) return e;

    const double radius = config.coincidence_radius;
    const double phase = config.bell_phase;

    // Balance counter over satisfied a-molecules: channel 1 minus channel 2.
    std::int64_t balance = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (sat[i] && e.molecules[i].particle == Particle::A) {
            balance += e.molecules[i].channel() == Channel::One ? 1 : -1;
        }
    }

    // Pass 1: unsatisfied a meets unsatisfied b -> new link.
    std::vector<int> free_b;
    for (std::size_t i = 0; i < n; ++i) {
        if (!sat[i] && e.molecules[i].particle == Particle::B) free_b.push_back(static_cast<int>(i));
    }
    if (!free_b.empty()) {
        const CoincidenceGrid grid(e, radius, free_b);
        for (std::size_t k = 0; k < n; ++k) {
            auto& mk = e.molecules[k];
            if (sat[k] || mk.particle != Particle::A) continue;
            const int l = grid.nearest_index(mk.position, [&](int idx) { return !sat[static_cast<std::size_t>(idx)]; });
            if (l < 0) continue;
            Channel a_channel;
            if (balance > 0) {
                a_channel = Channel::Two;
            } else if (balance < 0) {
                a_channel = Channel::One;
            } else {
                a_channel = (stream.next_u32() & 1u) ? Channel::Two : Channel::One;
            }
            balance += a_channel == Channel::One ? 1 : -1;
            auto& ml = e.molecules[static_cast<std::size_t>(l)];
            set_channel(mk, a_channel, phase);
            set_channel(ml, complement(a_channel), phase);
            e.partner[k] = l;
            e.partner[static_cast<std::size_t>(l)] = static_cast<int>(k);
            sat[k] = 1;
            sat[static_cast<std::size_t>(l)] = 1;
        }
    }

    // Pass 2: remaining unsatisfied molecules join a coincident satisfied one,
    // preferring the anchor that evens out their own particle's channel counts.
    std::vector<int> anchors_a;
    std::vector<int> anchors_b;
    std::vector<std::size_t> pending;
    std::array<std::array<std::int64_t, 2>, 2> counts{};  // [particle][channel - 1]
    for (std::size_t i = 0; i < n; ++i) {
        const auto& m = e.molecules[i];
        if (sat[i]) {
            (m.particle == Particle::A ? anchors_a : anchors_b).push_back(static_cast<int>(i));
            counts[m.particle == Particle::A ? 0 : 1][m.channel() == Channel::One ? 0 : 1] += 1;
        } else {
            pending.push_back(i);
        }
    }
    if (!pending.empty() && (!anchors_a.empty() || !anchors_b.empty())) {
        const CoincidenceGrid grid_a(e, radius, anchors_a);
        const CoincidenceGrid grid_b(e, radius, anchors_b);
        for (std::size_t k : pending) {
            auto& mk = e.molecules[k];
            const auto& grid = mk.particle == Particle::A ? grid_b : grid_a;
            auto& own = counts[mk.particle == Particle::A ? 0 : 1];
            Channel wanted;
            if (own[0] < own[1]) {
                wanted = Channel::One;
            } else if (own[0] > own[1]) {
                wanted = Channel::Two;
            } else {
                wanted = (stream.next_u32() & 1u) ? Channel::Two : Channel::One;
            }
            const auto anchor_channel = [&](int idx) { return e.molecules[static_cast<std::size_t>(idx)].channel(); };
            int anchor = grid.nearest_index(mk.position, [&](int idx) { return anchor_channel(idx) == complement(wanted); });
            if (anchor < 0) anchor = grid.nearest_index(mk.position, [](int) { return true; });
            if (anchor < 0) continue;
            const Channel c = complement(anchor_channel(anchor));
            set_channel(mk, c, phase);
            e.partner[k] = anchor;
            own[c == Channel::One ? 0 : 1] += 1;
        }
    }
    e.sync_partition();
    return e;
}

EmergentState average_velocities(const Ensemble& e) {
    std::array<Complex, 2> ent_a{}, ent_b{}, free_a{}, free_b{};
    std::size_t n_a = 0, n_b = 0, n_sat = 0;
    for (std::size_t i = 0; i < e.molecules.size(); ++i) {
        const auto& m = e.molecules[i];
        const Complex c1 = m.channels.n1 * std::polar(1.0, m.channels.phi1);
        const Complex c2 = m.channels.n2 * std::polar(1.0, m.channels.phi2);
        const bool sat = is_satisfied(e, i);
        n_sat += sat ? 1 : 0;
        auto& target = m.particle == Particle::A ? (sat ? ent_a : free_a) : (sat ? ent_b : free_b);
        (m.particle == Particle::A ? n_a : n_b) += 1;
        target[0] += c1;
        target[1] += c2;
    }
    if (n_a == 0 || n_b == 0) {
        throw Error(ErrorKind::EmptyParticle, n_a == 0 ? "particle a has no molecules" : "particle b has no molecules");
    }
    // Uniform cone weights: 1/sqrt(N_p) per particle.
    const double wa = 1.0 / std::sqrt(static_cast<double>(n_a));
    const double wb = 1.0 / std::sqrt(static_cast<double>(n_b));
    for (int c = 0; c < 2; ++c) {
        ent_a[c] *= wa;
        free_a[c] *= wa;
        ent_b[c] *= wb;
        free_b[c] *= wb;
    }

    const EmergentState entangled = make_state(0.0, ent_a[0] * ent_b[1], ent_a[1] * ent_b[0], 0.0);
    const EmergentState product = make_state(free_a[0] * free_b[0], free_a[0] * free_b[1],
                                             free_a[1] * free_b[0], free_a[1] * free_b[1]);
    const double f = static_cast<double>(n_sat) / static_cast<double>(e.molecules.size());

    const bool has_ent = entangled.norm2() > 0.0;
    const bool has_prod = product.norm2() > 0.0;
    if (!has_ent && !has_prod) {
        // Unsatisfied sums cancelled exactly: fall back to the full product.
        std::array<Complex, 2> all_a{}, all_b{};
        for (int c = 0; c < 2; ++c) {
            all_a[c] = ent_a[c] + free_a[c];
            all_b[c] = ent_b[c] + free_b[c];
        }
        return make_state(all_a[0] * all_b[0], all_a[0] * all_b[1], all_a[1] * all_b[0],
                          all_a[1] * all_b[1])
            .normalized();
    }
    if (!has_prod) return entangled.normalized();
    if (!has_ent) return product.normalized();

    const EmergentState e_hat = entangled.normalized();
    const EmergentState p_hat = product.normalized();
    EmergentState mixed;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) mixed.amps[i][j] = f * e_hat.amps[i][j] + (1.0 - f) * p_hat.amps[i][j];
    }
    return mixed.normalized();
}

double concurrence(const EmergentState& s) {
    if (std::abs(s.norm2() - 1.0) > 1e-9) {
        throw Error(ErrorKind::NotNormalized, "state norm^2 = " + std::to_string(s.norm2()));
    }
    const Complex det = s.amps[0][0] * s.amps[1][1] - s.amps[0][1] * s.amps[1][0];
    return std::min(1.0, 2.0 * std::abs(det));
}

EmergentState bell_state(BellState which) {
    const double h = 1.0 / std::numbers::sqrt2;
    switch (which) {
        case BellState::PhiPlus: return make_state(h, 0.0, 0.0, h);
        case BellState::PsiPlus: return make_state(0.0, h, h, 0.0);
        case BellState::PsiMinus: return make_state(0.0, h, -h, 0.0);
        case BellState::PhiMinus: return make_state(h, 0.0, 0.0, -h);
    }
    return {};
}

EmergentState product_limit_state(double bell_phase) {
    const Complex e = std::polar(1.0, bell_phase);
    return make_state(0.5, 0.5, 0.5 * e, 0.5 * e);
}

BellState configured_bell_state(double bell_phase) {
    return std::cos(bell_phase) >= 0.0 ? BellState::PsiPlus : BellState::PsiMinus;
}

double fidelity(const EmergentState& a, const EmergentState& b) {
    Complex overlap = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) overlap += std::conj(a.amps[i][j]) * b.amps[i][j];
    }
    return std::norm(overlap);
}

Classification classify(const EmergentState& state, double tol) {
    if (concurrence(state) < tol) return {StateClass::Product, BellState::PhiPlus};
    for (BellState b : {BellState::PhiPlus, BellState::PsiPlus, BellState::PsiMinus, BellState::PhiMinus}) {
        if (fidelity(bell_state(b), state) > 1.0 - tol) return {StateClass::Bell, b};
    }
    return {StateClass::EntangledOther, BellState::PhiPlus};
}

std::string_view to_string(BellState which) {
    switch (which) {
        case BellState::PhiPlus: return "phi_plus";
        case BellState::PsiPlus: return "psi_plus";
        case BellState::PsiMinus: return "psi_minus";
        case BellState::PhiMinus: return "phi_minus";
    }
    return "unknown";
}

std::string class_name(const Classification& c) {
    switch (c.kind) {
        case StateClass::Product: return "product";
        case StateClass::Bell: return "bell_" + std::string(to_string(c.bell));
        case StateClass::EntangledOther: return "entangled_other";
    }
    return "unknown";
}

Ensemble repartition(Ensemble e, const DetectorSettings& new_settings, RandomStream& stream,
                     const SimConfig& config) {
    if (new_settings == e.settings) return e;
    const bool changed_1 = new_settings.setting_1 != e.settings.setting_1;
    const bool changed_2 = new_settings.setting_2 != e.settings.setting_2;
    const double r2 = config.coincidence_radius * config.coincidence_radius;

    for (std::size_t i = 0; i < e.molecules.size(); ++i) {
        auto& m = e.molecules[i];
        const bool near_1 = changed_1 && norm2(m.position - config.detector_1_pos) <= r2;
        const bool near_2 = changed_2 && norm2(m.position - config.detector_2_pos) <= r2;
        if (!near_1 && !near_2) continue;
        const Channel label = (stream.next_u32() & 1u) ? Channel::Two : Channel::One;
        set_channel(m, label, config.bell_phase);
        e.partner[i] = -1;
    }

    // Drop links whose anchor is no longer satisfied, to a fixed point.
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < e.molecules.size(); ++i) {
            const int p = e.partner[i];
            if (p < 0) continue;
            if (!is_satisfied(e, i) || !is_satisfied(e, static_cast<std::size_t>(p))) {
                e.partner[i] = -1;
                changed = true;
            }
        }
    }
    e.settings = new_settings;
    e.sync_partition();
    return e;
}

}  // namespace hrs
