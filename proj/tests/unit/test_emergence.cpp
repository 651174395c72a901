#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "hrs/dynamics.hpp"
#include "hrs/emergence.hpp"
#include "hrs/error.hpp"
#include "hrs/experiments.hpp"
#include "support.hpp"

using namespace hrs;

namespace {

constexpr double kPi = std::numbers::pi;

Molecule molecule(int index, Particle p, Channel c, Vec3 pos = {}) {
    return make_molecule(index, p, pos, {}, channel_amplitudes(p, c, kPi));
}

// Two-molecule ensemble, a at index 0 and b at index 1.
Ensemble pair_ensemble(Channel ca, Channel cb, Vec3 pa, Vec3 pb) {
    Ensemble e;
    e.molecules = {molecule(0, Particle::A, ca, pa), molecule(1, Particle::B, cb, pb)};
    e.partner = {-1, -1};
    e.sync_partition();
    return e;
}

// Fully linked ensemble: a-molecule k pairs with b-molecule k in complementary channels.
Ensemble linked_ensemble(int n_per_particle, double bell_phase) {
    Ensemble e;
    for (int k = 0; k < n_per_particle; ++k) {
        const Channel c = k % 2 == 0 ? Channel::One : Channel::Two;
        e.molecules.push_back(make_molecule(k, Particle::A, {}, {}, channel_amplitudes(Particle::A, c, bell_phase)));
    }
    for (int k = 0; k < n_per_particle; ++k) {
        const Channel c = k % 2 == 0 ? Channel::Two : Channel::One;
        e.molecules.push_back(
            make_molecule(n_per_particle + k, Particle::B, {}, {}, channel_amplitudes(Particle::B, c, bell_phase)));
    }
    e.partner.resize(e.molecules.size());
    for (int k = 0; k < n_per_particle; ++k) {
        e.partner[static_cast<std::size_t>(k)] = n_per_particle + k;
        e.partner[static_cast<std::size_t>(n_per_particle + k)] = k;
    }
    e.sync_partition();
    return e;
}

EmergentState random_state(RandomStream& s) {
    EmergentState st;
    for (auto& row : st.amps) {
        for (auto& a : row) a = Complex(s.uniform(-1, 1), s.uniform(-1, 1));
    }
    return st.normalized();
}

double svd_concurrence(const EmergentState& st) {
    Eigen::Matrix2cd m;
    m << st.amps[0][0], st.amps[0][1], st.amps[1][0], st.amps[1][1];
    const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
    const auto sv = svd.singularValues();
    return 2.0 * sv(0) * sv(1);
}

}  // namespace

TEST_CASE("residual of complementary and equal channels") {
    const auto k = molecule(0, Particle::A, Channel::One);
    const auto l2 = molecule(1, Particle::B, Channel::Two);
    const auto l1 = molecule(2, Particle::B, Channel::One);
    CHECK(entanglement_residual(k, l2) == 0.0);
    CHECK(entanglement_residual(k, l1) == 1.0);
}

TEST_CASE("residual matches a 2x2 complex determinant") {
    RandomStream s = rng_stream(21, 0);
    for (int i = 0; i < 1000; ++i) {
        const ChannelAmplitudes k{s.uniform(0, 2), s.uniform(0, 2), s.uniform(0, 2 * kPi), s.uniform(0, 2 * kPi)};
        const ChannelAmplitudes l{s.uniform(0, 2), s.uniform(0, 2), s.uniform(0, 2 * kPi), s.uniform(0, 2 * kPi)};
        Eigen::Matrix2cd m;
        m << k.n1 * std::polar(1.0, k.phi1), -l.n2 * std::polar(1.0, l.phi2), k.n2 * std::polar(1.0, k.phi2),
            l.n1 * std::polar(1.0, l.phi1);
        const double oracle = std::abs(m.determinant()) / (std::hypot(k.n1, k.n2) * std::hypot(l.n1, l.n2));
        REQUIRE(entanglement_residual(k, l) == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("residual rejects same-particle pairs") {
    const auto a = molecule(0, Particle::A, Channel::One);
    const auto b = molecule(1, Particle::A, Channel::Two);
    try {
        entanglement_residual(a, b);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SameParticle);
    }
}

TEST_CASE("coincident molecules thermalize into complementary channels") {
    const SimConfig c = testing_support::small_config();
    Ensemble e = pair_ensemble(Channel::One, Channel::One, {1, 1, 1}, {1, 1, 1});
    RandomStream s = rng_stream(1, 1);
    e = thermalize_pairs(std::move(e), c, s);
    CHECK(e.molecules[0].channel() != e.molecules[1].channel());
    CHECK(entanglement_residual(e.molecules[0], e.molecules[1]) < 1e-9);
    CHECK(is_satisfied(e, 0));
    CHECK(is_satisfied(e, 1));
    CHECK(satisfied_fraction(e) == 1.0);
    CHECK(e.partition.label(0) == e.molecules[0].channel());
}

TEST_CASE("distant molecules are left alone") {
    const SimConfig c = testing_support::small_config();
    const Ensemble before = pair_ensemble(Channel::One, Channel::One, {0, 0, 0}, {c.coincidence_radius + 0.01, 0, 0});
    RandomStream s = rng_stream(1, 1);
    const Ensemble after = thermalize_pairs(before, c, s);
    CHECK(after.molecules[0].channels.n1 == 1.0);
    CHECK(after.molecules[1].channels.n1 == 1.0);
    CHECK(after.partner == before.partner);
    CHECK(satisfied_fraction(after) == 0.0);
}

TEST_CASE("followers join a satisfied molecule of the other particle") {
    const SimConfig c = testing_support::small_config();
    Ensemble e;
    e.molecules = {molecule(0, Particle::A, Channel::One), molecule(1, Particle::A, Channel::One),
                   molecule(2, Particle::B, Channel::One)};
    e.partner = {-1, -1, -1};
    RandomStream s = rng_stream(2, 2);
    e = thermalize_pairs(std::move(e), c, s);
    CHECK(satisfied_fraction(e) == 1.0);
    CHECK(e.partner[1] == 2);
    CHECK(e.partner[0] == 2);
    CHECK(e.partner[2] == 0);
}

TEST_CASE("a full ergodic window at short range satisfies almost every molecule") {
    SimConfig c = testing_support::fixture("scan.cfg");
    c.n_a = 1000;
    c.n_b = 1000;
    c = place_detectors(c, 0.1 * static_cast<double>(system_semi_period(c)));
    const CycleSchedule sched = make_schedule(c);
    double previous = 0.0;
    bool monotone = true;
    double at_window_end = 0.0;
    run_thermalized(c, 0, 1, [&](const Ensemble& e) {
        if (e.phase != Phase::Ergodic && e.t_step != sched.ergodic_end) return;
        const double f = satisfied_fraction(e);
        if (f < previous) monotone = false;
        previous = f;
        if (e.t_step == sched.ergodic_end) at_window_end = f;
    });
    CHECK(monotone);
    CHECK(at_window_end >= 0.99);
}

TEST_CASE("constraint report is consistent with the tolerance") {
    const SimConfig c = testing_support::small_config();
    const Ensemble e = run_thermalized(c, 3, 1);
    const ConstraintReport r = constraint_report(e);
    std::size_t satisfied = 0;
    for (std::size_t i = 0; i < e.size(); ++i) satisfied += is_satisfied(e, i) ? 1 : 0;
    CHECK(r.satisfied_fraction == doctest::Approx(static_cast<double>(satisfied) / static_cast<double>(e.size())));
    for (const auto& [key, value] : r.residuals) {
        CHECK(e.molecules[static_cast<std::size_t>(key.first)].particle == Particle::A);
        CHECK(e.molecules[static_cast<std::size_t>(key.second)].particle == Particle::B);
        CHECK(value >= 0.0);
    }
}

TEST_CASE("average_velocities: single-channel sums give a basis product") {
    Ensemble e;
    for (int k = 0; k < 3; ++k) e.molecules.push_back(molecule(k, Particle::A, Channel::One));
    for (int k = 3; k < 6; ++k) e.molecules.push_back(molecule(k, Particle::B, Channel::Two));
    e.partner.assign(6, -1);
    const EmergentState st = average_velocities(e);
    CHECK(std::abs(st.at(Channel::One, Channel::Two) - Complex(1.0, 0.0)) < 1e-15);
    CHECK(st.norm2() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("average_velocities: thermalized symmetric ensemble gives the Bell state") {
    const Ensemble e = linked_ensemble(10000, 0.0);
    const EmergentState st = average_velocities(e);
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(st.amps[0][1] - h) < 1e-3);
    CHECK(std::abs(st.amps[1][0] - h) < 1e-3);
    CHECK(std::abs(st.amps[0][0]) < 1e-3);
    CHECK(std::abs(st.amps[1][1]) < 1e-3);
    CHECK(classify(st, 1e-6) == Classification{StateClass::Bell, BellState::PsiPlus});

    const EmergentState singlet = average_velocities(linked_ensemble(100, kPi));
    CHECK(classify(singlet, 1e-9) == Classification{StateClass::Bell, BellState::PsiMinus});
    CHECK(configured_bell_state(kPi) == BellState::PsiMinus);
    CHECK(configured_bell_state(0.0) == BellState::PsiPlus);
}

TEST_CASE("average_velocities: unthermalized predecessor gives the limit product state") {
    const SimConfig c = testing_support::small_config();
    RandomStream s = rng_stream(1, 1);
    const Ensemble e = make_ensemble(c, s);
    const EmergentState st = average_velocities(e);
    CHECK(concurrence(st) < 1e-12);
    CHECK(fidelity(product_limit_state(c.bell_phase), st) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(classify(st, 1e-6).kind == StateClass::Product);
}

TEST_CASE("average_velocities requires both particles") {
    Ensemble e;
    e.molecules = {molecule(0, Particle::A, Channel::One)};
    e.partner = {-1};
    try {
        average_velocities(e);
        FAIL("no error");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::EmptyParticle);
    }
}

TEST_CASE("concurrence examples") {
    CHECK(concurrence(bell_state(BellState::PsiPlus)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(concurrence(make_state(0.5, 0.5, 0.5, 0.5)) == doctest::Approx(0.0));
    try {
        concurrence(make_state(1.0, 1.0, 0.0, 0.0));
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotNormalized);
    }
}

TEST_CASE("concurrence matches the Schmidt coefficients") {
    RandomStream s = rng_stream(31, 0);
    for (int i = 0; i < 1000; ++i) {
        const EmergentState st = random_state(s);
        REQUIRE(concurrence(st) == doctest::Approx(svd_concurrence(st)).epsilon(1e-10));
    }
}

TEST_CASE("concurrence ignores a global phase") {
    RandomStream s = rng_stream(32, 0);
    for (int i = 0; i < 200; ++i) {
        EmergentState st = random_state(s);
        const double c0 = concurrence(st);
        const Complex phase = std::polar(1.0, s.uniform(0, 2 * kPi));
        for (auto& row : st.amps) {
            for (auto& a : row) a *= phase;
        }
        REQUIRE(concurrence(st) == doctest::Approx(c0).epsilon(1e-12));
    }
}

TEST_CASE("classify examples") {
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(classify(make_state(0.0, h, -h, 0.0), 1e-6) == Classification{StateClass::Bell, BellState::PsiMinus});
    CHECK(classify(make_state(0.5, 0.5, -0.5, -0.5), 1e-6).kind == StateClass::Product);
    // cos t |11> + sin t |22> has concurrence sin 2t.
    const double t = 0.5 * std::asin(0.5);
    const EmergentState half = make_state(std::cos(t), 0.0, 0.0, std::sin(t));
    CHECK(concurrence(half) == doctest::Approx(0.5));
    CHECK(classify(half, 0.05).kind == StateClass::EntangledOther);
    for (BellState b : {BellState::PhiPlus, BellState::PsiPlus, BellState::PsiMinus, BellState::PhiMinus}) {
        CHECK(classify(bell_state(b), 1e-9) == Classification{StateClass::Bell, b});
    }
    CHECK(class_name(classify(bell_state(BellState::PhiMinus), 1e-9)) == "bell_phi_minus");
}

TEST_CASE("repartition with unchanged settings is the identity") {
    const SimConfig c = testing_support::small_config();
    const Ensemble e = run_thermalized(c, 4, 1);
    RandomStream s = rng_stream(5, 5);
    const Ensemble r = repartition(e, e.settings, s, c);
    CHECK(r.partition == e.partition);
    CHECK(r.partner == e.partner);
}

TEST_CASE("repartition at detector 1 touches only molecules near detector 1") {
    SimConfig c = testing_support::small_config();
    c.detector_1_pos = {-10, 0, 0};
    c.detector_2_pos = {10, 0, 0};
    RandomStream init = rng_stream(6, 6);
    Ensemble e = make_ensemble(c, init);
    // Move half of each particle away from its detector.
    for (auto& m : e.molecules) {
        if (m.index % 2 == 1) m.position += Vec3{0, 8, 0};
    }
    RandomStream s = rng_stream(7, 7);
    const Ensemble r = repartition(e, {0.5, e.settings.setting_2}, s, c);
    int changed = 0;
    for (const auto& m : e.molecules) {
        const bool near_1 = distance(m.position, c.detector_1_pos) <= c.coincidence_radius;
        if (r.partition.label(m.index) != e.partition.label(m.index)) {
            ++changed;
            CHECK(near_1);
        }
    }
    CHECK(changed > 0);
    CHECK(r.settings.setting_1 == 0.5);
}

TEST_CASE("repartition drops dependent links and re-thermalization recovers") {
    SimConfig c = testing_support::fixture("scan.cfg");
    c.n_a = 500;
    c.n_b = 500;
    c = place_detectors(c, 10.0);
    Ensemble e = run_thermalized(c, 8, 1);
    REQUIRE(satisfied_fraction(e) >= 0.99);
    RandomStream s = rng_stream(9, 9);
    // Bring everything back to the detectors so the change affects many molecules.
    for (auto& m : e.molecules) m.position = m.particle == Particle::A ? c.detector_1_pos : c.detector_2_pos;
    e = repartition(std::move(e), {1.0, 0.0}, s, c);
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (is_satisfied(e, i)) REQUIRE(is_satisfied(e, static_cast<std::size_t>(e.partner[i])));
    }
    CHECK(satisfied_fraction(e) < 0.5);
    CycleHooks hooks;
    hooks.ergodic = [&c](Ensemble& ens, RandomStream& st) { ens = thermalize_pairs(std::move(ens), c, st); };
    e = run_cycle(std::move(e), c, hooks, 99);
    CHECK(satisfied_fraction(e) >= 0.99);
}
