#pragma once

#include <array>
#include <complex>
#include <map>
#include <string_view>
#include <utility>

#include "hrs/config.hpp"
#include "hrs/model.hpp"
#include "hrs/rng.hpp"

namespace hrs {

using Complex = std::complex<double>;

// psi[i][j]: i = channel of particle a, j = channel of particle b (0-based).
struct EmergentState {
    std::array<std::array<Complex, 2>, 2> amps{};

    Complex& at(Channel a, Channel b) {
        return amps[static_cast<int>(a) - 1][static_cast<int>(b) - 1];
    }
    Complex at(Channel a, Channel b) const {
        return amps[static_cast<int>(a) - 1][static_cast<int>(b) - 1];
    }
    double norm2() const;
    // Throws Error{NotNormalized} for the zero vector.
    EmergentState normalized() const;
};

EmergentState make_state(Complex a11, Complex a12, Complex a21, Complex a22);

// Constraint satisfaction tolerance.
inline constexpr double kConstraintTolerance = 1e-9;

struct ConstraintReport {
    // Linked cross-particle pairs (k in a, l in b).
    std::map<std::pair<int, int>, double> residuals;
    double satisfied_fraction = 0.0;
};

// |n1k n1l e^{i(phi1k + phi1l)} + n2k n2l e^{i(phi2k + phi2l)}| / (|n_k| |n_l|),
// the absolute determinant of the entanglement constraint.
double entanglement_residual(const ChannelAmplitudes& k, const ChannelAmplitudes& l);
// Throws Error{SameParticle} when both molecules belong to one particle.
double entanglement_residual(const Molecule& mol_k, const Molecule& mol_l);

bool is_satisfied(const Ensemble& ensemble, std::size_t index);
double satisfied_fraction(const Ensemble& ensemble);
ConstraintReport constraint_report(const Ensemble& ensemble);

// Coincident cross-particle pairs (distance <= coincidence_radius) are driven
// into complementary channels with the shared phase convention. Two
// unsatisfied molecules form a new link; an unsatisfied molecule meeting a
// satisfied one joins it. Satisfied molecules are never modified.
Ensemble thermalize_pairs(Ensemble ensemble, const SimConfig& config, RandomStream& stream);

// Velocity-averaged state: entangled part alpha_1a alpha_2b |12> + alpha_2a alpha_1b |21>
// from satisfied molecules, full product from the rest, mixed by the satisfied fraction.
// Throws Error{EmptyParticle}.
EmergentState average_velocities(const Ensemble& ensemble);

// 2 |psi11 psi22 - psi12 psi21|. Throws Error{NotNormalized}.
double concurrence(const EmergentState& state);

enum class BellState { PhiPlus, PsiPlus, PsiMinus, PhiMinus };
enum class StateClass { Product, Bell, EntangledOther };

struct Classification {
    StateClass kind = StateClass::Product;
    BellState bell = BellState::PhiPlus;  // meaningful only for kind == Bell
    friend bool operator==(const Classification&, const Classification&) = default;
};

EmergentState bell_state(BellState which);
// (|1> + e^{i phase}|2>) (x) (|1> + |2>) / 2: the limit product state.
EmergentState product_limit_state(double bell_phase);
// The Bell state an ideal thermalization produces for a shared phase.
BellState configured_bell_state(double bell_phase);
double fidelity(const EmergentState& a, const EmergentState& b);

Classification classify(const EmergentState& state, double tol);
std::string_view to_string(BellState which);
std::string class_name(const Classification& c);

// Contextual re-partition after a settings change: molecules within the
// coincidence radius of a detector whose setting changed get a fresh label
// and lose their link; links that depended on them are dropped as well.
Ensemble repartition(Ensemble ensemble, const DetectorSettings& new_settings, RandomStream& stream,
                     const SimConfig& config);

}  // namespace hrs
