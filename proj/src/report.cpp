#include "hrs/report.hpp"

#include <charconv>
#include <sstream>

namespace hrs {

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

Json vec_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

}  // namespace

Json to_json(const SimConfig& c) {
    Json j;
    j["n_a"] = c.n_a;
    j["n_b"] = c.n_b;
    j["mu_a"] = c.mu_a;
    j["mu_b"] = c.mu_b;
    j["t_min_steps"] = c.t_min_steps;
    j["lattice_spacing"] = c.lattice_spacing;
    j["spatial_extent"] = c.spatial_extent;
    j["detector_1_pos"] = vec_json(c.detector_1_pos);
    j["detector_2_pos"] = vec_json(c.detector_2_pos);
    j["coincidence_radius"] = c.coincidence_radius;
    j["randers_drift"] = vec_json(c.randers_drift);
    j["tau_ticks"] = c.tau_ticks;
    j["seed"] = c.seed;
    j["trials"] = c.trials;
    j["ergodic_fraction"] = c.ergodic_fraction;
    j["contraction_rate"] = c.contraction_rate;
    j["resample_prob"] = c.resample_prob;
    j["domain_margin"] = c.effective_domain_margin();
    j["bell_phase"] = c.bell_phase;
    j["thermalization"] = c.thermalization;
    j["sampler"] = std::string(to_string(c.sampler));
    return j;
}

Json to_json(const EmergentState& s) {
    Json amps = Json::array();
    for (const auto& row : s.amps) {
        for (const auto& a : row) amps.push_back(Json::array({a.real(), a.imag()}));
    }
    Json j;
    j["amps"] = amps;
    j["concurrence"] = concurrence(s);
    j["class"] = class_name(classify(s, 0.05));
    return j;
}

Json to_json(const CorrelationRecord& r) {
    Json j;
    j["a"] = r.setting_1;
    j["b"] = r.setting_2;
    j["E"] = r.e_value;
    j["sigma"] = r.sigma;
    j["trials"] = r.trials;
    j["counts"] = {{"pp", r.counts[0][0]}, {"pm", r.counts[0][1]}, {"mp", r.counts[1][0]}, {"mm", r.counts[1][1]}};
    return j;
}

Json to_json(const ChshResult& r) {
    Json j;
    j["angles"] = r.angles;
    j["S"] = r.s_value;
    j["sigma"] = r.sigma;
    Json recs = Json::array();
    for (const auto& rec : r.records) recs.push_back(to_json(rec));
    j["correlations"] = recs;
    return j;
}

Json to_json(const RangeScan& s) {
    Json j;
    j["d_cor_bound"] = s.d_cor_bound;
    Json rows = Json::array();
    for (std::size_t i = 0; i < s.distances.size(); ++i) {
        Json row;
        row["distance"] = s.distances[i];
        row["concurrence"] = s.concurrences[i];
        row["satisfied_fraction"] = s.satisfied_fractions[i];
        row["bell_fidelity"] = s.bell_fidelities[i];
        row["product_fidelity"] = s.product_fidelities[i];
        row["class"] = s.classes[i];
        rows.push_back(row);
    }
    j["points"] = rows;
    return j;
}

Json to_json(const std::vector<InstantaneityPoint>& points) {
    Json rows = Json::array();
    for (const auto& p : points) {
        Json row;
        row["distance"] = p.distance;
        row["latency"] = p.latency;
        row["tau_fractions"] = p.tau_fractions;
        rows.push_back(row);
    }
    Json j;
    j["threshold"] = kInstantaneityThreshold;
    j["points"] = rows;
    return j;
}

Json to_json(const NoSignalingReport& r) {
    Json j;
    j["setting_1"] = r.setting_1;
    j["settings_2"] = r.settings_2;
    j["p_plus"] = r.first_plus;
    j["delta_p"] = r.delta;
    j["sigma"] = r.sigma;
    j["trials"] = r.trials;
    j["passed"] = r.passed;
    return j;
}

Json to_json(const BellCompareReport& r) {
    Json j;
    j["simulated"] = to_json(r.simulated);
    j["lambda_grid"] = r.lambda_grid;
    j["fitted_E"] = r.fit.fitted;
    j["residuals"] = r.fit.residuals;
    j["max_residual"] = r.fit.max_residual;
    j["lower_bound"] = r.lower_bound;
    j["contract_holds"] = r.contract_holds;
    return j;
}

Json to_json(const ConcentrationReport& r) {
    Json j;
    j["dims"] = r.dims;
    j["epsilon"] = r.epsilon;
    j["samples"] = r.samples;
    j["deviation_probs"] = r.deviation_probs;
    Json bounds = Json::array();
    for (auto n : r.dims) bounds.push_back(hoeffding_bound(n, r.epsilon));
    j["hoeffding_bounds"] = bounds;
    j["fitted_slope"] = r.fitted_slope;
    j["fitted_intercept"] = r.fitted_intercept;
    j["fit_r2"] = r.fit_r2;
    return j;
}

Json to_json(const CollapseReport& r) {
    Json j;
    j["spread_t0"] = r.spread_start;
    j["spread_te"] = r.spread_ergodic_end;
    j["spread_T"] = r.spread_equilibrium;
    j["spread_2T"] = r.spread_end;
    return j;
}

Json to_json(const CommutatorReport& r) {
    Json j;
    j["grid_size"] = r.grid_size;
    j["spacing"] = r.spacing;
    j["position_position"] = r.position_position;
    j["momentum_momentum"] = r.momentum_momentum;
    j["cross_mixed"] = r.cross_mixed;
    j["canonical_error"] = r.canonical_error;
    j["canonical_error_half_spacing"] = r.canonical_error_fine;
    j["error_ratio"] = r.error_ratio;
    j["convergence_order"] = r.convergence_order;
    return j;
}

std::string correlation_csv(const std::vector<CorrelationRecord>& records) {
    std::ostringstream os;
    os << "a,b,E,sigma,trials\n";
    for (const auto& r : records) {
        os << format_number(r.setting_1) << ',' << format_number(r.setting_2) << ',' << format_number(r.e_value)
           << ',' << format_number(r.sigma) << ',' << r.trials << '\n';
    }
    return os.str();
}

std::string scan_csv(const RangeScan& s) {
    std::ostringstream os;
    os << "distance,concurrence,satisfied_fraction\n";
    for (std::size_t i = 0; i < s.distances.size(); ++i) {
        os << format_number(s.distances[i]) << ',' << format_number(s.concurrences[i]) << ','
           << format_number(s.satisfied_fractions[i]) << '\n';
    }
    return os.str();
}

std::string concentration_csv(const ConcentrationReport& r) {
    std::ostringstream os;
    os << "N,prob\n";
    for (std::size_t i = 0; i < r.dims.size(); ++i) os << r.dims[i] << ',' << format_number(r.deviation_probs[i]) << '\n';
    return os.str();
}

std::string instantaneity_csv(const std::vector<InstantaneityPoint>& points) {
    std::ostringstream os;
    os << "distance,latency\n";
    for (const auto& p : points) os << format_number(p.distance) << ',' << p.latency << '\n';
    return os.str();
}

std::string trajectory_rows(const Ensemble& e) {
    std::ostringstream os;
    for (const auto& m : e.molecules) {
        os << e.tau_tick << ',' << e.t_step << ',' << m.index << ',' << (m.particle == Particle::A ? 'a' : 'b');
        for (double v : {m.position.x, m.position.y, m.position.z, m.velocity.x, m.velocity.y, m.velocity.z,
                         m.channels.n1, m.channels.n2, m.channels.phi1, m.channels.phi2}) {
            os << ',' << format_number(v);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace hrs
