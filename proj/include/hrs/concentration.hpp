#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hrs/config.hpp"
#include "hrs/rng.hpp"

namespace hrs {

// Observable on a point of [-1, 1]^N. Must be pure: it is called from
// several threads at once.
using Observable = std::function<double(std::span<const double>)>;

double mean_coordinate(std::span<const double> x);
double first_coordinate(std::span<const double> x);

// Max of |f(x) - f(y)| / |x - y| over probe pairs: independent random pairs,
// single-coordinate perturbations and shifts along the all-ones direction.
// A lower bound on the true constant. Throws Error{PreconditionViolated} if samples < 2.
double lipschitz_constant_estimate(const Observable& f, std::size_t n, std::size_t samples,
                                   RandomStream& stream);

// P(|f - median| > epsilon) with x uniform on [-1, 1]^n, the median taken
// from the same batch. Throws Error{PreconditionViolated} if samples < 100.
double deviation_probability(const Observable& f, std::size_t n, double epsilon, std::size_t samples,
                             RandomStream& stream);

// 2 exp(-n eps^2 / 2): Hoeffding bound for the mean coordinate.
double hoeffding_bound(std::size_t n, double epsilon);

struct ConcentrationReport {
    std::vector<std::size_t> dims;
    double epsilon = 0.0;
    std::size_t samples = 0;
    std::vector<double> deviation_probs;
    double fitted_slope = 0.0;
    double fitted_intercept = 0.0;
    double fit_r2 = 0.0;
};

// Least-squares fit of log P = a + b N over the dims with nonzero P.
// Throws Error{SingleDim} for fewer than two dims, Error{InvalidValue} unless
// dims are strictly increasing, Error{AllZeroProbabilities} when fewer than
// two probabilities are nonzero.
ConcentrationReport concentration_scan(const Observable& f, const std::vector<std::size_t>& dims,
                                       double epsilon, std::size_t samples, RandomStream& stream);

struct CollapseReport {
    double spread_start = 0.0;        // t = 0
    double spread_ergodic_end = 0.0;  // t = t_e
    double spread_equilibrium = 0.0;  // t = T
    double spread_end = 0.0;          // t = 2T
};

// One cycle from a uniformly spread ensemble, no thermalization.
CollapseReport collapse_concentration_demo(const SimConfig& config);

}  // namespace hrs
