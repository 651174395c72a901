#include <doctest.h>

#include <cmath>
#include <vector>

#include "hrs/concentration.hpp"
#include "hrs/dynamics.hpp"
#include "hrs/error.hpp"
#include "support.hpp"

using namespace hrs;

namespace {

double constant(std::span<const double>) { return 0.25; }
double doubled_first(std::span<const double> x) { return 2.0 * x[0]; }

// Irwin-Hall CDF for the sum of n standard uniforms.
double irwin_hall_cdf(int n, double x) {
    double sum = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= static_cast<int>(std::floor(x)) && k <= n; ++k) {
        sum += (k % 2 == 0 ? 1.0 : -1.0) * binom * std::pow(x - k, n);
        binom = binom * (n - k) / (k + 1);
    }
    return sum / std::tgamma(n + 1.0);
}

ErrorKind scan_error(const Observable& f, const std::vector<std::size_t>& dims) {
    RandomStream s = rng_stream(1, 1);
    try {
        concentration_scan(f, dims, 0.15, 1000, s);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::PreconditionViolated;
}

}  // namespace

TEST_CASE("lipschitz estimates") {
    RandomStream s = rng_stream(40, 0);
    CHECK(lipschitz_constant_estimate(first_coordinate, 20, 3000, s) <= 1.0 + 1e-9);
    const double twice = lipschitz_constant_estimate(doubled_first, 20, 3000, s);
    CHECK(twice > 1.0);
    CHECK(twice <= 2.0 + 1e-9);
    for (std::size_t n : {4u, 25u, 100u}) {
        CHECK(lipschitz_constant_estimate(mean_coordinate, n, 3000, s) <= 1.0 / std::sqrt(static_cast<double>(n)) + 1e-9);
    }
    CHECK_THROWS_AS(lipschitz_constant_estimate(first_coordinate, 5, 1, s), Error);
}

TEST_CASE("deviation of a constant observable is zero") {
    RandomStream s = rng_stream(41, 0);
    CHECK(deviation_probability(constant, 10, 0.01, 1000, s) == 0.0);
    CHECK_THROWS_AS(deviation_probability(constant, 10, 0.01, 99, s), Error);
}

TEST_CASE("mean coordinate at large N almost never deviates") {
    RandomStream s = rng_stream(42, 0);
    CHECK(hoeffding_bound(10000, 0.1) < 1e-20);
    CHECK(deviation_probability(mean_coordinate, 10000, 0.1, 2000, s) < 1e-3);
}

TEST_CASE("mean coordinate at N = 10 matches the exact Irwin-Hall tail") {
    // |mean| > 0.1 <=> the sum of 10 standard uniforms leaves [4.5, 5.5]; the median is 0.
    const double exact = 2.0 * (1.0 - irwin_hall_cdf(10, 5.5));
    RandomStream s = rng_stream(43, 0);
    const std::size_t samples = 200000;
    const double p = deviation_probability(mean_coordinate, 10, 0.1, samples, s);
    const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(samples));
    CHECK(std::abs(p - exact) <= 3.0 * sigma);
}

TEST_CASE("deviation probability is nonincreasing in epsilon") {
    double previous = 1.0;
    for (double eps = 0.01; eps <= 0.4; eps += 0.03) {
        RandomStream s = rng_stream(44, 0);  // same samples for every epsilon
        const double p = deviation_probability(mean_coordinate, 20, eps, 5000, s);
        CHECK(p <= previous);
        previous = p;
    }
}

TEST_CASE("empirical deviation respects the Hoeffding bound") {
    for (std::size_t n : {5u, 20u, 80u, 320u}) {
        RandomStream s = rng_stream(45, n);
        const std::size_t samples = 20000;
        const double p = deviation_probability(mean_coordinate, n, 0.15, samples, s);
        const double bound = hoeffding_bound(n, 0.15);
        CHECK(p <= bound + 3.0 * std::sqrt(bound * (1.0 - bound) / static_cast<double>(samples)) + 1e-12);
    }
}

TEST_CASE("concentration scan slope is negative") {
    RandomStream s = rng_stream(46, 0);
    const ConcentrationReport r = concentration_scan(mean_coordinate, {50, 100, 200, 400}, 0.15, 100000, s);
    CHECK(r.fitted_slope < 0.0);
    CHECK(r.deviation_probs.size() == 4);
    for (double p : r.deviation_probs) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
    CHECK(r.fit_r2 >= 0.0);
    CHECK(r.fit_r2 <= 1.0);
}

TEST_CASE("concentration scan errors") {
    CHECK(scan_error(mean_coordinate, {50}) == ErrorKind::SingleDim);
    CHECK(scan_error(constant, {50, 100}) == ErrorKind::AllZeroProbabilities);
    CHECK(scan_error(mean_coordinate, {100, 50}) == ErrorKind::InvalidValue);
}

TEST_CASE("collapse demo contracts to a minimum at the equilibrium point") {
    SimConfig c = testing_support::small_config();
    c.n_a = 200;
    c.n_b = 200;
    c.t_min_steps = 1000;
    c.spatial_extent = 100;
    c.domain_margin = 20;
    const CollapseReport r = collapse_concentration_demo(c);
    const CycleSchedule sched = make_schedule(c);
    REQUIRE(sched.ergodic_end == 600);
    double product = 1.0;
    for (std::int64_t t = sched.ergodic_end; t < sched.semi_period; ++t) product *= 1.0 - kappa(t, sched) * c.contraction_rate;
    CHECK(product < 0.1);
    CHECK(r.spread_equilibrium < 0.1 * r.spread_ergodic_end);
    CHECK(r.spread_equilibrium <= r.spread_start);
    CHECK(r.spread_equilibrium <= r.spread_end);
}

TEST_CASE("collapse demo without contraction keeps the spread") {
    SimConfig c = testing_support::small_config();
    c.n_a = 100;
    c.n_b = 100;
    c.t_min_steps = 200;
    c.contraction_rate = 0.0;
    const CollapseReport r = collapse_concentration_demo(c);
    CHECK(r.spread_equilibrium == doctest::Approx(r.spread_ergodic_end).epsilon(1e-12));
    CHECK(r.spread_equilibrium <= r.spread_ergodic_end);
}
