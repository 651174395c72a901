#include "hrs/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hrs/dynamics.hpp"
#include "hrs/error.hpp"
#include "hrs/model.hpp"
#include "hrs/parallel.hpp"

namespace hrs {

namespace {

constexpr std::size_t kBatch = 4096;

void fill_cube(std::span<double> x, RandomStream& s) {
    for (auto& v : x) v = s.uniform(-1.0, 1.0);
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

double mean_coordinate(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double first_coordinate(std::span<const double> x) { return x.empty() ? 0.0 : x[0]; }

double lipschitz_constant_estimate(const Observable& f, std::size_t n, std::size_t samples,
                                   RandomStream& stream) {
    if (samples < 2) throw Error(ErrorKind::PreconditionViolated, "lipschitz estimate needs samples >= 2");
    if (n == 0) throw Error(ErrorKind::InvalidValue, "dimension must be positive");
    std::vector<double> x(n), y(n);
    double best = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        fill_cube(x, stream);
        switch (s % 3) {
            case 0:
                fill_cube(y, stream);
                break;
            case 1: {
                y = x;
                const std::size_t k = (s / 3) % n;
                const double step = stream.uniform(0.01, 0.5);
                y[k] += (stream.next_u32() & 1u) ? step : -step;
                break;
            }
            default: {
                const double step = stream.uniform(0.01, 0.5);
                for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + step;
                break;
            }
        }
        const double d = euclidean(x, y);
        if (d > 0.0) best = std::max(best, std::abs(f(x) - f(y)) / d);
    }
    return best;
}

double deviation_probability(const Observable& f, std::size_t n, double epsilon, std::size_t samples,
                             RandomStream& stream) {
    if (samples < 100) throw Error(ErrorKind::PreconditionViolated, "deviation probability needs samples >= 100");
    if (n == 0) throw Error(ErrorKind::InvalidValue, "dimension must be positive");
    if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidValue, "epsilon must be positive");

    const std::uint64_t base = stream.next_u64();
    const std::size_t batches = (samples + kBatch - 1) / kBatch;
    std::vector<double> values(samples);
    parallel_for(batches, [&](std::size_t b0, std::size_t b1) {
        std::vector<double> x(n);
        for (std::size_t b = b0; b < b1; ++b) {
            RandomStream s(stream.seed(), derive_stream_id(base, b));
            const std::size_t end = std::min(samples, (b + 1) * kBatch);
            for (std::size_t i = b * kBatch; i < end; ++i) {
                fill_cube(x, s);
                values[i] = f(x);
            }
        }
    });

    std::vector<double> sorted = values;
    const std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
    double median = sorted[mid];
    if (sorted.size() % 2 == 0) {
        const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (median + lower);
    }
    const auto hits = std::count_if(values.begin(), values.end(),
                                    [&](double v) { return std::abs(v - median) > epsilon; });
    return static_cast<double>(hits) / static_cast<double>(samples);
}

double hoeffding_bound(std::size_t n, double epsilon) {
    return std::min(1.0, 2.0 * std::exp(-static_cast<double>(n) * epsilon * epsilon / 2.0));
}

ConcentrationReport concentration_scan(const Observable& f, const std::vector<std::size_t>& dims,
                                       double epsilon, std::size_t samples, RandomStream& stream) {
    if (dims.size() < 2) throw Error(ErrorKind::SingleDim, "need at least two dims to fit a slope");
    for (std::size_t i = 1; i < dims.size(); ++i) {
        if (dims[i] <= dims[i - 1]) throw Error(ErrorKind::InvalidValue, "dims must be strictly increasing");
    }
    ConcentrationReport r;
    r.dims = dims;
    r.epsilon = epsilon;
    r.samples = samples;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        RandomStream s(stream.seed(), derive_stream_id(stream.next_u64(), i));
        r.deviation_probs.push_back(deviation_probability(f, dims[i], epsilon, samples, s));
    }

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (r.deviation_probs[i] > 0.0) {
            xs.push_back(static_cast<double>(dims[i]));
            ys.push_back(std::log(r.deviation_probs[i]));
        }
    }
    if (xs.size() < 2) {
        throw Error(ErrorKind::AllZeroProbabilities,
                    "fewer than two nonzero deviation probabilities; epsilon too large or samples too few");
    }
    const double m = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    r.fitted_slope = sxy / sxx;
    r.fitted_intercept = my - r.fitted_slope * mx;
    r.fit_r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return r;
}

CollapseReport collapse_concentration_demo(const SimConfig& config) {
    RandomStream init(config.seed, derive_stream_id(0xC011A95Eull, 0));
    Ensemble e = make_spread_ensemble(config, init);
    const CycleSchedule schedule = make_schedule(config);
    CollapseReport r;
    CycleHooks hooks;
    hooks.observe = [&](const Ensemble& s) {
        if (s.t_step == 0) r.spread_start = ensemble_spread(s);
        if (s.t_step == schedule.ergodic_end) r.spread_ergodic_end = ensemble_spread(s);
        if (s.t_step == schedule.semi_period) r.spread_equilibrium = ensemble_spread(s);
    };
    e = run_cycle(std::move(e), config, hooks, 0xC011A95Eull);
    r.spread_end = ensemble_spread(e);
    return r;
}

}  // namespace hrs
