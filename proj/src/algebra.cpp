#include "hrs/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hrs/error.hpp"

namespace hrs {

namespace {

std::vector<double> centred_grid(std::size_t n, double h) {
    std::vector<double> x(n);
    const double mid = 0.5 * static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) x[i] = (static_cast<double>(i) - mid) * h;
    return x;
}

// Row-major n x n field; axis 0 runs over the first coordinate.
struct Field {
    std::size_t n;
    std::vector<double> v;
    double& at(std::size_t i, std::size_t j) { return v[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return v[i * n + j]; }
};

Field multiply_coordinate(const Field& f, const std::vector<double>& x, int axis) {
    Field out = f;
    for (std::size_t i = 0; i < f.n; ++i) {
        for (std::size_t j = 0; j < f.n; ++j) out.at(i, j) *= x[axis == 0 ? i : j];
    }
    return out;
}

// p = -(central difference), zero outside the grid.
Field momentum(const Field& f, double h, int axis) {
    Field out{f.n, std::vector<double>(f.v.size(), 0.0)};
    const auto get = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
        const auto n = static_cast<std::ptrdiff_t>(f.n);
        if (i < 0 || j < 0 || i >= n || j >= n) return 0.0;
        return f.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    };
    for (std::size_t i = 0; i < f.n; ++i) {
        for (std::size_t j = 0; j < f.n; ++j) {
            const auto si = static_cast<std::ptrdiff_t>(i);
            const auto sj = static_cast<std::ptrdiff_t>(j);
            const double fwd = axis == 0 ? get(si + 1, sj) : get(si, sj + 1);
            const double bwd = axis == 0 ? get(si - 1, sj) : get(si, sj - 1);
            out.at(i, j) = -(fwd - bwd) / (2.0 * h);
        }
    }
    return out;
}

double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.v.size(); ++k) m = std::max(m, std::abs(a.v[k] - b.v[k]));
    return m;
}

}  // namespace

double canonical_commutator_error(std::size_t n, double h) {
    const auto x = centred_grid(n, h);
    std::vector<double> v(n), xv(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = std::exp(-0.5 * x[i] * x[i]);
        xv[i] = x[i] * v[i];
    }
    double err = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double p_v = -(v[i + 1] - v[i - 1]) / (2.0 * h);
        const double p_xv = -(xv[i + 1] - xv[i - 1]) / (2.0 * h);
        const double commutator = x[i] * p_v - p_xv;
        err = std::max(err, std::abs(commutator - v[i]));
    }
    return err;
}

CommutatorReport check_commutators(std::size_t grid_size, double spacing) {
    if (grid_size < 8) {
        throw Error(ErrorKind::GridTooSmall, "grid_size " + std::to_string(grid_size) + " < 8");
    }
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw Error(ErrorKind::InvalidValue, "spacing must be positive");
    }
    const std::size_t n = grid_size;
    const auto x = centred_grid(n, spacing);
    Field v{n, std::vector<double>(n * n)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) v.at(i, j) = std::exp(-0.5 * (x[i] * x[i] + x[j] * x[j]));
    }

    CommutatorReport r;
    r.grid_size = n;
    r.spacing = spacing;
    r.position_position = max_abs_diff(multiply_coordinate(multiply_coordinate(v, x, 1), x, 0),
                                       multiply_coordinate(multiply_coordinate(v, x, 0), x, 1));
    r.momentum_momentum = max_abs_diff(momentum(momentum(v, spacing, 1), spacing, 0),
                                       momentum(momentum(v, spacing, 0), spacing, 1));
    r.cross_mixed = std::max(
        max_abs_diff(multiply_coordinate(momentum(v, spacing, 1), x, 0), momentum(multiply_coordinate(v, x, 0), spacing, 1)),
        max_abs_diff(multiply_coordinate(momentum(v, spacing, 0), x, 1), momentum(multiply_coordinate(v, x, 1), spacing, 0)));
    r.canonical_error = canonical_commutator_error(n, spacing);
    r.canonical_error_fine = canonical_commutator_error(2 * n - 1, 0.5 * spacing);
    r.error_ratio = r.canonical_error_fine > 0.0 ? r.canonical_error / r.canonical_error_fine : 0.0;
    r.convergence_order = r.error_ratio > 0.0 ? std::log2(r.error_ratio) : 0.0;
    return r;
}

}  // namespace hrs
