#pragma once

#include <cstddef>

namespace hrs {

// Residuals of the position/momentum commutators on a 2D tensor test grid,
// with u as diagonal coordinate multiplication and p = -(central difference).
struct CommutatorReport {
    std::size_t grid_size = 0;
    double spacing = 0.0;
    double position_position = 0.0;    // max |[u1, u2] v|
    double momentum_momentum = 0.0;    // max |[p1, p2] v|
    double cross_mixed = 0.0;          // max |[u1, p2] v| and |[u2, p1] v|
    double canonical_error = 0.0;      // max |([u, p] - I) v| at (n, h)
    double canonical_error_fine = 0.0; // same at (2n - 1, h / 2), same physical window
    double error_ratio = 0.0;
    double convergence_order = 0.0;    // log2(error_ratio)
};

// Throws Error{GridTooSmall} if grid_size < 8, Error{InvalidValue} if spacing <= 0.
CommutatorReport check_commutators(std::size_t grid_size, double spacing);

// max |([u, p] - I) v| over interior points of a centred 1D grid, v a unit Gaussian.
double canonical_commutator_error(std::size_t grid_size, double spacing);

}  // namespace hrs
