#pragma once

#include <cstddef>
#include <vector>

namespace rankspectra {

struct QuadratureRule {
    std::vector<double> nodes;    // ascending
    std::vector<double> weights;
};

/// Gauss-Legendre rule with `order` nodes mapped onto [lower, upper].
/// Exact for polynomials of degree 2*order - 1.
QuadratureRule gauss_legendre(std::size_t order, double lower, double upper);

}  // namespace rankspectra
